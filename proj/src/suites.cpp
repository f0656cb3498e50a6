#include "pestov/suites.hpp"

#include "pestov/corpus.hpp"
#include "pestov/grassmannian.hpp"
#include "pestov/integration.hpp"
#include "pestov/models.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace pestov {

NumericalOptions SuiteConfig::numerical() const {
  NumericalOptions opt;
  opt.fd_step = fd_step;
  opt.inner_fd_step = inner_fd_step;
  opt.ode_step = ode_step;
  return opt;
}

Json SuiteConfig::to_json() const {
  Json j;
  j["manifold"] = manifold;
  j["k"] = k;
  j["i"] = i ? Json(*i + 1) : Json(nullptr);
  j["j"] = this->j ? Json(*this->j + 1) : Json(nullptr);
  j["fd_step"] = fd_step;
  j["inner_fd_step"] = inner_fd_step;
  j["ode_step"] = ode_step;
  j["samples"] = samples;
  j["seed"] = seed;
  j["tolerance"] = tolerance;
  j["pairs"] = pairs;
  j["convergence_steps"] = convergence_steps;
  j["loops"] = loops;
  j["calibration_samples"] = calibration_samples;
  j["probes"] = probes;
  return j;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const std::string v = trim(value);
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
    throw DomainError("invalid value for " + key + ": '" + value + "'");
  }
  return out;
}

double positive(const std::string& key, const std::string& value) {
  const double x = parse_number<double>(key, value);
  if (!(x > 0.0)) throw DomainError(key + " must be positive");
  return x;
}

int index_setting(const std::string& key, const std::string& value) {
  const int x = parse_number<int>(key, value);
  if (x < 1) throw DomainError(key + " is 1-based and must be >= 1");
  return x - 1;
}

}  // namespace

void apply_setting(SuiteConfig& c, const std::string& raw_key, const std::string& value) {
  const std::string key = trim(raw_key);
  if (key == "manifold") {
    c.manifold = trim(value);
  } else if (key == "k") {
    c.k = parse_number<int>(key, value);
  } else if (key == "i") {
    c.i = index_setting(key, value);
  } else if (key == "j") {
    c.j = index_setting(key, value);
  } else if (key == "fd-step") {
    c.fd_step = positive(key, value);
  } else if (key == "inner-fd-step") {
    c.inner_fd_step = parse_number<double>(key, value);
  } else if (key == "ode-step") {
    c.ode_step = positive(key, value);
  } else if (key == "samples") {
    c.samples = parse_number<long>(key, value);
    if (c.samples < 2) throw DomainError("samples must be at least 2");
  } else if (key == "seed") {
    c.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "tolerance") {
    c.tolerance = positive(key, value);
  } else if (key == "pairs") {
    c.pairs = parse_number<int>(key, value);
  } else if (key == "loops") {
    c.loops = parse_number<int>(key, value);
  } else if (key == "threads") {
    c.threads = parse_number<int>(key, value);
  } else if (key == "calibration-samples") {
    c.calibration_samples = parse_number<long>(key, value);
  } else if (key == "probes") {
    c.probes = parse_number<int>(key, value);
  } else if (key == "convergence-steps") {
    std::vector<double> steps;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) steps.push_back(positive(key, item));
    if (steps.size() < 3) throw DomainError("convergence-steps needs at least three values");
    c.convergence_steps = steps;
  } else {
    throw DomainError("unknown setting '" + key + "'");
  }
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::stringstream ss(text);
  std::string line;
  int number = 0;
  while (std::getline(ss, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw DomainError("config line " + std::to_string(number) + ": expected key = value");
    }
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

namespace {

Rng stream_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
  return Rng(seq);
}

Vec random_unit(const ManifoldModel& m, const Point& p, Rng& rng) {
  std::normal_distribution<double> normal;
  Vec c(m.dim());
  for (int a = 0; a < m.dim(); ++a) c[a] = normal(rng);
  return orthonormal_chart_basis(m, p) * (c / c.norm());
}

CheckRecord base_record(const SuiteConfig& c, IdentityId id, std::vector<int> indices) {
  CheckRecord r;
  r.identity_id = to_string(id);
  r.manifold = c.manifold;
  r.k = c.k;
  for (int& x : indices) x += 1;
  r.indices = std::move(indices);
  r.fd_step = c.fd_step;
  r.seed = c.seed;
  return r;
}

std::vector<int> identity_indices(IdentityId id, const IdentityArgs& a) {
  switch (id) {
    case IdentityId::kSymGrad:
    case IdentityId::kSymDiv: return {a.i};
    case IdentityId::kTensor: return {};
    case IdentityId::kGGradV: return {a.i, a.j, a.l};
    default: return {a.i, a.j};
  }
}

void require_k(const ManifoldModel& m, int k) {
  if (k < 1 || k > m.dim()) {
    throw DomainError("k = " + std::to_string(k) + " is out of range for " + m.name());
  }
}

}  // namespace

Report run_pointwise(const SuiteConfig& c) {
  const ModelPtr m = make_manifold(c.manifold);
  require_k(*m, c.k);
  const NumericalOptions opt = c.numerical();
  const auto corpus = function_corpus(m, c.seed);
  const IdentityId ids[] = {IdentityId::kSymGrad, IdentityId::kSymDiv,  IdentityId::kTensor,
                            IdentityId::kSymFlow, IdentityId::kGGradV, IdentityId::kPestov};
  Report report;
  report.config = c.to_json();
  report.config["suite"] = "pointwise";
  for (IdentityId id : ids) {
    for (int p = 0; p < c.pairs; ++p) {
      Rng rng = stream_rng(c.seed, static_cast<std::uint64_t>(id), p);
      const Point base = m->sample_probe_point(rng);
      const Frame f = sample_fiber(*m, base, c.k, rng);
      const ScalarBundleFunction& phi = corpus[p % corpus.size()];
      std::uniform_int_distribution<int> slot(0, c.k - 1);
      IdentityArgs args;
      args.i = c.i ? *c.i : slot(rng);
      args.j = c.j ? *c.j : slot(rng);
      args.l = slot(rng);
      args.u = random_unit(*m, base, rng);
      args.w = random_unit(*m, base, rng);
      if (args.i >= c.k || args.j >= c.k) throw DomainError("identity index exceeds k");

      CheckRecord r = base_record(c, id, identity_indices(id, args));
      r.extras["function"] = phi.name;
      try {
        const Residual res = pointwise_residual(id, m, phi, f, args, opt);
        const ConvergenceResult conv =
            convergence_order(id, m, phi, f, args, c.convergence_steps, opt);
        r.residual = res.relative();
        r.scale = res.scale;
        r.extras["absolute_residual"] = res.value;
        if (id == IdentityId::kTensor || id == IdentityId::kSymFlow || id == IdentityId::kPestov) {
          r.extras["curvature_term"] = res.curvature_term;
        }
        r.extras["convergence_order"] = conv.noise_floor ? Json(nullptr) : Json(conv.order);
        r.extras["convergence_residuals"] = conv.relative_residuals;
        if (r.residual > c.tolerance) {
          r.verdict = Verdict::kFail;
        } else if (conv.noise_floor) {
          r.verdict = Verdict::kNoiseFloor;
        } else {
          r.verdict = conv.order >= c.order_min && conv.order <= c.order_max ? Verdict::kPass
                                                                             : Verdict::kFail;
        }
      } catch (const ChartExitError& e) {
        r.verdict = Verdict::kFail;
        r.extras["note"] = e.what();
      }
      report.records.push_back(std::move(r));
    }
  }
  return report;
}

namespace {

CheckRecord integrated_record(const SuiteConfig& c, const IntegratedResult& res,
                              const std::string& function) {
  std::vector<int> idx;
  if (res.spec.i >= 0) idx.push_back(res.spec.i);
  if (res.spec.j >= 0) idx.push_back(res.spec.j);
  CheckRecord r = base_record(c, res.spec.id, idx);
  r.residual = res.estimate.mean;
  r.stderr_ = res.estimate.stderr_;
  r.n_samples = res.estimate.n_samples;
  r.scale = res.estimate.stderr_ * std::sqrt(static_cast<double>(std::max(1L, res.estimate.n_samples)));
  r.seed = res.estimate.seed;
  r.verdict = res.verdict;
  r.extras["function"] = function;
  r.extras["bias_allowance"] = res.bias_allowance;
  if (res.spec.id == IdentityId::kInvariantId && res.verdict != Verdict::kSkip) {
    r.extras["lhs"] = res.lhs;
    r.extras["rhs"] = res.rhs;
  }
  if (!res.note.empty()) r.extras["note"] = res.note;
  return r;
}

CheckRecord skip_record(const SuiteConfig& c, IdentityId id, const std::string& note) {
  CheckRecord r = base_record(c, id, {});
  r.verdict = Verdict::kSkip;
  r.extras["note"] = note;
  return r;
}

std::vector<int> selected(const std::optional<int>& fixed, int k) {
  if (fixed) {
    if (*fixed >= k) throw DomainError("identity index exceeds k");
    return {*fixed};
  }
  std::vector<int> all(k);
  for (int a = 0; a < k; ++a) all[a] = a;
  return all;
}

}  // namespace

Report run_integrated(const SuiteConfig& c) {
  const ModelPtr m = make_manifold(c.manifold);
  require_k(*m, c.k);
  const NumericalOptions opt = c.numerical();
  Report report;
  report.config = c.to_json();
  report.config["suite"] = "integrated";
  if (!m->is_compact()) {
    for (IdentityId id : {IdentityId::kDivHVanishes, IdentityId::kFlowByParts,
                          IdentityId::kIntPestov, IdentityId::kBundlePestov,
                          IdentityId::kInvariantId}) {
      report.records.push_back(skip_record(c, id, m->name() + " is not compact"));
    }
    return report;
  }
  IntegratedOptions options;
  options.mc.n_samples = c.samples;
  options.mc.seed = c.seed;
  options.mc.threads = c.threads;
  options.calibration_samples = c.calibration_samples;

  const auto corpus = function_corpus(m, c.seed);
  const auto fields = semibasic_corpus(m, c.seed);
  const auto is = selected(c.i, c.k);
  const auto js = selected(c.j, c.k);
  for (std::size_t f = 0; f < corpus.size(); ++f) {
    IntegrandInputs inputs{corpus[f], corpus[(f + 1) % corpus.size()], fields[f % fields.size()]};
    std::vector<IntegratedSpec> specs;
    if (f < fields.size()) specs.push_back({IdentityId::kDivHVanishes, -1, -1});
    for (int i : is) specs.push_back({IdentityId::kFlowByParts, i, -1});
    for (int i : is)
      for (int j : js) specs.push_back({IdentityId::kIntPestov, i, j});
    specs.push_back({IdentityId::kBundlePestov, -1, -1});
    const auto results = integrated_residuals(specs, m, inputs, c.k, options, opt);
    for (const auto& res : results) {
      std::string name = corpus[f].name;
      if (res.spec.id == IdentityId::kDivHVanishes) name = inputs.field->name;
      if (res.spec.id == IdentityId::kFlowByParts) name += " / " + inputs.partner->name;
      report.records.push_back(integrated_record(c, res, name));
    }
  }

  // Flat tori: base-independent fiber functions are invariant under every
  // frame flow. Elsewhere the corpus only exercises the precondition probe.
  const bool flat_torus = m->is_flat();
  const auto invariant = flat_torus ? fiber_only_corpus(m->dim(), c.seed) : corpus;
  for (const auto& phi : invariant) {
    for (int i : is) {
      const IntegratedResult res = invariant_identity(m, phi, c.k, i, options, opt);
      report.records.push_back(integrated_record(c, res, phi.name));
    }
  }
  return report;
}

Report run_grassmannian(const SuiteConfig& c) {
  const ModelPtr m = make_manifold(c.manifold);
  require_k(*m, c.k);
  const int n = m->dim();
  const NumericalOptions opt = c.numerical();
  Report report;
  report.config = c.to_json();
  report.config["suite"] = "grassmannian";

  IntegratedOptions options;
  options.mc.n_samples = c.samples;
  options.mc.seed = c.seed;
  options.mc.threads = c.threads;
  options.calibration_samples = c.calibration_samples;
  InvarianceOptions inv;
  inv.n_loops = c.loops;
  inv.seed = c.seed;

  std::vector<Frame> probes;
  {
    Rng rng = stream_rng(c.seed, 0x6a, 0);
    for (int p = 0; p < c.probes; ++p) {
      const Point base = m->sample_probe_point(rng);
      probes.push_back(sample_fiber(*m, base, n, rng));
    }
  }
  IdentityArgs args;
  args.plane_dim = c.k;

  auto probe_max = [&](IdentityId id, const ScalarBundleFunction& phi, double& scale) {
    double worst = 0.0;
    scale = 0.0;
    for (const Frame& f : probes) {
      const Residual r = pointwise_residual(id, m, phi, f, args, opt);
      worst = std::max(worst, std::abs(r.value));
      scale = std::max(scale, r.scale);
    }
    return worst;
  };

  for (const GrassmannFunction& phi : grassmann_corpus(m, c.k, c.seed)) {
    ScalarBundleFunction lifted;
    try {
      lifted = lifted_extension(m, phi, c.k);
    } catch (const DomainError& e) {
      CheckRecord r = base_record(c, IdentityId::kGradVSpan, {});
      r.verdict = Verdict::kFail;
      r.extras["function"] = phi.name;
      r.extras["note"] = e.what();
      report.records.push_back(std::move(r));
      continue;
    }
    for (auto [id, tol] : {std::pair{IdentityId::kGradVSpan, 1e-6}, std::pair{IdentityId::kWedge, 1e-7}}) {
      CheckRecord r = base_record(c, id, {});
      r.residual = probe_max(id, lifted, r.scale);
      r.n_samples = c.probes;
      r.verdict = r.residual < tol ? Verdict::kPass : Verdict::kFail;
      r.extras["function"] = phi.name;
      r.extras["tolerance"] = tol;
      report.records.push_back(std::move(r));
    }

    {
      CheckRecord r = base_record(c, IdentityId::kFlowTransport, {});
      auto gap = [&](double h, double& scale) {
        NumericalOptions local = opt;
        local.fd_step = h;
        double worst = 0.0;
        for (const Frame& f : probes) {
          for (int i = 0; i < c.k; ++i) {
            const auto pair = flow_transport_pair(m, phi, c.k, f, i, local);
            worst = std::max(worst, std::abs(pair[0] - pair[1]) / std::max(1.0, std::abs(pair[1])));
            scale = std::max(scale, std::abs(pair[1]));
          }
        }
        return worst;
      };
      r.residual = gap(c.fd_step, r.scale);
      std::vector<double> xs, ys, all;
      for (double h : c.convergence_steps) {
        double unused = 0.0;
        const double g = gap(h, unused);
        all.push_back(g);
        // One difference level: rounding enters as eps / h.
        if (g > 50.0 * std::numeric_limits<double>::epsilon() / h) {
          xs.push_back(h);
          ys.push_back(g);
        }
      }
      r.n_samples = c.probes;
      r.extras["function"] = phi.name;
      r.extras["convergence_residuals"] = all;
      if (r.residual > c.tolerance) {
        r.verdict = Verdict::kFail;
      } else if (xs.size() < 2) {
        r.verdict = Verdict::kNoiseFloor;
      } else {
        const double order = log_log_slope(xs, ys);
        r.extras["convergence_order"] = order;
        r.verdict = order >= c.order_min && order <= c.order_max ? Verdict::kPass : Verdict::kFail;
      }
      report.records.push_back(std::move(r));
    }

    {
      const InvarianceReport ir = check_transport_invariance(m, phi, c.k, inv, opt);
      CheckRecord r = base_record(c, IdentityId::kTransportInvariance, {});
      r.residual = std::max(ir.nonintrinsic_drift, ir.loop_drift);
      r.n_samples = ir.n_loops;
      r.verdict = ir.verdict;
      r.extras["function"] = phi.name;
      r.extras["max_curvature_eigenvalue"] = ir.max_curvature_eigenvalue;
      r.extras["intrinsic_drift"] = ir.intrinsic_drift;
      r.extras["nonintrinsic_drift"] = ir.nonintrinsic_drift;
      r.extras["loop_drift"] = ir.loop_drift;
      r.extras["tolerance"] = inv.tolerance;
      if (m->is_flat() && phi.name == "kaehler") {
        r.extras["note"] = "flat complex torus: the non-flat hypothesis of the construction is vacuous here";
      } else if (!ir.note.empty()) {
        r.extras["note"] = ir.note;
      }
      report.records.push_back(std::move(r));
    }

    {
      const ConsequenceResult cr = consequence_identity(m, phi, c.k, inv, options, opt);
      CheckRecord r = base_record(c, IdentityId::kConsequence, {});
      r.residual = cr.residual.mean;
      r.stderr_ = cr.residual.stderr_;
      r.n_samples = cr.residual.n_samples;
      r.scale = cr.residual.stderr_ * std::sqrt(static_cast<double>(std::max(1L, cr.residual.n_samples)));
      r.verdict = cr.verdict;
      r.extras["function"] = phi.name;
      if (cr.verdict != Verdict::kSkip) {
        r.extras["lhs"] = cr.lhs;
        r.extras["rhs"] = cr.rhs;
        r.extras["bias_allowance"] = cr.bias_allowance;
      }
      if (!cr.note.empty()) r.extras["note"] = cr.note;
      report.records.push_back(std::move(r));
    }
  }

  {
    const ScalarBundleFunction control = non_lifted_function(m, c.seed);
    CheckRecord r = base_record(c, IdentityId::kWedge, {});
    r.residual = probe_max(IdentityId::kWedge, control, r.scale);
    r.n_samples = c.probes;
    r.expect_fail = true;
    r.verdict = r.residual < 1e-7 ? Verdict::kPass : Verdict::kFail;
    r.extras["function"] = control.name;
    r.extras["note"] = "negative control: not a lifted function";
    report.records.push_back(std::move(r));
  }
  return report;
}

bool is_suite_name(const std::string& suite) {
  return suite == "pointwise" || suite == "integrated" || suite == "grassmannian" ||
         suite == "all";
}

Report run_suite(const std::string& suite, const SuiteConfig& config) {
  if (suite == "pointwise") return run_pointwise(config);
  if (suite == "integrated") return run_integrated(config);
  if (suite == "grassmannian") return run_grassmannian(config);
  if (suite == "all") {
    Report out = run_pointwise(config);
    out.append(run_integrated(config));
    out.append(run_grassmannian(config));
    out.config = config.to_json();
    out.config["suite"] = "all";
    return out;
  }
  throw DomainError("unknown suite '" + suite + "'");
}

}  // namespace pestov
