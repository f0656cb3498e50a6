// Acceptance run: one PASS/FAIL line per criterion. Reports of every suite
// run are written to ./acceptance_reports for inspection.

#include "pestov/corpus.hpp"
#include "pestov/integration.hpp"
#include "pestov/models.hpp"
#include "pestov/suites.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace pestov;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

const std::filesystem::path kReportDir = "acceptance_reports";

void save(const Report& r, const std::string& name) {
  std::filesystem::create_directories(kReportDir);
  std::ofstream(kReportDir / (name + ".json")) << r.dump() << "\n";
}

std::string tag(const SuiteConfig& c) {
  std::string s = c.manifold + "_k" + std::to_string(c.k);
  for (char& ch : s)
    if (ch == ':') ch = '-';
  return s;
}

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      details.push_back("failed: " + what);
    }
  }
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

std::string describe(const CheckRecord& r) {
  std::string idx;
  for (int i : r.indices) idx += (idx.empty() ? "" : ",") + std::to_string(i);
  std::string s = r.identity_id + "[" + idx + "] on " + r.manifold + " k=" + std::to_string(r.k) +
                  " residual " + fmt(r.residual) + " verdict " + to_string(r.verdict);
  if (r.extras.contains("function")) s += " (" + r.extras["function"].get<std::string>() + ")";
  return s;
}

// 1 and 2 share the pointwise runs.
std::vector<Report> pointwise_reports;
double pointwise_seconds = 0.0;

Outcome criterion_pointwise() {
  Outcome out;
  const std::pair<const char*, int> grid[] = {{"torus:3", 1},  {"torus:3", 2},      {"torus:3", 3},
                                              {"sphere:2", 1}, {"sphere:2", 2},     {"sphere:3", 2},
                                              {"hyperbolic:2", 1}, {"hyperbolic:2", 2}};
  const auto start = Clock::now();
  int records = 0, floor = 0;
  for (auto [name, k] : grid) {
    SuiteConfig c;
    c.manifold = name;
    c.k = k;
    c.pairs = 20;
    c.fd_step = 1e-4;
    c.tolerance = 1e-3;
    c.threads = 1;
    const Report r = run_pointwise(c);
    save(r, "pointwise_" + tag(c));
    pointwise_reports.push_back(r);
    for (const auto& rec : r.records) {
      ++records;
      if (rec.verdict == Verdict::kNoiseFloor) ++floor;
      out.require(rec.residual <= 1e-3, describe(rec));
      out.require(rec.verdict == Verdict::kPass || rec.verdict == Verdict::kNoiseFloor,
                  describe(rec));
    }
  }
  pointwise_seconds = seconds_since(start);
  out.require(pointwise_seconds < 300.0, "runtime " + fmt(pointwise_seconds) + " s");
  out.details.push_back(std::to_string(records) + " records, " + std::to_string(floor) +
                        " at the noise floor, " + fmt(pointwise_seconds) + " s");
  return out;
}

Outcome criterion_flat() {
  Outcome out;
  int curvature_terms = 0, commutators = 0;
  double worst_curv = 0.0, worst_comm = 0.0;
  for (const Report& r : pointwise_reports) {
    for (const auto& rec : r.records) {
      if (rec.manifold.rfind("torus:", 0) != 0) continue;
      if (rec.extras.contains("curvature_term")) {
        const double c = std::abs(rec.extras["curvature_term"].get<double>());
        worst_curv = std::max(worst_curv, c);
        ++curvature_terms;
        out.require(c < 1e-10, "curvature term of " + describe(rec));
      }
      if (rec.identity_id == "TENSOR" || rec.identity_id == "SYM_FLOW") {
        ++commutators;
        worst_comm = std::max(worst_comm, rec.residual);
        out.require(rec.residual <= 1e-6, describe(rec));
        out.require(rec.verdict != Verdict::kFail, describe(rec));
      }
    }
  }
  out.require(curvature_terms > 0 && commutators > 0, "no flat-model records");
  out.details.push_back(std::to_string(curvature_terms) + " curvature terms, max |value| " +
                        fmt(worst_curv) + "; " + std::to_string(commutators) +
                        " commutator checks, max residual " + fmt(worst_comm));
  return out;
}

Outcome criterion_integrated() {
  Outcome out;
  const auto start = Clock::now();
  int checked = 0;
  double worst_z = 0.0;
  for (const char* name : {"torus:3", "sphere:2"}) {
    SuiteConfig c;
    c.manifold = name;
    c.k = 2;
    c.samples = 100000;
    const Report r = run_integrated(c);
    save(r, "integrated_" + tag(c));
    for (const auto& rec : r.records) {
      if (rec.identity_id == "INVARIANT_ID") continue;
      ++checked;
      if (rec.stderr_ > 0.0) worst_z = std::max(worst_z, std::abs(rec.residual) / rec.stderr_);
      out.require(rec.verdict == Verdict::kPass, describe(rec));
      out.require(rec.n_samples == 100000, describe(rec));
    }
  }
  const double t = seconds_since(start);
  out.require(t < 600.0, "runtime " + fmt(t) + " s");
  out.require(checked == 2 * (2 + 3 * (2 + 4 + 1)), "unexpected record count " + std::to_string(checked));
  out.details.push_back(std::to_string(checked) + " estimates at n=1e5, max |mean|/stderr " +
                        fmt(worst_z) + ", " + fmt(t) + " s");
  return out;
}

Outcome criterion_invariant() {
  Outcome out;
  IntegratedOptions options;
  options.mc.n_samples = 10000;
  const ModelPtr torus = make_manifold("torus:3");
  int flat = 0;
  for (const auto& phi : fiber_only_corpus(3, 1)) {
    for (int i = 0; i < 3; ++i) {
      const IntegratedResult r = invariant_identity(torus, phi, 3, i, options);
      ++flat;
      out.require(r.verdict == Verdict::kPass, phi.name + " flow " + std::to_string(i + 1));
      out.require(std::abs(r.lhs) < 1e-8 && std::abs(r.rhs) < 1e-8,
                  phi.name + " sides " + fmt(r.lhs) + ", " + fmt(r.rhs));
    }
  }
  int skipped = 0;
  for (auto [name, k] : {std::pair{"sphere:2", 2}, std::pair{"sphere:3", 3},
                         std::pair{"hyperbolic:2", 2}, std::pair{"product:sphere:2xtorus:1", 3}}) {
    const ModelPtr m = make_manifold(name);
    for (const auto& phi : function_corpus(m, 1)) {
      for (int i = 0; i < k; ++i) {
        const IntegratedResult r = invariant_identity(m, phi, k, i, options);
        ++skipped;
        out.require(r.verdict == Verdict::kSkip,
                    std::string(name) + " " + phi.name + " gave " + to_string(r.verdict));
      }
    }
  }
  out.details.push_back(std::to_string(flat) + " flat-torus passes, " + std::to_string(skipped) +
                        " curved-space probes skipped");
  return out;
}

Outcome criterion_grassmannian() {
  Outcome out;
  const std::pair<const char*, int> grid[] = {
      {"sphere:3", 2},   {"torus:3", 2},  {"hyperbolic:3", 2}, {"torus:4", 2},
      {"torus:4", 3},    {"ctorus:2", 2}, {"sphere:4", 2},     {"hyperbolic:4", 2},
      {"hyperbolic:4", 3}};
  int span = 0, wedge = 0, controls = 0, chains = 0;
  bool kaehler_seen = false;
  for (auto [name, k] : grid) {
    SuiteConfig c;
    c.manifold = name;
    c.k = k;
    c.samples = 10000;
    const Report r = run_grassmannian(c);
    save(r, "grassmannian_" + tag(c));
    for (const auto& rec : r.records) {
      if (rec.identity_id == "GRADV_SPAN") {
        ++span;
        out.require(rec.residual < 1e-6, "(a) " + describe(rec));
      } else if (rec.identity_id == "WEDGE" && !rec.expect_fail) {
        ++wedge;
        out.require(rec.residual < 1e-7, "(b) " + describe(rec));
      } else if (rec.identity_id == "WEDGE") {
        ++controls;
        out.require(rec.verdict == Verdict::kFail, "(b) control " + describe(rec));
      } else if (rec.identity_id == "FLOW_TRANSPORT") {
        ++chains;
        out.require(rec.verdict != Verdict::kFail, "(d) " + describe(rec));
      } else if (rec.identity_id == "TRANSPORT_INVARIANCE" &&
                 rec.extras["function"] == "kaehler") {
        kaehler_seen = true;
        const double a = rec.extras["intrinsic_drift"].get<double>();
        const double b = rec.extras["nonintrinsic_drift"].get<double>();
        out.require(rec.verdict == Verdict::kPass && a < 1e-6 && b < 1e-6 && rec.n_samples == 100,
                    "(c) " + describe(rec));
        out.details.push_back("(c) Kaehler on " + rec.manifold + ": drifts " + fmt(a) + ", " +
                              fmt(b) + " over " + std::to_string(rec.n_samples) + " loops");
      } else {
        out.require(rec.ok(), describe(rec));
      }
    }
  }
  out.require(kaehler_seen, "(c) no Kaehler instance");
  out.require(span > 0 && wedge > 0 && controls > 0 && chains > 0, "missing records");
  out.details.push_back(std::to_string(span) + " span, " + std::to_string(wedge) + " wedge, " +
                        std::to_string(controls) + " controls, " + std::to_string(chains) +
                        " transport chains");
  return out;
}

Outcome criterion_infrastructure() {
  Outcome out;
  // Haar second moment of one frame coordinate.
  {
    const ModelPtr m = make_manifold("sphere:3");
    Rng rng(2024);
    const Point p = m->sample_point(rng);
    const Mat inverse = orthonormal_chart_basis(*m, p).inverse();
    const int draws = 10000;
    double sum = 0.0, sum_sq = 0.0;
    for (int d = 0; d < draws; ++d) {
      const double x = std::pow((inverse * sample_fiber(*m, p, 3, rng).vectors.col(0))[1], 2);
      sum += x;
      sum_sq += x * x;
    }
    const double mean = sum / draws;
    const double se = std::sqrt((sum_sq / draws - mean * mean) / (draws - 1));
    out.require(std::abs(mean - 1.0 / 3.0) <= 3.0 * se, "Haar moment " + fmt(mean));
    out.details.push_back("Haar moment " + fmt(mean) + " vs 1/3 (" +
                          fmt(std::abs(mean - 1.0 / 3.0) / se) + " sigma)");
  }
  // Octant triangle holonomy.
  {
    const auto s = std::make_shared<RoundSphere>(2);
    auto chart = [&](const Point& p, const AmbientVec& a) {
      const AmbientMat j = s->tangent_map(p);
      return Vec((j.transpose() * j).ldlt().solve(j.transpose() * a));
    };
    AmbientVec e[3];
    for (int a = 0; a < 3; ++a) e[a] = AmbientVec::Unit(3, a);
    Point p = s->from_embedding(e[0]);
    Vec w = chart(p, e[1]);
    const AmbientVec w0 = s->tangent_map(p) * w;
    for (int leg = 0; leg < 3; ++leg) {
      const Tangent moved =
          parallel_transport(*s, {p, chart(p, e[(leg + 1) % 3])}, std::numbers::pi / 2, {p, w});
      p = moved.base;
      w = moved.components;
    }
    const AmbientVec w1 = s->tangent_map(p) * w;
    const double angle = std::acos(std::clamp(w0.dot(w1), -1.0, 1.0));
    out.require(std::abs(angle - std::numbers::pi / 2) < 1e-4, "holonomy " + fmt(angle));
    out.details.push_back("holonomy error " + fmt(std::abs(angle - std::numbers::pi / 2)));
  }
  // Transport and energy drift at ode_step 1e-3.
  {
    double transport = 0.0, energy = 0.0;
    for (const char* name : {"sphere:2", "sphere:3", "hyperbolic:2", "hyperbolic:3"}) {
      const ModelPtr m = make_manifold(name);
      Rng rng(5);
      for (int s = 0; s < 10; ++s) {
        const Frame f = sample_fiber(*m, m->sample_probe_point(rng), m->dim(), rng);
        const double t = 2.0;
        Carry carried = f.vectors;
        TransportSettings settings;
        settings.ode_step = 1e-3;
        const GeodesicState end =
            transport_along_geodesic(*m, f.base, f.vectors.col(0), t, carried, settings);
        const Mat g = end.carried.transpose() * m->metric(end.point) * end.carried;
        transport = std::max(transport, (g - Mat::Identity(m->dim(), m->dim())).cwiseAbs().maxCoeff() / t);
        energy = std::max(energy,
                          std::abs(m->inner(end.point, end.velocity, end.velocity) - 1.0) / t);
      }
    }
    out.require(transport < 1e-8, "transport drift " + fmt(transport));
    out.require(energy < 1e-8, "energy drift " + fmt(energy));
    out.details.push_back("transport drift " + fmt(transport) + "/time, energy drift " +
                          fmt(energy) + "/time");
  }
  return out;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

Outcome criterion_determinism() {
  Outcome out;
  auto hash_of = [](const std::string& suite, const SuiteConfig& c) {
    return fnv1a(run_suite(suite, c).dump());
  };
  SuiteConfig c;
  c.manifold = "sphere:2";
  c.k = 2;
  c.samples = 3000;
  c.seed = 42;
  c.pairs = 5;
  c.calibration_samples = 200;
  c.threads = 1;
  for (const char* suite : {"pointwise", "integrated", "grassmannian"}) {
    SuiteConfig cfg = c;
    if (std::string(suite) == "grassmannian") cfg.manifold = "ctorus:2";
    const std::uint64_t a = hash_of(suite, cfg);
    cfg.threads = 0;
    const std::uint64_t b = hash_of(suite, cfg);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(a));
    out.require(a == b, std::string(suite) + " hashes differ");
    out.details.push_back(std::string(suite) + " " + buf);
  }
  return out;
}

}  // namespace

int main() {
  struct Criterion {
    int number;
    const char* title;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "pointwise lemma suite", criterion_pointwise},
      {2, "flat-model exactness", criterion_flat},
      {3, "integrated suite", criterion_integrated},
      {4, "invariant-function identity", criterion_invariant},
      {5, "Grassmannian suite", criterion_grassmannian},
      {6, "infrastructure oracles", criterion_infrastructure},
      {7, "determinism", criterion_determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.details.push_back(std::string("exception: ") + e.what());
    }
    std::printf("criterion %d: %s: %s (%.1f s)\n", c.number, o.pass ? "PASS" : "FAIL", c.title,
                seconds_since(start));
    const std::size_t shown = std::min<std::size_t>(o.details.size(), 12);
    for (std::size_t d = 0; d < shown; ++d) std::printf("    %s\n", o.details[d].c_str());
    if (o.details.size() > shown) std::printf("    ... %zu more\n", o.details.size() - shown);
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
