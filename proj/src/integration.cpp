#include "pestov/integration.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace pestov {

int worker_count(int requested) {
  int n = requested > 0 ? requested
                        : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("PESTOV_LAB_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return std::max(1, n);
}

void parallel_for(long count, int threads, const std::function<void(long)>& body) {
  const int workers = static_cast<int>(std::min<long>(std::max(1, threads), count));
  if (workers <= 1) {
    for (long i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<long> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&]() {
    for (;;) {
      const long i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

std::vector<Frame> sample_stream(const ManifoldModel& m, int k, long n_samples,
                                 std::uint64_t seed, long block_size) {
  if (!m.is_compact()) throw NonCompactError(m.name() + " is not compact");
  std::vector<Frame> frames(static_cast<std::size_t>(n_samples));
  const long blocks = (n_samples + block_size - 1) / block_size;
  for (long b = 0; b < blocks; ++b) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    Rng rng(seq);
    const long end = std::min(n_samples, (b + 1) * block_size);
    for (long s = b * block_size; s < end; ++s) frames[s] = sample_frame(m, k, rng);
  }
  return frames;
}

namespace {

double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

}  // namespace

MCEstimate summarize(const std::vector<double>& values, std::uint64_t seed) {
  MCEstimate out;
  out.seed = seed;
  out.n_samples = static_cast<long>(values.size());
  if (values.empty()) return out;
  const double n = static_cast<double>(values.size());
  out.mean = pairwise_sum(values.data(), values.size()) / n;
  if (values.size() > 1) {
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double d = values[i] - out.mean;
      sq[i] = d * d;
    }
    const double var = pairwise_sum(sq.data(), sq.size()) / (n - 1.0);
    out.stderr_ = std::sqrt(var / n);
  }
  return out;
}

std::vector<std::vector<double>> evaluate_stream(
    const std::vector<Frame>& frames, int outputs,
    const std::function<void(const Frame&, double*)>& integrand, const MCOptions& mc) {
  std::vector<std::vector<double>> values(outputs, std::vector<double>(frames.size()));
  const long n = static_cast<long>(frames.size());
  const long blocks = (n + mc.block_size - 1) / mc.block_size;
  parallel_for(blocks, worker_count(mc.threads), [&](long b) {
    std::vector<double> buffer(outputs);
    const long end = std::min(n, (b + 1) * mc.block_size);
    for (long s = b * mc.block_size; s < end; ++s) {
      integrand(frames[s], buffer.data());
      for (int o = 0; o < outputs; ++o) values[o][s] = buffer[o];
    }
  });
  return values;
}

std::vector<MCEstimate> mc_integrals(
    const ManifoldModel& m, int k, int outputs,
    const std::function<void(const Frame&, double*)>& integrand, const MCOptions& mc) {
  const auto frames = sample_stream(m, k, mc.n_samples, mc.seed, mc.block_size);
  const auto values = evaluate_stream(frames, outputs, integrand, mc);
  std::vector<MCEstimate> out;
  for (const auto& v : values) out.push_back(summarize(v, mc.seed));
  return out;
}

MCEstimate mc_integral(const ManifoldModel& m, const std::function<double(const Frame&)>& f,
                       int k, const MCOptions& mc) {
  return mc_integrals(m, k, 1, [&f](const Frame& fr, double* out) { *out = f(fr); }, mc).front();
}

namespace {

std::string short_number(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

/// Lazily computed quantities shared by the integrands at one frame.
class FrameQuantities {
 public:
  FrameQuantities(ModelPtr m, const ScalarBundleFunction& phi, const Frame& f,
                  const NumericalOptions& opt)
      : m_(std::move(m)), phi_(phi), f_(f), opt_(opt) {}

  const Vec& grad_h() {
    if (!gh_) gh_ = pestov::grad_h(*m_, phi_, f_, opt_);
    return *gh_;
  }
  const Mat& grad_v() {
    if (!gv_) gv_ = grad_v_all(*m_, phi_, f_, opt_);
    return *gv_;
  }
  const Mat& grad_v_proj() {
    if (!gvp_) gvp_ = project_so(*m_, f_, grad_v());
    return *gvp_;
  }
  double gen(int i) {
    if (gen_.empty()) {
      for (int a = 0; a < f_.size(); ++a) gen_.push_back(generator(*m_, phi_, f_, a, opt_));
    }
    return gen_[i];
  }
  const ScalarBundleFunction& gen_function(int i) {
    if (gen_fn_.empty()) {
      for (int a = 0; a < f_.size(); ++a) gen_fn_.push_back(generator_function(m_, phi_, a, opt_));
    }
    return gen_fn_[i];
  }
  double inner(const Vec& a, const Vec& b) const { return m_->inner(f_.base, a, b); }
  double curvature(const Vec& x, const Vec& y, const Vec& z, const Vec& w) const {
    return inner(riemann(*m_, f_.base, x, y, z, opt_), w);
  }

 private:
  ModelPtr m_;
  const ScalarBundleFunction& phi_;
  const Frame& f_;
  const NumericalOptions& opt_;
  std::optional<Vec> gh_;
  std::optional<Mat> gv_;
  std::optional<Mat> gvp_;
  std::vector<double> gen_;
  std::vector<ScalarBundleFunction> gen_fn_;
};

void require_pair(const IntegratedSpec& s, const Frame& f) {
  if (s.i < 0 || s.i >= f.size() || s.j < 0 || s.j >= f.size()) {
    throw DomainError(to_string(s.id) + ": index out of range");
  }
}

double int_pestov(FrameQuantities& q, ModelPtr m, const Frame& f, int i, int j,
                  const NumericalOptions& opt) {
  const Vec& g = q.grad_h();
  const Mat& gv = q.grad_v();
  double curv = 0.0;
  for (int l = 0; l < f.size(); ++l) curv += q.curvature(gv.col(l), f.vectors.col(l), f.vectors.col(i), gv.col(j));
  const ScalarBundleFunction& gi = q.gen_function(i);
  const double vertical = derivative_v(*m, gi, f, j, g, opt);
  const double horizontal = derivative_h(*m, gi, f, gv.col(j), opt);
  const double norm_sq = i == j ? q.inner(g, g) : 0.0;
  return norm_sq - curv - vertical - horizontal;
}

double bundle_pestov(FrameQuantities& q, ModelPtr m, const Frame& f, const NumericalOptions& opt) {
  const int k = f.size();
  const Vec& g = q.grad_h();
  const Mat& w = q.grad_v_proj();
  double gen_sq = 0.0;
  for (int i = 0; i < k; ++i) gen_sq += q.gen(i) * q.gen(i);
  double curv = 0.0;
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) curv += q.curvature(w.col(j), f.vectors.col(j), f.vectors.col(i), w.col(i));
  double rhs = 0.0;
  for (int i = 0; i < k; ++i) {
    const ScalarBundleFunction& gi = q.gen_function(i);
    // <g, P_i> with P_i the so(k)-projection of the vertical gradients of G^i phi.
    double projected = derivative_v(*m, gi, f, i, g, opt);
    for (int j = 0; j < k; ++j) {
      const double sym = derivative_v(*m, gi, f, i, f.vectors.col(j), opt) +
                         derivative_v(*m, gi, f, j, f.vectors.col(i), opt);
      projected -= 0.5 * sym * q.inner(f.vectors.col(j), g);
    }
    rhs += projected + derivative_h(*m, gi, f, w.col(i), opt);
  }
  return k * q.inner(g, g) - 0.5 * (k + 1) * gen_sq - curv - rhs;
}

}  // namespace

std::vector<double> residual_integrands(const std::vector<IntegratedSpec>& specs, ModelPtr m,
                                        const IntegrandInputs& inputs, const Frame& f,
                                        const NumericalOptions& opt) {
  FrameQuantities q(m, inputs.phi, f, opt);
  std::vector<double> out;
  out.reserve(specs.size());
  for (const IntegratedSpec& s : specs) {
    switch (s.id) {
      case IdentityId::kDivHVanishes:
        if (!inputs.field) throw DomainError("DIVH_VANISHES needs a semi-basic field");
        out.push_back(div_h(*m, *inputs.field, f, opt));
        break;
      case IdentityId::kFlowByParts: {
        if (!inputs.partner) throw DomainError("FLOW_BY_PARTS needs a partner function");
        if (s.i < 0 || s.i >= f.size()) throw DomainError("FLOW_BY_PARTS: index out of range");
        const ScalarBundleFunction& psi = *inputs.partner;
        out.push_back(psi(f) * q.gen(s.i) + inputs.phi(f) * generator(*m, psi, f, s.i, opt));
        break;
      }
      case IdentityId::kIntPestov:
        require_pair(s, f);
        out.push_back(int_pestov(q, m, f, s.i, s.j, opt));
        break;
      case IdentityId::kBundlePestov:
        out.push_back(bundle_pestov(q, m, f, opt));
        break;
      default:
        throw DomainError(to_string(s.id) + " has no integrand");
    }
  }
  return out;
}

std::array<double, 2> invariant_identity_sides(ModelPtr m, const ScalarBundleFunction& phi,
                                               const Frame& f, int i,
                                               const NumericalOptions& opt) {
  const int n = f.size();
  if (n != m->dim()) throw DomainError("INVARIANT_ID needs full frames (k = n)");
  if (i < 0 || i >= n) throw DomainError("INVARIANT_ID: index out of range");
  double lhs = 0.0;
  for (int j = 0; j < n; ++j) {
    if (j == i) continue;
    const double g = generator(*m, phi, f, j, opt);
    lhs += 0.5 * g * g;
  }
  const Mat w = grad_v_proj_all(*m, phi, f, opt);
  double rhs = 0.0;
  for (int j = 0; j < n; ++j) {
    rhs += m->inner(f.base, riemann(*m, f.base, w.col(j), f.vectors.col(j), f.vectors.col(i), opt),
                    w.col(i));
  }
  return {lhs, rhs};
}

NumericalOptions doubled_steps(const NumericalOptions& opt) {
  NumericalOptions out = opt;
  out.fd_step = 2.0 * opt.fd_step;
  if (opt.inner_fd_step > 0.0) out.inner_fd_step = 2.0 * opt.inner_fd_step;
  return out;
}

double bias_allowance(const std::vector<double>& at_h, const std::vector<double>& at_2h) {
  std::vector<double> d(at_h.size());
  for (std::size_t s = 0; s < d.size(); ++s) d[s] = (at_2h[s] - at_h[s]) / 3.0;
  const MCEstimate e = summarize(d, 0);
  return std::abs(e.mean) + 3.0 * e.stderr_;
}

Verdict statistical_verdict(const MCEstimate& e, double allowance) {
  return std::abs(e.mean) <= 3.0 * e.stderr_ + allowance ? Verdict::kPass : Verdict::kFail;
}

std::vector<IntegratedResult> integrated_residuals(const std::vector<IntegratedSpec>& specs,
                                                   ModelPtr m, const IntegrandInputs& inputs,
                                                   int k, const IntegratedOptions& options,
                                                   const NumericalOptions& opt) {
  const MCOptions& mc = options.mc;
  const auto frames = sample_stream(*m, k, mc.n_samples, mc.seed, mc.block_size);
  const int outputs = static_cast<int>(specs.size());
  auto integrand = [&](const NumericalOptions& o) {
    return [&, o](const Frame& f, double* out) {
      const auto r = residual_integrands(specs, m, inputs, f, o);
      std::copy(r.begin(), r.end(), out);
    };
  };
  const auto values = evaluate_stream(frames, outputs, integrand(opt), mc);

  const long n_cal = std::min<long>(options.calibration_samples, mc.n_samples);
  const std::vector<Frame> cal_frames(frames.begin(), frames.begin() + n_cal);
  const auto cal_values = evaluate_stream(cal_frames, outputs, integrand(doubled_steps(opt)), mc);

  std::vector<IntegratedResult> out;
  for (int o = 0; o < outputs; ++o) {
    IntegratedResult r;
    r.spec = specs[o];
    r.estimate = summarize(values[o], mc.seed);
    const std::vector<double> head(values[o].begin(), values[o].begin() + n_cal);
    r.bias_allowance = bias_allowance(head, cal_values[o]);
    r.verdict = statistical_verdict(r.estimate, r.bias_allowance);
    out.push_back(r);
  }
  return out;
}

MCEstimate integrated_residual(IdentityId id, ModelPtr m, const IntegrandInputs& inputs, int k,
                               int i, int j, const MCOptions& mc, const NumericalOptions& opt) {
  const std::vector<IntegratedSpec> specs{{id, i, j}};
  return mc_integrals(*m, k, 1,
                      [&](const Frame& f, double* out) {
                        *out = residual_integrands(specs, m, inputs, f, opt).front();
                      },
                      mc)
      .front();
}

IntegratedResult invariant_identity(ModelPtr m, const ScalarBundleFunction& phi, int k, int i,
                                    const IntegratedOptions& options,
                                    const NumericalOptions& opt) {
  IntegratedResult r;
  r.spec = {IdentityId::kInvariantId, i, -1};
  r.estimate.seed = options.mc.seed;
  r.verdict = Verdict::kSkip;
  const int n = m->dim();
  if (k != n) {
    r.note = "requires full frames (k = n = " + std::to_string(n) + ")";
    return r;
  }
  if (!m->is_compact()) {
    r.note = "requires a compact manifold";
    return r;
  }
  const auto probes = sample_stream(*m, k, options.invariance_probes, options.mc.seed ^ 0x9e3779b97f4a7c15ULL,
                                    options.mc.block_size);
  double worst = 0.0;
  for (const Frame& f : probes) worst = std::max(worst, std::abs(generator(*m, phi, f, i, opt)));
  if (!(worst < options.invariance_tolerance)) {
    r.note = "not invariant under frame flow " + std::to_string(i + 1) + " (max |G phi| = " +
             short_number(worst) + " over " + std::to_string(options.invariance_probes) +
             " probes)";
    return r;
  }

  const auto frames = sample_stream(*m, k, options.mc.n_samples, options.mc.seed,
                                    options.mc.block_size);
  auto integrand = [&](const NumericalOptions& o) {
    return [&, o](const Frame& f, double* out) {
      const auto sides = invariant_identity_sides(m, phi, f, i, o);
      out[0] = sides[0];
      out[1] = sides[1];
      out[2] = sides[0] - sides[1];
    };
  };
  const auto values = evaluate_stream(frames, 3, integrand(opt), options.mc);
  const long n_cal = std::min<long>(options.calibration_samples, options.mc.n_samples);
  const std::vector<Frame> cal_frames(frames.begin(), frames.begin() + n_cal);
  const auto cal = evaluate_stream(cal_frames, 3, integrand(doubled_steps(opt)), options.mc);

  r.estimate = summarize(values[2], options.mc.seed);
  r.lhs = summarize(values[0], options.mc.seed).mean;
  r.rhs = summarize(values[1], options.mc.seed).mean;
  const std::vector<double> head(values[2].begin(), values[2].begin() + n_cal);
  r.bias_allowance = bias_allowance(head, cal[2]);
  r.verdict = statistical_verdict(r.estimate, r.bias_allowance);
  if (m->is_flat()) {
    double side_max = 0.0;
    for (int o = 0; o < 2; ++o)
      for (double v : values[o]) side_max = std::max(side_max, std::abs(v));
    if (!(side_max < options.exact_tolerance)) r.verdict = Verdict::kFail;
    r.note = "flat model: max |side| = " + short_number(side_max);
  }
  return r;
}

}  // namespace pestov
