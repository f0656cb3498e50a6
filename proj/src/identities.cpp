#include "pestov/identities.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <utility>

namespace pestov {

namespace {

constexpr std::array<std::pair<IdentityId, const char*>, 16> kNames{{
    {IdentityId::kSymGrad, "SYM_GRAD"},
    {IdentityId::kSymDiv, "SYM_DIV"},
    {IdentityId::kTensor, "TENSOR"},
    {IdentityId::kSymFlow, "SYM_FLOW"},
    {IdentityId::kGGradV, "G_GRADV"},
    {IdentityId::kPestov, "PESTOV"},
    {IdentityId::kWedge, "WEDGE"},
    {IdentityId::kGradVSpan, "GRADV_SPAN"},
    {IdentityId::kDivHVanishes, "DIVH_VANISHES"},
    {IdentityId::kFlowByParts, "FLOW_BY_PARTS"},
    {IdentityId::kIntPestov, "INT_PESTOV"},
    {IdentityId::kBundlePestov, "BUNDLE_PESTOV"},
    {IdentityId::kInvariantId, "INVARIANT_ID"},
    {IdentityId::kTransportInvariance, "TRANSPORT_INVARIANCE"},
    {IdentityId::kConsequence, "CONSEQUENCE"},
    {IdentityId::kFlowTransport, "FLOW_TRANSPORT"},
}};

double max_abs(std::initializer_list<double> terms) {
  double s = 0.0;
  for (double t : terms) s = std::max(s, std::abs(t));
  return s;
}

void check_index(int i, const Frame& f) {
  if (i < 0 || i >= f.size()) throw DomainError("identity index out of range");
}

Vec direction_or_default(const Vec& v, const ManifoldModel& m, const Frame& f, int fallback) {
  if (v.size() == m.dim()) return v;
  if (v.size() != 0) throw DomainError("direction has the wrong dimension");
  return f.vectors.col(fallback);
}

/// sum_l <R(grad^{v,l} phi, v_l) a, b>
double curvature_sum(const ManifoldModel& m, const Frame& f, const Mat& gradv, const Vec& a,
                     const Vec& b, const NumericalOptions& opt) {
  double s = 0.0;
  for (int l = 0; l < f.size(); ++l) {
    s += m.inner(f.base, riemann(m, f.base, gradv.col(l), f.vectors.col(l), a, opt), b);
  }
  return s;
}

Residual sym_grad(ModelPtr m, const ScalarBundleFunction& phi, const Frame& f,
                  const IdentityArgs& args, const NumericalOptions& opt) {
  check_index(args.i, f);
  const Vec u = direction_or_default(args.u, *m, f, 0);
  const Vec w = direction_or_default(args.w, *m, f, f.size() - 1);
  const double lhs = cov_v_dot(*m, grad_h_field(m, phi, opt), f, args.i, w, u, opt);
  const double rhs = cov_h_dot(*m, grad_v_field(m, phi, args.i, opt), f, u, w, opt);
  return {lhs - rhs, max_abs({lhs, rhs}), opt.fd_step, 0.0};
}

Residual sym_div(ModelPtr m, const ScalarBundleFunction& phi, const Frame& f,
                 const IdentityArgs& args, const NumericalOptions& opt) {
  check_index(args.i, f);
  const double lhs = div_v(*m, grad_h_field(m, phi, opt), f, args.i, opt);
  const double rhs = div_h(*m, grad_v_field(m, phi, args.i, opt), f, opt);
  return {lhs - rhs, max_abs({lhs, rhs}), opt.fd_step, 0.0};
}

Residual tensor(ModelPtr m, const ScalarBundleFunction& phi, const Frame& f,
                const IdentityArgs& args, const NumericalOptions& opt) {
  const Vec u = direction_or_default(args.u, *m, f, 0);
  const Vec w = direction_or_default(args.w, *m, f, f.size() - 1);
  const SemiBasicField gh = grad_h_field(m, phi, opt);
  const double a = cov_h_dot(*m, gh, f, w, u, opt);
  const double b = cov_h_dot(*m, gh, f, u, w, opt);
  const double curv = curvature_sum(*m, f, grad_v_all(*m, phi, f, opt), w, u, opt);
  return {a - b - curv, max_abs({a, b, curv}), opt.fd_step, curv};
}

Residual sym_flow(ModelPtr m, const ScalarBundleFunction& phi, const Frame& f,
                  const IdentityArgs& args, const NumericalOptions& opt) {
  check_index(args.i, f);
  check_index(args.j, f);
  const double gij = generator(*m, generator_function(m, phi, args.j, opt), f, args.i, opt);
  const double gji = generator(*m, generator_function(m, phi, args.i, opt), f, args.j, opt);
  const double curv = curvature_sum(*m, f, grad_v_all(*m, phi, f, opt), f.vectors.col(args.i),
                                    f.vectors.col(args.j), opt);
  return {gij - gji - curv, max_abs({gij, gji, curv}), opt.fd_step, curv};
}

Residual g_gradv(ModelPtr m, const ScalarBundleFunction& phi, const Frame& f,
                 const IdentityArgs& args, const NumericalOptions& opt) {
  check_index(args.i, f);
  check_index(args.j, f);
  check_index(args.l, f);
  const int i = args.i;
  const int l = args.l;
  const NumericalOptions inner = inner_options(opt);
  const double lhs =
      derivative_v(*m, generator_function(m, phi, args.j, opt), f, i, f.vectors.col(l), opt);
  ScalarBundleFunction slot_derivative;
  slot_derivative.name = "<grad_v phi, v_l>";
  slot_derivative.evaluate = [m, phi, i, l, inner](const Frame& g) {
    return derivative_v(*m, phi, g, i, g.vectors.col(l), inner);
  };
  const double flowed = generator(*m, slot_derivative, f, args.j, opt);
  const double delta = i == args.j ? generator(*m, phi, f, l, opt) : 0.0;
  return {lhs - flowed - delta, max_abs({lhs, flowed, delta}), opt.fd_step, 0.0};
}

Residual pestov(ModelPtr m, const ScalarBundleFunction& phi, const Frame& f,
                const IdentityArgs& args, const NumericalOptions& opt) {
  check_index(args.i, f);
  check_index(args.j, f);
  const int i = args.i;
  const int j = args.j;
  const NumericalOptions inner = inner_options(opt);

  SemiBasicField z_field;
  z_field.name = "Z";
  z_field.pairing = [m, phi, i, inner](const Frame& g, const Vec& z) {
    return generator(*m, phi, g, i, inner) * derivative_h(*m, phi, g, z, inner);
  };
  SemiBasicField y_field;
  y_field.name = "Y";
  y_field.pairing = [m, phi, i, j, inner](const Frame& g, const Vec& z) {
    const Vec gv = grad_v(*m, phi, g, j, inner);
    const double coupling = derivative_h(*m, phi, g, gv, inner);
    return coupling * m->inner(g.base, g.vectors.col(i), z) -
           generator(*m, phi, g, i, inner) * derivative_v(*m, phi, g, j, z, inner);
  };

  const double div_z = div_v(*m, z_field, f, j, opt);
  const double div_y = div_h(*m, y_field, f, opt);
  const Vec gh = grad_h(*m, phi, f, opt);
  const double norm_sq = i == j ? m->inner(f.base, gh, gh) : 0.0;
  const Mat gv = grad_v_all(*m, phi, f, opt);
  const double curv = curvature_sum(*m, f, gv, f.vectors.col(i), gv.col(j), opt);
  const double mixed =
      2.0 * derivative_v(*m, generator_function(m, phi, i, opt), f, j, gh, opt);
  return {div_z + div_y + norm_sq - curv - mixed, max_abs({div_z, div_y, norm_sq, curv, mixed}),
          opt.fd_step, curv};
}

Residual span_residual(ModelPtr m, const ScalarBundleFunction& phi, const Frame& f,
                       const IdentityArgs& args, const NumericalOptions& opt) {
  const Mat c = projected_pairing(*m, phi, f, opt);
  const int n = f.size();
  const int k = args.plane_dim;
  double worst = 0.0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const bool both_in = a < k && b < k;
      const bool both_out = a >= k && b >= k;
      if (both_in || both_out) worst = std::max(worst, std::abs(c(a, b)));
    }
  }
  return {worst, c.cwiseAbs().maxCoeff(), opt.fd_step, 0.0};
}

Residual wedge_residual(ModelPtr m, const ScalarBundleFunction& phi, const Frame& f,
                        const IdentityArgs& args, const NumericalOptions& opt) {
  const WedgeSides sides = wedge_sides(projected_pairing(*m, phi, f, opt), args.plane_dim);
  const double value = (sides.full - sides.truncated).cwiseAbs().maxCoeff();
  const double scale = std::max(sides.full.cwiseAbs().maxCoeff(),
                                sides.truncated.cwiseAbs().maxCoeff());
  return {value, scale, opt.fd_step, 0.0};
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kPass: return "PASS";
    case Verdict::kFail: return "FAIL";
    case Verdict::kSkip: return "SKIP";
    case Verdict::kNoiseFloor: return "NOISE_FLOOR";
  }
  return "FAIL";
}

std::string to_string(IdentityId id) {
  for (const auto& [key, name] : kNames) {
    if (key == id) return name;
  }
  return "UNKNOWN";
}

std::optional<IdentityId> identity_from_string(const std::string& name) {
  for (const auto& [key, label] : kNames) {
    if (name == label) return key;
  }
  return std::nullopt;
}

bool is_pointwise(IdentityId id) {
  return static_cast<int>(id) <= static_cast<int>(IdentityId::kGradVSpan);
}

double Residual::relative() const { return std::abs(value) / std::max(scale, 1.0); }

Mat projected_pairing(const ManifoldModel& m, const ScalarBundleFunction& phi, const Frame& f,
                      const NumericalOptions& opt) {
  if (f.size() != m.dim()) throw DomainError("expected a full orthonormal n-frame");
  const Mat w = grad_v_proj_all(m, phi, f, opt);
  return w.transpose() * m.metric(f.base) * f.vectors;
}

WedgeSides wedge_sides(const Mat& pairing, int plane_dim) {
  const int n = static_cast<int>(pairing.rows());
  if (plane_dim < 1 || plane_dim > n) throw DomainError("plane dimension out of range");
  WedgeSides out{Eigen::VectorXd::Zero(n * (n - 1) / 2), Eigen::VectorXd::Zero(n * (n - 1) / 2)};
  // w_j ^ v_j = sum_a <w_j, v_a> v_a ^ v_j
  for (int j = 0; j < n; ++j) {
    for (int a = 0; a < n; ++a) {
      if (a == j) continue;
      const double c = pairing(j, a);
      const int idx = a < j ? wedge_index(n, a, j) : wedge_index(n, j, a);
      const double sign = a < j ? 1.0 : -1.0;
      out.full[idx] += sign * c;
      if (j < plane_dim) out.truncated[idx] += 2.0 * sign * c;
    }
  }
  return out;
}

Residual pointwise_residual(IdentityId id, ModelPtr m, const ScalarBundleFunction& phi,
                            const Frame& f, const IdentityArgs& args,
                            const NumericalOptions& opt) {
  switch (id) {
    case IdentityId::kSymGrad: return sym_grad(m, phi, f, args, opt);
    case IdentityId::kSymDiv: return sym_div(m, phi, f, args, opt);
    case IdentityId::kTensor: return tensor(m, phi, f, args, opt);
    case IdentityId::kSymFlow: return sym_flow(m, phi, f, args, opt);
    case IdentityId::kGGradV: return g_gradv(m, phi, f, args, opt);
    case IdentityId::kPestov: return pestov(m, phi, f, args, opt);
    case IdentityId::kGradVSpan: return span_residual(m, phi, f, args, opt);
    case IdentityId::kWedge: return wedge_residual(m, phi, f, args, opt);
    default: throw DomainError(to_string(id) + " is not a pointwise identity");
  }
}

double noise_floor_level(double h) {
  return 50.0 * std::numeric_limits<double>::epsilon() / (h * h);
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

ConvergenceResult convergence_order(IdentityId id, ModelPtr m, const ScalarBundleFunction& phi,
                                    const Frame& f, const IdentityArgs& args,
                                    const std::vector<double>& steps,
                                    const NumericalOptions& opt) {
  if (steps.size() < 3) throw DomainError("convergence_order needs at least three steps");
  for (std::size_t s = 1; s < steps.size(); ++s) {
    if (!(steps[s] < steps[s - 1])) throw DomainError("convergence steps must decrease");
  }
  ConvergenceResult out;
  out.steps = steps;
  const double ratio = opt.inner_step() / opt.fd_step;
  // Only truncation-dominated steps enter the fit; rounding-dominated ones
  // would bias the slope.
  std::vector<double> xs, ys;
  for (double h : steps) {
    NumericalOptions local = opt;
    local.fd_step = h;
    local.inner_fd_step = ratio == 1.0 ? 0.0 : ratio * h;
    const double rel = pointwise_residual(id, m, phi, f, args, local).relative();
    out.relative_residuals.push_back(rel);
    if (rel > noise_floor_level(h)) {
      xs.push_back(h);
      ys.push_back(rel);
    }
  }
  out.noise_floor = xs.size() < 2;
  if (!out.noise_floor) out.order = log_log_slope(xs, ys);
  return out;
}

}  // namespace pestov
