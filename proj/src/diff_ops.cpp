#include "pestov/diff_ops.hpp"

namespace pestov {

namespace {

Frame perturbed(const Frame& f, int i, const Vec& dz) {
  if (i < 0 || i >= f.size()) throw DomainError("slot index out of range");
  Frame out{f.base, f.vectors, false};
  out.vectors.col(i) += dz;
  return out;
}

}  // namespace

NumericalOptions inner_options(const NumericalOptions& opt) {
  NumericalOptions inner = opt;
  inner.fd_step = opt.inner_step();
  inner.inner_fd_step = 0.0;
  return inner;
}

double derivative_h(const ManifoldModel& m, const ScalarBundleFunction& phi, const Frame& f,
                    const Vec& u, const NumericalOptions& opt) {
  const double h = opt.fd_step;
  return (phi(horizontal_lift(m, f, u, h, opt)) - phi(horizontal_lift(m, f, u, -h, opt))) /
         (2.0 * h);
}

double derivative_v(const ManifoldModel&, const ScalarBundleFunction& phi, const Frame& f,
                    int i, const Vec& z, const NumericalOptions& opt) {
  const double h = opt.fd_step;
  return (phi(perturbed(f, i, h * z)) - phi(perturbed(f, i, -h * z))) / (2.0 * h);
}

Vec grad_h(const ManifoldModel& m, const ScalarBundleFunction& phi, const Frame& f,
           const NumericalOptions& opt) {
  const Mat e = orthonormal_chart_basis(m, f.base);
  Vec out = Vec::Zero(m.dim());
  for (int a = 0; a < m.dim(); ++a) out += derivative_h(m, phi, f, e.col(a), opt) * e.col(a);
  return out;
}

Vec grad_v(const ManifoldModel& m, const ScalarBundleFunction& phi, const Frame& f, int i,
           const NumericalOptions& opt) {
  const Mat e = orthonormal_chart_basis(m, f.base);
  Vec out = Vec::Zero(m.dim());
  for (int a = 0; a < m.dim(); ++a) out += derivative_v(m, phi, f, i, e.col(a), opt) * e.col(a);
  return out;
}

Mat grad_v_all(const ManifoldModel& m, const ScalarBundleFunction& phi, const Frame& f,
               const NumericalOptions& opt) {
  Mat out(m.dim(), f.size());
  for (int i = 0; i < f.size(); ++i) out.col(i) = grad_v(m, phi, f, i, opt);
  return out;
}

Mat project_so(const ManifoldModel& m, const Frame& f, const Mat& gradients) {
  require_orthonormal(m, f);
  const int k = f.size();
  // pairing(i, j) = <grad_i, v_j>
  const Mat pairing = gradients.transpose() * m.metric(f.base) * f.vectors;
  const Mat sym = 0.5 * (pairing + pairing.transpose());
  Mat out = gradients;
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) out.col(i) -= sym(i, j) * f.vectors.col(j);
  }
  return out;
}

Vec grad_v_proj(const ManifoldModel& m, const ScalarBundleFunction& phi, const Frame& f, int i,
                const NumericalOptions& opt) {
  if (i < 0 || i >= f.size()) throw DomainError("slot index out of range");
  return grad_v_proj_all(m, phi, f, opt).col(i);
}

Mat grad_v_proj_all(const ManifoldModel& m, const ScalarBundleFunction& phi, const Frame& f,
                    const NumericalOptions& opt) {
  require_orthonormal(m, f);
  return project_so(m, f, grad_v_all(m, phi, f, opt));
}

Vec cov_h(const ManifoldModel& m, const SemiBasicField& x, const Frame& f, const Vec& u,
          const NumericalOptions& opt) {
  const int n = m.dim();
  const double h = opt.fd_step;
  const Mat e = orthonormal_chart_basis(m, f.base);
  const Carry basis = e;
  const LiftedFrame plus = horizontal_lift(m, f, u, h, basis, opt);
  const LiftedFrame minus = horizontal_lift(m, f, u, -h, basis, opt);
  Vec out = Vec::Zero(n);
  for (int a = 0; a < n; ++a) {
    const double d = (pair(m, x, plus.frame, plus.extra.col(a)) -
                      pair(m, x, minus.frame, minus.extra.col(a))) /
                     (2.0 * h);
    out += d * e.col(a);
  }
  return out;
}

double cov_h_dot(const ManifoldModel& m, const SemiBasicField& x, const Frame& f, const Vec& u,
                 const Vec& w, const NumericalOptions& opt) {
  const double h = opt.fd_step;
  Carry carried(m.dim(), 1);
  carried.col(0) = w;
  const LiftedFrame plus = horizontal_lift(m, f, u, h, carried, opt);
  const LiftedFrame minus = horizontal_lift(m, f, u, -h, carried, opt);
  return (pair(m, x, plus.frame, plus.extra.col(0)) - pair(m, x, minus.frame, minus.extra.col(0))) /
         (2.0 * h);
}

Vec cov_v(const ManifoldModel& m, const SemiBasicField& x, const Frame& f, int i, const Vec& z,
          const NumericalOptions& opt) {
  const double h = opt.fd_step;
  const Frame plus = perturbed(f, i, h * z);
  const Frame minus = perturbed(f, i, -h * z);
  if (!x.pairing) return (x.evaluate(plus) - x.evaluate(minus)) / (2.0 * h);
  const Mat e = orthonormal_chart_basis(m, f.base);
  Vec out = Vec::Zero(m.dim());
  for (int a = 0; a < m.dim(); ++a) {
    out += (x.pairing(plus, e.col(a)) - x.pairing(minus, e.col(a))) / (2.0 * h) * e.col(a);
  }
  return out;
}

double cov_v_dot(const ManifoldModel& m, const SemiBasicField& x, const Frame& f, int i,
                 const Vec& z, const Vec& w, const NumericalOptions& opt) {
  const double h = opt.fd_step;
  return (pair(m, x, perturbed(f, i, h * z), w) - pair(m, x, perturbed(f, i, -h * z), w)) /
         (2.0 * h);
}

double div_h(const ManifoldModel& m, const SemiBasicField& x, const Frame& f,
             const NumericalOptions& opt) {
  return div_h(m, x, f, orthonormal_chart_basis(m, f.base), opt);
}

double div_h(const ManifoldModel& m, const SemiBasicField& x, const Frame& f, const Mat& basis,
             const NumericalOptions& opt) {
  double s = 0.0;
  for (int a = 0; a < basis.cols(); ++a) s += cov_h_dot(m, x, f, basis.col(a), basis.col(a), opt);
  return s;
}

double div_v(const ManifoldModel& m, const SemiBasicField& x, const Frame& f, int i,
             const NumericalOptions& opt) {
  return div_v(m, x, f, i, orthonormal_chart_basis(m, f.base), opt);
}

double div_v(const ManifoldModel& m, const SemiBasicField& x, const Frame& f, int i,
             const Mat& basis, const NumericalOptions& opt) {
  double s = 0.0;
  for (int a = 0; a < basis.cols(); ++a) {
    s += cov_v_dot(m, x, f, i, basis.col(a), basis.col(a), opt);
  }
  return s;
}

SemiBasicField frame_vector_field(int i) {
  SemiBasicField out;
  out.name = "v" + std::to_string(i + 1);
  out.evaluate = [i](const Frame& f) -> Vec {
    if (i >= f.size()) throw DomainError("frame_vector_field: slot out of range");
    return f.vectors.col(i);
  };
  return out;
}

SemiBasicField grad_h_field(ModelPtr m, ScalarBundleFunction phi, NumericalOptions opt) {
  SemiBasicField out;
  out.name = "grad_h " + phi.name;
  const NumericalOptions inner = inner_options(opt);
  out.evaluate = [m, phi, inner](const Frame& f) { return grad_h(*m, phi, f, inner); };
  out.pairing = [m, phi, inner](const Frame& f, const Vec& z) {
    return derivative_h(*m, phi, f, z, inner);
  };
  return out;
}

SemiBasicField grad_v_field(ModelPtr m, ScalarBundleFunction phi, int i, NumericalOptions opt) {
  SemiBasicField out;
  out.name = "grad_v" + std::to_string(i + 1) + " " + phi.name;
  const NumericalOptions inner = inner_options(opt);
  out.evaluate = [m, phi, i, inner](const Frame& f) { return grad_v(*m, phi, f, i, inner); };
  out.pairing = [m, phi, i, inner](const Frame& f, const Vec& z) {
    return derivative_v(*m, phi, f, i, z, inner);
  };
  return out;
}

ScalarBundleFunction generator_function(ModelPtr m, ScalarBundleFunction phi, int i,
                                        NumericalOptions opt) {
  ScalarBundleFunction out;
  out.name = "G" + std::to_string(i + 1) + " " + phi.name;
  out.domain = phi.domain;
  const NumericalOptions inner = inner_options(opt);
  out.evaluate = [m, phi, i, inner](const Frame& f) { return generator(*m, phi, f, i, inner); };
  return out;
}

}  // namespace pestov
