#include "pestov/bundle.hpp"

#include <cmath>

namespace pestov {

double pair(const ManifoldModel& m, const SemiBasicField& x, const Frame& f, const Vec& z) {
  if (x.pairing) return x.pairing(f, z);
  return m.inner(f.base, x.evaluate(f), z);
}

Mat gram_matrix(const ManifoldModel& m, const Frame& f) {
  return f.vectors.transpose() * m.metric(f.base) * f.vectors;
}

bool is_orthonormal(const ManifoldModel& m, const Frame& f, double tol) {
  const int k = f.size();
  return (gram_matrix(m, f) - Mat::Identity(k, k)).cwiseAbs().maxCoeff() <= tol;
}

void require_orthonormal(const ManifoldModel& m, const Frame& f, double tol) {
  if (!is_orthonormal(m, f, tol)) throw DomainError("frame is not orthonormal");
}

bool in_frame_tangent_space(const ManifoldModel& m, const Frame& f, const BundleTangent& x,
                            double tol) {
  const Mat pairing = x.verticals.transpose() * m.metric(f.base) * f.vectors;
  return (pairing + pairing.transpose()).cwiseAbs().maxCoeff() <= tol;
}

LiftedFrame horizontal_lift(const ManifoldModel& m, const Frame& f, const Vec& u, double t,
                            const Carry& extra, const NumericalOptions& opt) {
  const int k = f.size();
  const int e = static_cast<int>(extra.cols());
  Carry block(f.dim(), k + e);
  block.leftCols(k) = f.vectors;
  if (e > 0) block.rightCols(e) = extra;
  TransportSettings settings;
  settings.ode_step = opt.ode_step;
  if (f.orthonormal) settings.orthonormal_columns = k;
  GeodesicState s = transport_along_geodesic(m, f.base, u, t, block, settings, opt);
  LiftedFrame out;
  out.frame.base = s.point;
  out.frame.vectors = s.carried.leftCols(k);
  out.frame.orthonormal = f.orthonormal;
  out.velocity = s.velocity;
  out.extra = s.carried.rightCols(e);
  return out;
}

Frame horizontal_lift(const ManifoldModel& m, const Frame& f, const Vec& u, double t,
                      const NumericalOptions& opt) {
  return horizontal_lift(m, f, u, t, Carry(f.dim(), 0), opt).frame;
}

Frame frame_flow(const ManifoldModel& m, const Frame& f, int i, double t,
                 const NumericalOptions& opt) {
  if (i < 0 || i >= f.size()) throw DomainError("frame_flow: index out of range");
  if (f.orthonormal) require_orthonormal(m, f);
  TransportSettings settings;
  settings.ode_step = opt.ode_step;
  settings.velocity_column = i;
  if (f.orthonormal) settings.orthonormal_columns = f.size();
  Carry block = f.vectors;
  GeodesicState s = transport_along_geodesic(m, f.base, f.vector(i), t, block, settings, opt);
  return {s.point, s.carried, f.orthonormal};
}

double generator(const ManifoldModel& m, const ScalarBundleFunction& phi, const Frame& f, int i,
                 const NumericalOptions& opt) {
  const double h = opt.fd_step;
  return (phi(frame_flow(m, f, i, h, opt)) - phi(frame_flow(m, f, i, -h, opt))) / (2.0 * h);
}

double gram_determinant(const ManifoldModel& m, const Frame& f) {
  return gram_matrix(m, f).determinant();
}

Frame gram_schmidt(const ManifoldModel& m, const Frame& f) {
  if (gram_determinant(m, f) <= 1e-12) throw DegenerateFrameError("degenerate tuple");
  const Mat g = m.metric(f.base);
  Frame out{f.base, f.vectors, true};
  for (int i = 0; i < f.size(); ++i) {
    Vec v = out.vectors.col(i);
    for (int j = 0; j < i; ++j) {
      const Vec e = out.vectors.col(j);
      v -= e.dot(g * v) * e;
    }
    out.vectors.col(i) = v / std::sqrt(v.dot(g * v));
  }
  return out;
}

namespace {

double exp_inv(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }
double exp_inv_sq(double t) { return t > 0.0 ? std::exp(-1.0 / (t * t)) : 0.0; }

template <double (*S)(double)>
double bridge(double x) {
  const double a = S(x - 0.5);
  const double b = S(0.75 - x);
  return a / (a + b);
}

}  // namespace

double standard_bump(double x) { return bridge<exp_inv>(x); }
double alternate_bump(double x) { return bridge<exp_inv_sq>(x); }

ScalarBundleFunction cutoff_extension(ModelPtr m, ScalarBundleFunction phi, CutoffBump bump) {
  ScalarBundleFunction out;
  out.name = phi.name + "~";
  out.domain = BundleDomain::kTuples;
  out.evaluate = [m = std::move(m), phi = std::move(phi), bump](const Frame& w) {
    const double h = gram_determinant(*m, w);
    if (h <= 0.5) return 0.0;
    const double cut = bump(h);
    return cut * phi(gram_schmidt(*m, w));
  };
  return out;
}

Frame truncate_frame(const Frame& f, int k) {
  if (k < 1 || k > f.size()) throw DomainError("truncate_frame: k out of range");
  return {f.base, f.vectors.leftCols(k), f.orthonormal};
}

Frame sample_fiber(const ManifoldModel& m, const Point& p, int k, Rng& rng) {
  const int n = m.dim();
  if (k < 1 || k > n) throw DomainError("sample_fiber: k out of range");
  std::normal_distribution<double> normal;
  const Mat basis = orthonormal_chart_basis(m, p);
  for (;;) {
    Mat gauss(n, k);
    for (int j = 0; j < k; ++j)
      for (int i = 0; i < n; ++i) gauss(i, j) = normal(rng);
    Eigen::HouseholderQR<Mat> qr(gauss);
    const Mat r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    if (r.diagonal().cwiseAbs().minCoeff() < 1e-12) continue;
    Mat q = qr.householderQ() * Mat::Identity(n, k);
    for (int j = 0; j < k; ++j) {
      if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    }
    return {p, basis * q, true};
  }
}

Frame sample_frame(const ManifoldModel& m, int k, Rng& rng) {
  const Point p = m.sample_point(rng);
  return sample_fiber(m, p, k, rng);
}

}  // namespace pestov
