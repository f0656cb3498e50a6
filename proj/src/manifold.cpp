#include "pestov/manifold.hpp"

#include <cmath>
#include <sstream>

namespace pestov {

Vec Christoffel::contract(const Vec& a, const Vec& b) const {
  Vec out = Vec::Zero(n_);
  for (int k = 0; k < n_; ++k) {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < n_; ++j) s += (*this)(k, i, j) * a[i] * b[j];
    }
    out[k] = s;
  }
  return out;
}

void require_admissible(const ManifoldModel& m, const Point& p) {
  if (p.dim() != m.dim()) {
    throw DomainError("point dimension " + std::to_string(p.dim()) + " does not match " +
                      m.name());
  }
  if (!p.coords.allFinite() || !m.contains(p)) {
    std::ostringstream os;
    os << "point (chart " << p.chart << ", coords " << p.coords.transpose()
       << ") outside the chart domain of " << m.name();
    throw ChartExitError(os.str());
  }
}

namespace {

Point shifted(const Point& p, int axis, double h) {
  Point q = p;
  q.coords[axis] += h;
  return q;
}

}  // namespace

Christoffel christoffel_generic(const ManifoldModel& m, const Point& p, double h) {
  require_admissible(m, p);
  const int n = m.dim();
  std::array<Mat, kMaxDim> dg;
  for (int a = 0; a < n; ++a) {
    const Point plus = shifted(p, a, h);
    const Point minus = shifted(p, a, -h);
    require_admissible(m, plus);
    require_admissible(m, minus);
    dg[a] = (m.metric(plus) - m.metric(minus)) / (2.0 * h);
  }
  const Mat ginv = m.metric(p).inverse();
  Christoffel gamma(n);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        double s = 0.0;
        for (int l = 0; l < n; ++l) {
          s += ginv(k, l) * (dg[i](l, j) + dg[j](l, i) - dg[l](i, j));
        }
        gamma(k, i, j) = 0.5 * s;
        gamma(k, j, i) = 0.5 * s;
      }
    }
  }
  return gamma;
}

Christoffel christoffel_at(const ManifoldModel& m, const Point& p, const NumericalOptions& opt) {
  require_admissible(m, p);
  if (!opt.force_generic) {
    if (auto closed = m.christoffel_closed_form(p)) return *closed;
  }
  return christoffel_generic(m, p, opt.metric_fd_step);
}

Vec riemann_generic(const ManifoldModel& m, const Point& p, const Vec& x, const Vec& y,
                    const Vec& z, double h, const NumericalOptions& opt) {
  const int n = m.dim();
  const Christoffel g0 = christoffel_at(m, p, opt);
  std::array<Christoffel, kMaxDim> dgamma;
  for (int a = 0; a < n; ++a) {
    const Christoffel gp = christoffel_at(m, shifted(p, a, h), opt);
    const Christoffel gm = christoffel_at(m, shifted(p, a, -h), opt);
    Christoffel d(n);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) d(k, i, j) = (gp(k, i, j) - gm(k, i, j)) / (2.0 * h);
    dgamma[a] = d;
  }
  // R^l_{ijk} = d_i G^l_{jk} - d_j G^l_{ik} + G^l_{im} G^m_{jk} - G^l_{jm} G^m_{ik}
  Vec out = Vec::Zero(n);
  for (int l = 0; l < n; ++l) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double xy = x[i] * y[j];
        if (xy == 0.0) continue;
        for (int k = 0; k < n; ++k) {
          double r = dgamma[i](l, j, k) - dgamma[j](l, i, k);
          for (int q = 0; q < n; ++q) r += g0(l, i, q) * g0(q, j, k) - g0(l, j, q) * g0(q, i, k);
          s += xy * z[k] * r;
        }
      }
    }
    out[l] = s;
  }
  return out;
}

Vec riemann(const ManifoldModel& m, const Point& p, const Vec& x, const Vec& y, const Vec& z,
            const NumericalOptions& opt) {
  require_admissible(m, p);
  if (!opt.force_generic) {
    if (auto closed = m.riemann_closed_form(p, x, y, z)) return *closed;
  }
  return riemann_generic(m, p, x, y, z, opt.fd_step, opt);
}

Tangent riemann(const ManifoldModel& m, const Tangent& x, const Tangent& y, const Tangent& z,
                const NumericalOptions& opt) {
  auto same = [](const Point& a, const Point& b) {
    return a.chart == b.chart && a.coords == b.coords;
  };
  if (!same(x.base, y.base) || !same(x.base, z.base)) {
    throw DomainError("riemann: tangent vectors have different base points");
  }
  return {x.base, riemann(m, x.base, x.components, y.components, z.components, opt)};
}

Mat orthonormal_chart_basis(const ManifoldModel& m, const Point& p) {
  const Mat g = m.metric(p);
  Eigen::LLT<Mat> llt(g);
  if (llt.info() != Eigen::Success) {
    throw DomainError("metric is not positive definite at the requested point");
  }
  // Gram-Schmidt of the chart frame is the upper-triangular L^{-T}.
  Mat lt = llt.matrixL().transpose();
  return lt.inverse();
}

int wedge_index(int n, int a, int b) {
  // pairs (0,1),(0,2),...,(0,n-1),(1,2),...
  return a * n - a * (a + 1) / 2 + (b - a - 1);
}

Eigen::VectorXd wedge(const Vec& x, const Vec& y) {
  const int n = static_cast<int>(x.size());
  Eigen::VectorXd out(n * (n - 1) / 2);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) out[wedge_index(n, a, b)] = x[a] * y[b] - x[b] * y[a];
  return out;
}

CurvatureOperatorMatrix curvature_operator(const ManifoldModel& m, const Frame& frame,
                                           const NumericalOptions& opt) {
  const int n = m.dim();
  if (frame.size() != n) throw DomainError("curvature_operator needs a full n-frame");
  const Mat gram = frame.vectors.transpose() * m.metric(frame.base) * frame.vectors;
  if ((gram - Mat::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-9) {
    throw DomainError("curvature_operator needs an orthonormal frame");
  }
  const int dim2 = n * (n - 1) / 2;
  CurvatureOperatorMatrix out{frame.base, Eigen::MatrixXd::Zero(dim2, dim2), {}};
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      for (int d = 0; d < n; ++d) {
        const Vec r = riemann(m, frame.base, frame.vector(a), frame.vector(b), frame.vector(d), opt);
        for (int c = 0; c < d; ++c) {
          // <R(e_a,e_b)e_d, e_c> for the pair (c, d)
          out.entries(wedge_index(n, a, b), wedge_index(n, c, d)) =
              m.inner(frame.base, r, frame.vector(c));
        }
      }
    }
  }
  if (dim2 > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        0.5 * (out.entries + out.entries.transpose()), Eigen::EigenvaluesOnly);
    out.eigenvalues = solver.eigenvalues();
  }
  return out;
}

namespace {

void modified_gram_schmidt(const Mat& g, Carry& block, int columns) {
  for (int i = 0; i < columns; ++i) {
    Vec v = block.col(i);
    for (int j = 0; j < i; ++j) {
      const Vec e = block.col(j);
      v -= e.dot(g * v) * e;
    }
    block.col(i) = v / std::sqrt(v.dot(g * v));
  }
}

}  // namespace

GeodesicState transport_along_geodesic(const ManifoldModel& m, const Point& p, const Vec& v,
                                       double t, const Carry& carried,
                                       const TransportSettings& settings,
                                       const NumericalOptions& opt) {
  require_admissible(m, p);
  const int n = m.dim();
  const int cols = static_cast<int>(carried.cols());
  GeodesicState state{p, v, carried};
  if (t == 0.0) return state;

  const long steps = std::max(1L, static_cast<long>(std::ceil(std::abs(t) / settings.ode_step - 1e-9)));
  const double dt = t / static_cast<double>(steps);

  // Column 0 holds the velocity, columns 1.. the carried vectors.
  Carry y(n, cols + 1);
  y.col(0) = v;
  if (cols > 0) y.rightCols(cols) = carried;
  Vec x = p.coords;
  const int chart = state.point.chart;
  Point cur{chart, x};

  auto rhs = [&](const Vec& pos, const Carry& block, Vec& dpos, Carry& dblock) {
    const Point q{cur.chart, pos};
    if (!pos.allFinite() || !m.contains(q)) {
      throw ChartExitError("geodesic left the chart domain of " + m.name());
    }
    const Christoffel gamma = christoffel_at(m, q, opt);
    const Vec vel = block.col(0);
    // A(k, j) = Gamma^k_{ij} vel^i
    Mat a = Mat::Zero(n, n);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i) {
        if (vel[i] == 0.0) continue;
        for (int j = 0; j < n; ++j) a(k, j) += gamma(k, i, j) * vel[i];
      }
    dpos = vel;
    dblock.noalias() = -a * block;
  };

  Vec k1x, k2x, k3x, k4x;
  Carry k1(n, cols + 1), k2(n, cols + 1), k3(n, cols + 1), k4(n, cols + 1);
  for (long s = 0; s < steps; ++s) {
    rhs(cur.coords, y, k1x, k1);
    rhs(cur.coords + 0.5 * dt * k1x, y + 0.5 * dt * k1, k2x, k2);
    rhs(cur.coords + 0.5 * dt * k2x, y + 0.5 * dt * k2, k3x, k3);
    rhs(cur.coords + dt * k3x, y + dt * k3, k4x, k4);
    cur.coords += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    y += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    m.recenter(cur, y);
    if (!cur.coords.allFinite() || !m.contains(cur)) {
      throw ChartExitError("geodesic left the chart domain of " + m.name());
    }
    if (settings.orthonormal_columns > 0 && (s + 1) % 100 == 0) {
      const Mat g = m.metric(cur);
      const int oc = settings.orthonormal_columns;
      const Mat block = y.block(0, 1, n, oc);
      const Mat gram = block.transpose() * g * block;
      if ((gram - Mat::Identity(oc, oc)).cwiseAbs().maxCoeff() > 1e-10) {
        Carry tmp = y.block(0, 1, n, oc);
        modified_gram_schmidt(g, tmp, oc);
        y.block(0, 1, n, oc) = tmp;
        if (settings.velocity_column >= 0) y.col(0) = y.col(1 + settings.velocity_column);
      }
    }
  }
  state.point = cur;
  state.velocity = y.col(0);
  if (cols > 0) state.carried = y.rightCols(cols);
  if (settings.velocity_column >= 0) state.carried.col(settings.velocity_column) = state.velocity;
  return state;
}

GeodesicEnd geodesic_step(const ManifoldModel& m, const Tangent& v, double t,
                          const NumericalOptions& opt) {
  TransportSettings settings;
  settings.ode_step = opt.ode_step;
  const GeodesicState s = transport_along_geodesic(m, v.base, v.components, t,
                                                   Carry(m.dim(), 0), settings, opt);
  return {s.point, {s.point, s.velocity}};
}

Tangent parallel_transport(const ManifoldModel& m, const Tangent& v, double duration,
                           const Tangent& w, const NumericalOptions& opt) {
  if (w.base.chart != v.base.chart || w.base.coords != v.base.coords) {
    throw DomainError("parallel_transport: vector is not based at the curve start");
  }
  TransportSettings settings;
  settings.ode_step = opt.ode_step;
  Carry c(m.dim(), 1);
  c.col(0) = w.components;
  const GeodesicState s =
      transport_along_geodesic(m, v.base, v.components, duration, c, settings, opt);
  return {s.point, s.carried.col(0)};
}

}  // namespace pestov
