#include "pestov/grassmannian.hpp"

#include "pestov/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pestov {

namespace {

AmbientMat ambient_basis(const ManifoldModel& m, const OrientedPlane& a) {
  return m.tangent_map(a.base) * a.basis;
}

/// Haar-distributed element of SO(k).
Mat random_rotation(int k, Rng& rng) {
  std::normal_distribution<double> normal;
  Mat g(k, k);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < k; ++i) g(i, j) = normal(rng);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ() * Mat::Identity(k, k);
  const Mat r = qr.matrixQR();
  for (int j = 0; j < k; ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  if (q.determinant() < 0.0) q.col(0) = -q.col(0);
  return q;
}

Frame probe_frame(const ManifoldModel& m, Rng& rng) {
  const Point p = m.sample_probe_point(rng);
  return sample_fiber(m, p, m.dim(), rng);
}

std::string format(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

}  // namespace

bool planes_equal(const ManifoldModel& m, const OrientedPlane& a, const OrientedPlane& b,
                  double tol) {
  if (a.dim() != b.dim()) return false;
  if ((m.embed(a.base) - m.embed(b.base)).cwiseAbs().maxCoeff() > tol) return false;
  const AmbientMat ea = ambient_basis(m, a);
  const AmbientMat eb = ambient_basis(m, b);
  const Mat change = ea.transpose() * eb;
  const double span_distance = (eb - ea * change).norm();
  return span_distance < tol && change.determinant() > 0.0;
}

OrientedPlane project_frame(const ManifoldModel& m, const Frame& f, int k) {
  if (k < 1 || k > f.size()) throw DomainError("project_frame: k out of range");
  require_orthonormal(m, f);
  return {f.base, f.vectors.leftCols(k)};
}

ScalarBundleFunction lift_function(ModelPtr m, GrassmannFunction phi, int k,
                                   std::uint64_t probe_seed) {
  const int n = m->dim();
  if (k < 1 || k > n) throw DomainError("lift_function: k out of range");
  Rng rng(probe_seed);
  for (int probe = 0; probe < 5; ++probe) {
    const Frame f = probe_frame(*m, rng);
    const OrientedPlane a = project_frame(*m, f, k);
    const OrientedPlane b{a.base, a.basis * random_rotation(k, rng)};
    const double va = phi(a);
    const double vb = phi(b);
    if (std::abs(va - vb) > 1e-9 * std::max(1.0, std::abs(va))) {
      throw DomainError(phi.name + " is not SO(" + std::to_string(k) +
                        ")-invariant (difference " + format(std::abs(va - vb)) + ")");
    }
  }
  ScalarBundleFunction out;
  out.name = phi.name + " o proj";
  out.domain = BundleDomain::kFrames;
  out.evaluate = [m, phi = std::move(phi), k](const Frame& f) {
    return phi(project_frame(*m, f, k));
  };
  return out;
}

ScalarBundleFunction lifted_extension(ModelPtr m, const GrassmannFunction& phi, int k,
                                      CutoffBump bump) {
  return cutoff_extension(m, lift_function(m, phi, k), bump);
}

bool is_intrinsic(const ManifoldModel& m, const OrientedPlane& a, const Vec& v) {
  const Mat g = m.metric(a.base);
  const Vec inside = a.basis * (a.basis.transpose() * g * v);
  const Vec normal = v - inside;
  const double norm_v = std::sqrt(v.dot(g * v));
  return std::sqrt(normal.dot(g * normal)) <= 1e-9 * std::max(1.0, norm_v);
}

PlaneTransport transport_plane(const ManifoldModel& m, const OrientedPlane& a, const Vec& v,
                               double t, const NumericalOptions& opt) {
  const Frame f{a.base, a.basis, true};
  const Frame moved = horizontal_lift(m, f, v, t, opt);
  return {{moved.base, moved.vectors}, is_intrinsic(m, a, v)};
}

GrassmannFunction kaehler_function(ModelPtr m) {
  if (!m->complex_structure(m->origin())) {
    throw DomainError(m->name() + " has no complex structure");
  }
  GrassmannFunction out;
  out.name = "kaehler";
  out.evaluate = [m](const OrientedPlane& a) {
    if (a.dim() != 2) throw DomainError("kaehler function is defined on 2-planes");
    const Mat j = *m->complex_structure(a.base);
    return m->inner(a.base, a.basis.col(0), j * a.basis.col(1));
  };
  return out;
}

GrassmannFunction sectional_function(ModelPtr m) {
  GrassmannFunction out;
  out.name = "sectional";
  out.evaluate = [m](const OrientedPlane& a) {
    if (a.dim() != 2) throw DomainError("sectional curvature is defined on 2-planes");
    const Vec x = a.basis.col(0);
    const Vec y = a.basis.col(1);
    return m->inner(a.base, riemann(*m, a.base, x, y, y), x);
  };
  return out;
}

GrassmannFunction plucker_function(ModelPtr m, int k, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal;
  const int big_n = m->ambient_dim();
  AmbientMat dual(big_n, k);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < big_n; ++i) dual(i, j) = normal(rng);
  AmbientVec freq(big_n);
  for (int i = 0; i < big_n; ++i) freq[i] = 2.0 * normal(rng);
  GrassmannFunction out;
  out.name = "plucker#" + std::to_string(seed);
  out.evaluate = [m, dual, freq](const OrientedPlane& a) {
    const Mat pairing = ambient_basis(*m, a).transpose() * dual;
    return std::cos(freq.dot(m->embed(a.base))) * pairing.determinant();
  };
  return out;
}

GrassmannFunction trace_function(ModelPtr m, int k, std::uint64_t seed) {
  (void)k;
  Rng rng(seed ^ 0x7f4a7c15ULL);
  std::normal_distribution<double> normal;
  const int big_n = m->ambient_dim();
  Eigen::MatrixXd s(big_n, big_n);
  for (int i = 0; i < big_n; ++i)
    for (int j = 0; j <= i; ++j) s(i, j) = s(j, i) = normal(rng);
  AmbientVec freq(big_n);
  for (int i = 0; i < big_n; ++i) freq[i] = 2.0 * normal(rng);
  GrassmannFunction out;
  out.name = "trace#" + std::to_string(seed);
  out.evaluate = [m, s, freq](const OrientedPlane& a) {
    const Eigen::MatrixXd b = ambient_basis(*m, a);
    return std::sin(freq.dot(m->embed(a.base))) + (b.transpose() * s * b).trace();
  };
  return out;
}

std::vector<GrassmannFunction> grassmann_corpus(ModelPtr m, int k, std::uint64_t seed) {
  std::vector<GrassmannFunction> out{plucker_function(m, k, seed), trace_function(m, k, seed)};
  if (k == 2) {
    out.push_back(sectional_function(m));
    if (m->complex_structure(m->origin())) out.push_back(kaehler_function(m));
  }
  return out;
}

ScalarBundleFunction non_lifted_function(ModelPtr m, std::uint64_t seed) {
  ScalarBundleFunction base = corpus_function(m, CorpusFamily::kTrigPoly, seed);
  base.name = "non-lifted " + base.name;
  return base;
}

double max_curvature_eigenvalue(ModelPtr m, int probes, std::uint64_t seed,
                                const NumericalOptions& opt) {
  Rng rng(seed);
  double worst = -std::numeric_limits<double>::infinity();
  for (int p = 0; p < probes; ++p) {
    const CurvatureOperatorMatrix r = curvature_operator(*m, probe_frame(*m, rng), opt);
    if (r.eigenvalues.size() > 0) worst = std::max(worst, r.eigenvalues.maxCoeff());
  }
  return worst;
}

InvarianceReport check_transport_invariance(ModelPtr m, const GrassmannFunction& phi, int k,
                                            const InvarianceOptions& options,
                                            const NumericalOptions& opt) {
  InvarianceReport out;
  out.n_loops = options.n_loops;
  const int n = m->dim();
  if (k < 1 || k > n) throw DomainError("check_transport_invariance: k out of range");
  out.max_curvature_eigenvalue =
      max_curvature_eigenvalue(m, options.curvature_probes, options.seed, opt);
  if (out.max_curvature_eigenvalue > 1e-9) {
    out.note = "curvature operator has a positive eigenvalue (" +
               format(out.max_curvature_eigenvalue) + ")";
    return out;
  }
  Rng rng(options.seed);
  std::uniform_real_distribution<double> duration(0.1, 1.0);
  std::normal_distribution<double> normal;
  auto unit = [&](int dim) {
    Vec v(dim);
    for (int a = 0; a < dim; ++a) v[a] = normal(rng);
    return Vec(v / v.norm());
  };
  auto random_plane = [&]() { return project_frame(*m, probe_frame(*m, rng), k); };

  for (int loop = 0; loop < options.n_loops; ++loop) {
    const OrientedPlane a = random_plane();
    const Vec v = a.basis * unit(k);
    const PlaneTransport moved = transport_plane(*m, a, v, duration(rng), opt);
    out.intrinsic_drift = std::max(out.intrinsic_drift, std::abs(phi(moved.plane) - phi(a)));
  }
  if (!(out.intrinsic_drift < options.tolerance)) {
    out.note = "not invariant under intrinsic transports (drift " + format(out.intrinsic_drift) +
               ")";
    return out;
  }

  for (int loop = 0; loop < options.n_loops; ++loop) {
    const OrientedPlane a = random_plane();
    const Vec v = orthonormal_chart_basis(*m, a.base) * unit(n);
    const PlaneTransport moved = transport_plane(*m, a, v, duration(rng), opt);
    out.nonintrinsic_drift = std::max(out.nonintrinsic_drift, std::abs(phi(moved.plane) - phi(a)));
  }

  if (m->is_flat()) {
    std::uniform_int_distribution<int> legs(3, 5);
    for (int loop = 0; loop < options.n_loops; ++loop) {
      const OrientedPlane start = random_plane();
      OrientedPlane cur = start;
      const Mat e = orthonormal_chart_basis(*m, start.base);
      Vec displacement = Vec::Zero(n);
      const int count = legs(rng);
      for (int leg = 0; leg + 1 < count; ++leg) {
        const Vec v = e * unit(n);
        const double t = duration(rng);
        cur = transport_plane(*m, cur, v, t, opt).plane;
        displacement += t * v;
      }
      const double back = std::sqrt(m->inner(cur.base, displacement, displacement));
      if (back > 0.0) cur = transport_plane(*m, cur, -displacement / back, back, opt).plane;
      out.loop_drift = std::max(out.loop_drift, std::abs(phi(cur) - phi(start)));
    }
  } else {
    out.note = "closed loops are only generated on flat models";
  }
  const double worst = std::max(out.nonintrinsic_drift, out.loop_drift);
  out.verdict = worst < options.tolerance ? Verdict::kPass : Verdict::kFail;
  return out;
}

std::array<double, 2> consequence_sides(ModelPtr m, const ScalarBundleFunction& lifted, int k,
                                        const Frame& f, const NumericalOptions& opt) {
  const int n = m->dim();
  double lhs = 0.0;
  for (int j = 0; j < n; ++j) {
    const double g = generator(*m, lifted, f, j, opt);
    lhs += g * g;
  }
  lhs *= 0.5 * k;
  const WedgeSides sides = wedge_sides(projected_pairing(*m, lifted, f, opt), k);
  const CurvatureOperatorMatrix r = curvature_operator(*m, f, opt);
  const double rhs = sides.full.dot(r.entries * (0.5 * sides.truncated));
  return {lhs, rhs};
}

ConsequenceResult consequence_identity(ModelPtr m, const GrassmannFunction& phi, int k,
                                       const InvarianceOptions& precondition,
                                       const IntegratedOptions& options,
                                       const NumericalOptions& opt) {
  ConsequenceResult out;
  out.residual.seed = options.mc.seed;
  if (!m->is_compact()) {
    out.note = "requires a compact manifold";
    return out;
  }
  const InvarianceReport pre = check_transport_invariance(m, phi, k, precondition, opt);
  if (pre.verdict == Verdict::kSkip) {
    out.note = pre.note;
    return out;
  }
  const ScalarBundleFunction lifted = lifted_extension(m, phi, k);
  const auto frames =
      sample_stream(*m, m->dim(), options.mc.n_samples, options.mc.seed, options.mc.block_size);
  auto integrand = [&](const NumericalOptions& o) {
    return [&, o](const Frame& f, double* r) {
      const auto sides = consequence_sides(m, lifted, k, f, o);
      r[0] = sides[0];
      r[1] = sides[1];
      r[2] = sides[0] - sides[1];
    };
  };
  const auto values = evaluate_stream(frames, 3, integrand(opt), options.mc);
  const long n_cal = std::min<long>(options.calibration_samples, options.mc.n_samples);
  const std::vector<Frame> cal_frames(frames.begin(), frames.begin() + n_cal);
  const auto cal = evaluate_stream(cal_frames, 3, integrand(doubled_steps(opt)), options.mc);
  out.residual = summarize(values[2], options.mc.seed);
  out.lhs = summarize(values[0], options.mc.seed).mean;
  out.rhs = summarize(values[1], options.mc.seed).mean;
  const std::vector<double> head(values[2].begin(), values[2].begin() + n_cal);
  out.bias_allowance = bias_allowance(head, cal[2]);
  out.verdict = statistical_verdict(out.residual, out.bias_allowance);
  return out;
}

std::array<double, 2> flow_transport_pair(ModelPtr m, const GrassmannFunction& phi, int k,
                                          const Frame& f, int i, const NumericalOptions& opt) {
  if (i < 0 || i >= k) throw DomainError("flow_transport_pair: i must index the plane");
  const ScalarBundleFunction lifted = lift_function(m, phi, k);
  const double g = generator(*m, lifted, f, i, opt);
  const OrientedPlane a = project_frame(*m, f, k);
  const double h = opt.fd_step;
  auto at = [&](double t) { return phi(transport_plane(*m, a, f.vectors.col(i), t, opt).plane); };
  const double d = (8.0 * (at(h) - at(-h)) - (at(2.0 * h) - at(-2.0 * h))) / (12.0 * h);
  return {g, d};
}

}  // namespace pestov
