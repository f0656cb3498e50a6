#pragma once

// The tuple bundle T^kM and the orthonormal frame bundle F^kM: frame flows and
// their generators, horizontal lifts, Gram-Schmidt, the cutoff extension from
// F^nM to T^nM and Haar sampling of Stiefel fibers.

#include "pestov/manifold.hpp"

#include <functional>
#include <string>

namespace pestov {

enum class BundleDomain { kTuples, kFrames };

/// Scalar function on T^kM (or on F^kM when `domain == kFrames`).
struct ScalarBundleFunction {
  std::string name;
  BundleDomain domain = BundleDomain::kTuples;
  std::function<double(const Frame&)> evaluate;

  double operator()(const Frame& f) const { return evaluate(f); }
};

/// Map f -> X(f) in T_{pi(f)}M. `pairing`, when set, evaluates <X(f), z>
/// directly (cheaper for gradients, which are naturally directional).
struct SemiBasicField {
  std::string name;
  std::function<Vec(const Frame&)> evaluate;
  std::function<double(const Frame&, const Vec&)> pairing;
};

/// Element (u, w_1, ..., w_k) of T_f T^kM; `verticals` holds the w_i as columns.
struct BundleTangent {
  Vec horizontal;
  Mat verticals;
};

double pair(const ManifoldModel& m, const SemiBasicField& x, const Frame& f, const Vec& z);

Mat gram_matrix(const ManifoldModel& m, const Frame& f);
bool is_orthonormal(const ManifoldModel& m, const Frame& f, double tol = 1e-9);
/// Throws DomainError unless the frame is orthonormal to `tol`.
void require_orthonormal(const ManifoldModel& m, const Frame& f, double tol = 1e-9);

/// True iff the matrix (<w_i, v_j>) is skew-symmetric to `tol`.
bool in_frame_tangent_space(const ManifoldModel& m, const Frame& f, const BundleTangent& x,
                            double tol = 1e-9);

/// Frame transported along the geodesic c_u together with optional extra
/// vectors at the same base point.
struct LiftedFrame {
  Frame frame;
  Vec velocity;
  Carry extra;
};

/// f_u(t): parallel transport of every vector of f along the geodesic with
/// initial velocity u, for signed time t.
LiftedFrame horizontal_lift(const ManifoldModel& m, const Frame& f, const Vec& u, double t,
                            const Carry& extra, const NumericalOptions& opt = {});
Frame horizontal_lift(const ManifoldModel& m, const Frame& f, const Vec& u, double t,
                      const NumericalOptions& opt = {});

/// i-th frame flow F^i_t (0-based index).
Frame frame_flow(const ManifoldModel& m, const Frame& f, int i, double t,
                 const NumericalOptions& opt = {});

/// G^i phi(f) by central differencing of the frame flow at opt.fd_step.
double generator(const ManifoldModel& m, const ScalarBundleFunction& phi, const Frame& f, int i,
                 const NumericalOptions& opt = {});

double gram_determinant(const ManifoldModel& m, const Frame& f);

/// Orthonormalizes the tuple, preserving the flag and the orientation of the
/// leading minors. Throws DegenerateFrameError when det(Gram) <= 1e-12.
Frame gram_schmidt(const ManifoldModel& m, const Frame& f);

/// Smooth cutoff: 0 on [0, 1/2], 1 on [3/4, inf), monotone in between.
using CutoffBump = double (*)(double);
double standard_bump(double x);
/// A second admissible cutoff built from exp(-1/t^2).
double alternate_bump(double x);

/// phi~(w) = H(det Gram(w)) * phi(GramSchmidt(w)) for a function on frames.
ScalarBundleFunction cutoff_extension(ModelPtr m, ScalarBundleFunction phi,
                                      CutoffBump bump = &standard_bump);

/// (v_1, ..., v_n) -> (v_1, ..., v_k).
Frame truncate_frame(const Frame& f, int k);

/// Haar-distributed orthonormal k-frame at p.
Frame sample_fiber(const ManifoldModel& m, const Point& p, int k, Rng& rng);

/// Frame distributed by dvol x Haar (compact models only).
Frame sample_frame(const ManifoldModel& m, int k, Rng& rng);

}  // namespace pestov
