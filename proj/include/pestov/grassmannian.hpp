#pragma once

// Oriented k-planes: projection from full frames, lifted functions,
// intrinsic versus non-intrinsic parallel transport and the invariance
// checks built on them.

#include "pestov/integration.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace pestov {

/// Oriented plane represented by an orthonormal basis (columns).
struct OrientedPlane {
  Point base;
  Mat basis;

  int dim() const { return static_cast<int>(basis.cols()); }
};

/// Equal iff the spans agree to `tol` and the change of basis has det > 0.
bool planes_equal(const ManifoldModel& m, const OrientedPlane& a, const OrientedPlane& b,
                  double tol = 1e-9);

struct GrassmannFunction {
  std::string name;
  std::function<double(const OrientedPlane&)> evaluate;

  double operator()(const OrientedPlane& a) const { return evaluate(a); }
};

OrientedPlane project_frame(const ManifoldModel& m, const Frame& f, int k);

/// phi o pi~ on F^nM. Probes SO(k)-invariance on seeded frames and throws
/// DomainError when the basis representation is not invariant.
ScalarBundleFunction lift_function(ModelPtr m, GrassmannFunction phi, int k,
                                   std::uint64_t probe_seed = 17);

/// Cutoff extension of the lift to T^nM (what the vertical calculus needs).
ScalarBundleFunction lifted_extension(ModelPtr m, const GrassmannFunction& phi, int k,
                                      CutoffBump bump = &standard_bump);

/// True iff the component of v orthogonal to the plane is negligible.
bool is_intrinsic(const ManifoldModel& m, const OrientedPlane& a, const Vec& v);

struct PlaneTransport {
  OrientedPlane plane;
  bool intrinsic = false;
};

PlaneTransport transport_plane(const ManifoldModel& m, const OrientedPlane& a, const Vec& v,
                               double t, const NumericalOptions& opt = {});

// Corpus of plane functions.
/// <v_1, J v_2>; needs a complex structure and k = 2.
GrassmannFunction kaehler_function(ModelPtr m);
/// Sectional curvature <R(v_1, v_2) v_2, v_1>; k = 2.
GrassmannFunction sectional_function(ModelPtr m);
/// cos(<a, X>) det(B^T A) for the ambient image B of the basis.
GrassmannFunction plucker_function(ModelPtr m, int k, std::uint64_t seed);
/// sin(<a, X>) + trace(B^T S B).
GrassmannFunction trace_function(ModelPtr m, int k, std::uint64_t seed);
std::vector<GrassmannFunction> grassmann_corpus(ModelPtr m, int k, std::uint64_t seed);

/// A function on F^nM that is not a lift (negative control for the wedge identity).
ScalarBundleFunction non_lifted_function(ModelPtr m, std::uint64_t seed);

/// Largest eigenvalue of the curvature operator over seeded probe frames.
double max_curvature_eigenvalue(ModelPtr m, int probes, std::uint64_t seed,
                                const NumericalOptions& opt = {});

struct InvarianceOptions {
  int n_loops = 100;
  std::uint64_t seed = 1;
  /// Tolerance on the intrinsic drift (precondition) and on the prediction.
  double tolerance = 1e-6;
  int curvature_probes = 10;
};

struct InvarianceReport {
  Verdict verdict = Verdict::kSkip;
  std::string note;
  double max_curvature_eigenvalue = 0.0;
  double intrinsic_drift = 0.0;
  double nonintrinsic_drift = 0.0;
  /// Closed piecewise-geodesic loops (flat models only).
  double loop_drift = 0.0;
  int n_loops = 0;
};

/// Checks that intrinsic invariance implies invariance under all transports
/// on models with non-positive curvature operator.
InvarianceReport check_transport_invariance(ModelPtr m, const GrassmannFunction& phi, int k,
                                            const InvarianceOptions& options,
                                            const NumericalOptions& opt = {});

/// Both sides of (k/2) sum_j (G^j phi)^2 = <R(sum_j w_j^v_j), sum_{i<=k} w_i^v_i>.
std::array<double, 2> consequence_sides(ModelPtr m, const ScalarBundleFunction& lifted, int k,
                                        const Frame& f, const NumericalOptions& opt = {});

struct ConsequenceResult {
  Verdict verdict = Verdict::kSkip;
  std::string note;
  MCEstimate residual;
  double lhs = 0.0;
  double rhs = 0.0;
  double bias_allowance = 0.0;
};

ConsequenceResult consequence_identity(ModelPtr m, const GrassmannFunction& phi, int k,
                                       const InvarianceOptions& precondition,
                                       const IntegratedOptions& options,
                                       const NumericalOptions& opt = {});

/// G^i of the lift at f versus a fourth-order difference of phi along the
/// transport of the plane in direction v_i (i < k). The gap is the O(h^2)
/// truncation error of the generator.
std::array<double, 2> flow_transport_pair(ModelPtr m, const GrassmannFunction& phi, int k,
                                          const Frame& f, int i,
                                          const NumericalOptions& opt = {});

}  // namespace pestov
