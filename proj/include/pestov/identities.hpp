#pragma once

// Pointwise residuals of the local identities on T^kM and the Grassmannian
// span/wedge relations, plus finite-difference convergence diagnostics.

#include "pestov/diff_ops.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pestov {

enum class IdentityId {
  // pointwise
  kSymGrad,
  kSymDiv,
  kTensor,
  kSymFlow,
  kGGradV,
  kPestov,
  kWedge,
  kGradVSpan,
  // integrated
  kDivHVanishes,
  kFlowByParts,
  kIntPestov,
  kBundlePestov,
  kInvariantId,
  // Grassmannian
  kTransportInvariance,
  kConsequence,
  kFlowTransport,
};

enum class Verdict { kPass, kFail, kSkip, kNoiseFloor };

std::string to_string(Verdict v);
std::string to_string(IdentityId id);
std::optional<IdentityId> identity_from_string(const std::string& name);
bool is_pointwise(IdentityId id);

/// Indices (0-based) and directions consumed by the pointwise identities.
///   SYM_GRAD   i, u, w        SYM_DIV  i
///   TENSOR     u, w           SYM_FLOW i, j
///   G_GRADV    i, j, l        PESTOV   i, j
///   WEDGE, GRADV_SPAN  plane_dim (frame must be a full orthonormal n-frame)
struct IdentityArgs {
  int i = 0;
  int j = 0;
  int l = 0;
  int plane_dim = 1;
  Vec u;
  Vec w;
};

struct Residual {
  double value = 0.0;
  /// Magnitude of the largest participating term.
  double scale = 0.0;
  double fd_step = 0.0;
  /// Curvature contribution, where the identity has one.
  double curvature_term = 0.0;

  double relative() const;
};

Residual pointwise_residual(IdentityId id, ModelPtr m, const ScalarBundleFunction& phi,
                            const Frame& f, const IdentityArgs& args,
                            const NumericalOptions& opt = {});

/// Matrix (<w_i, v_j>) of so(n)-projected vertical gradients at an orthonormal n-frame.
Mat projected_pairing(const ManifoldModel& m, const ScalarBundleFunction& phi, const Frame& f,
                      const NumericalOptions& opt = {});

/// Lambda^2 components of sum_{j<n} w_j^v_j and 2 sum_{j<k} w_j^v_j in the
/// basis v_a ^ v_b of the frame, from the pairing matrix above.
struct WedgeSides {
  Eigen::VectorXd full;
  Eigen::VectorXd truncated;
};
WedgeSides wedge_sides(const Mat& pairing, int plane_dim);

struct ConvergenceResult {
  std::vector<double> steps;
  std::vector<double> relative_residuals;
  double order = 0.0;
  bool noise_floor = false;
};

/// Rounding-error level of a relative residual at step h for identities with
/// two nested difference levels.
double noise_floor_level(double h);

/// Least-squares slope of log(relative residual) against log(step), fitted
/// over the steps whose residual exceeds noise_floor_level. Flags the noise
/// floor when fewer than two steps qualify.
ConvergenceResult convergence_order(IdentityId id, ModelPtr m, const ScalarBundleFunction& phi,
                                    const Frame& f, const IdentityArgs& args,
                                    const std::vector<double>& steps,
                                    const NumericalOptions& opt = {});

/// Fitted slope of log(y) against log(x).
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace pestov
