#pragma once

// Core value types shared by every module: chart points, tangent vectors,
// k-tuples of tangent vectors and the error hierarchy.

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace pestov {

/// Largest manifold dimension supported by the fixed-capacity storage.
inline constexpr int kMaxDim = 8;
/// Largest ambient (embedding) dimension used by model feature maps.
inline constexpr int kMaxAmbient = 16;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;
/// Column block carried along a geodesic: velocity, frame vectors and an
/// auxiliary basis at most.
using Carry = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, 4 * kMaxDim>;
using AmbientVec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxAmbient, 1>;
using AmbientMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxAmbient, kMaxDim>;

struct Point {
  int chart = 0;
  Vec coords;

  int dim() const { return static_cast<int>(coords.size()); }
};

struct Tangent {
  Point base;
  Vec components;
};

/// A k-tuple (v_1, ..., v_k) of tangent vectors at a common base point, stored
/// as the columns of an n x k matrix of chart components. `orthonormal` is a
/// claim of membership in the orthonormal frame bundle; operations that
/// require it verify the claim.
struct Frame {
  Point base;
  Mat vectors;
  bool orthonormal = false;

  int size() const { return static_cast<int>(vectors.cols()); }
  int dim() const { return static_cast<int>(vectors.rows()); }
  Vec vector(int i) const { return vectors.col(i); }
  Tangent tangent(int i) const { return {base, vectors.col(i)}; }
};

/// Raised for invalid arguments: wrong sizes, indices, non-orthonormal frames.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a point or a trajectory leaves the declared chart domain.
class ChartExitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an operation needs a compact manifold (volume sampling).
class NonCompactError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised by Gram-Schmidt on (numerically) linearly dependent tuples.
class DegenerateFrameError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pestov
