#pragma once

// Chart-based Riemannian manifolds: metric, Levi-Civita connection, curvature,
// geodesics and parallel transport.

#include "pestov/types.hpp"

#include <array>
#include <memory>
#include <optional>
#include <random>
#include <string>

namespace pestov {

using Rng = std::mt19937_64;

/// Step sizes shared by all numerical operations.
struct NumericalOptions {
  /// Central-difference step for metric derivatives (generic Christoffel path).
  double metric_fd_step = 1e-5;
  /// Outer central-difference step for bundle derivatives.
  double fd_step = 1e-4;
  /// Inner step for nested differences; 0 means "same as fd_step".
  double inner_fd_step = 0.0;
  /// Fixed RK4 step for geodesic and transport integration.
  double ode_step = 1e-3;
  /// Ignore closed-form Christoffel/Riemann overrides and use finite differences.
  bool force_generic = false;

  double inner_step() const { return inner_fd_step > 0.0 ? inner_fd_step : fd_step; }
};

/// Christoffel symbols Gamma^k_{ij}, symmetric in (i, j).
class Christoffel {
 public:
  explicit Christoffel(int n = 0) : n_(n) { data_.fill(0.0); }

  int dim() const { return n_; }
  double& operator()(int k, int i, int j) { return data_[(k * kMaxDim + i) * kMaxDim + j]; }
  double operator()(int k, int i, int j) const { return data_[(k * kMaxDim + i) * kMaxDim + j]; }

  /// Gamma^k_{ij} a^i b^j.
  Vec contract(const Vec& a, const Vec& b) const;

 private:
  int n_;
  std::array<double, kMaxDim * kMaxDim * kMaxDim> data_;
};

/// Immutable description of a model manifold. Subclasses provide the metric
/// in chart coordinates and optional closed forms for the connection and the
/// curvature; everything else is derived generically.
class ManifoldModel {
 public:
  virtual ~ManifoldModel() = default;

  virtual std::string name() const = 0;
  virtual int dim() const = 0;
  virtual bool is_compact() const = 0;
  virtual bool is_flat() const { return false; }
  virtual int chart_count() const { return 1; }

  /// True iff `p` lies strictly inside the chart domain of `p.chart`.
  virtual bool contains(const Point& p) const = 0;
  virtual Mat metric(const Point& p) const = 0;

  virtual std::optional<Christoffel> christoffel_closed_form(const Point&) const {
    return std::nullopt;
  }
  /// R(x, y)z for the convention <R(x,y)y,x> = sectional curvature.
  virtual std::optional<Vec> riemann_closed_form(const Point&, const Vec&, const Vec&,
                                                 const Vec&) const {
    return std::nullopt;
  }

  /// Keeps a point inside a well-conditioned chart (torus wrap, sphere chart
  /// switch). `vectors` holds tangent vectors at `p` that are mapped along.
  virtual void recenter(Point& /*p*/, Carry& /*vectors*/) const {}

  /// Smooth chart-independent feature map of the base point (a global
  /// embedding for the torus and the sphere) used to build test functions.
  virtual AmbientVec embed(const Point& p) const = 0;
  /// Smooth isometric bundle map T_pM -> R^N (J^T J = g). For embedded models
  /// this is the differential of `embed`.
  virtual AmbientMat tangent_map(const Point& p) const = 0;
  virtual int ambient_dim() const = 0;

  /// Point distributed according to the normalized Riemannian volume.
  virtual Point sample_point(Rng& rng) const = 0;
  /// Point for pointwise probes; equals sample_point on compact models.
  virtual Point sample_probe_point(Rng& rng) const { return sample_point(rng); }
  virtual Point origin() const = 0;

  /// Parallel complex structure J (chart components), when the model has one.
  virtual std::optional<Mat> complex_structure(const Point&) const { return std::nullopt; }

  double inner(const Point& p, const Vec& a, const Vec& b) const {
    return a.dot(metric(p) * b);
  }
};

using ModelPtr = std::shared_ptr<const ManifoldModel>;

void require_admissible(const ManifoldModel& m, const Point& p);

Christoffel christoffel_at(const ManifoldModel& m, const Point& p,
                           const NumericalOptions& opt = {});
/// Christoffel symbols from central differences of the metric only.
Christoffel christoffel_generic(const ManifoldModel& m, const Point& p, double h);

Vec riemann(const ManifoldModel& m, const Point& p, const Vec& x, const Vec& y, const Vec& z,
            const NumericalOptions& opt = {});
Tangent riemann(const ManifoldModel& m, const Tangent& x, const Tangent& y, const Tangent& z,
                const NumericalOptions& opt = {});
/// R(x,y)z from finite differences of the Christoffel symbols with step `h`.
Vec riemann_generic(const ManifoldModel& m, const Point& p, const Vec& x, const Vec& y,
                    const Vec& z, double h, const NumericalOptions& opt = {});

/// Orthonormal basis of T_pM obtained by Gram-Schmidt on the chart frame.
Mat orthonormal_chart_basis(const ManifoldModel& m, const Point& p);

struct CurvatureOperatorMatrix {
  Point base;
  /// Entries <R(e_a,e_b)e_d, e_c> indexed by lexicographic pairs (a<b), (c<d).
  Eigen::MatrixXd entries;
  Eigen::VectorXd eigenvalues;
};

/// Curvature operator on Lambda^2 in the basis e_a ^ e_b of an orthonormal n-frame.
CurvatureOperatorMatrix curvature_operator(const ManifoldModel& m, const Frame& frame,
                                           const NumericalOptions& opt = {});

/// Index of the pair (a, b), a < b, in the lexicographic basis of Lambda^2.
int wedge_index(int n, int a, int b);
/// Components of x ^ y in the lexicographic basis, from orthonormal-basis components.
Eigen::VectorXd wedge(const Vec& x, const Vec& y);

/// End state of a geodesic integration with carried parallel vectors.
struct GeodesicState {
  Point point;
  Vec velocity;
  Carry carried;
};

struct TransportSettings {
  double ode_step = 1e-3;
  /// When > 0, columns [0, orthonormal_columns) of the carried block are an
  /// orthonormal tuple that is re-orthonormalized (modified Gram-Schmidt) every
  /// 100 steps whenever its Gram matrix drifts by more than 1e-10.
  int orthonormal_columns = 0;
  /// Carried column that tracks the geodesic velocity (-1: none).
  int velocity_column = -1;
};

/// Integrates the geodesic with initial velocity `v` at `p` for signed time
/// `t` with fixed-step RK4, parallel transporting the columns of `carried`.
GeodesicState transport_along_geodesic(const ManifoldModel& m, const Point& p, const Vec& v,
                                       double t, const Carry& carried,
                                       const TransportSettings& settings,
                                       const NumericalOptions& opt = {});

struct GeodesicEnd {
  Point point;
  Tangent velocity;
};

GeodesicEnd geodesic_step(const ManifoldModel& m, const Tangent& v, double t,
                          const NumericalOptions& opt = {});

/// Parallel transport of `w` along the geodesic t -> exp(t v), 0 <= t <= duration.
Tangent parallel_transport(const ManifoldModel& m, const Tangent& v, double duration,
                           const Tangent& w, const NumericalOptions& opt = {});

}  // namespace pestov
