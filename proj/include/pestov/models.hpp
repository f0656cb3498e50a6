#pragma once

// Registered model manifolds.
//
//   torus:<n>        flat unit torus R^n / Z^n
//   ctorus:<2m>      flat torus with the standard complex structure
//   sphere:<n>       round unit sphere, two stereographic charts
//   hyperbolic:<n>   upper half-space model (non-compact)
//   product:<a>x<b>  Riemannian product of two registered models

#include "pestov/manifold.hpp"

#include <string>

namespace pestov {

class FlatTorus final : public ManifoldModel {
 public:
  FlatTorus(int n, bool complex_structure);

  std::string name() const override;
  int dim() const override { return n_; }
  bool is_compact() const override { return true; }
  bool is_flat() const override { return true; }
  bool contains(const Point& p) const override;
  Mat metric(const Point& p) const override;
  std::optional<Christoffel> christoffel_closed_form(const Point& p) const override;
  std::optional<Vec> riemann_closed_form(const Point&, const Vec&, const Vec&,
                                         const Vec&) const override;
  void recenter(Point& p, Carry& vectors) const override;
  AmbientVec embed(const Point& p) const override;
  AmbientMat tangent_map(const Point& p) const override;
  int ambient_dim() const override { return 2 * n_; }
  Point sample_point(Rng& rng) const override;
  Point origin() const override;
  std::optional<Mat> complex_structure(const Point&) const override;

 private:
  int n_;
  bool kaehler_;
};

/// Unit sphere S^n. Chart 0 is the stereographic projection from the north
/// pole (its origin is the south pole), chart 1 the projection from the south
/// pole. Both carry the metric 4/(1+|x|^2)^2 delta; points are moved to the
/// other chart once |x| exceeds 1.5.
class RoundSphere final : public ManifoldModel {
 public:
  explicit RoundSphere(int n);

  static constexpr double kSwitchRadius = 1.5;

  std::string name() const override;
  int dim() const override { return n_; }
  bool is_compact() const override { return true; }
  int chart_count() const override { return 2; }
  bool contains(const Point& p) const override;
  Mat metric(const Point& p) const override;
  std::optional<Christoffel> christoffel_closed_form(const Point& p) const override;
  std::optional<Vec> riemann_closed_form(const Point& p, const Vec& x, const Vec& y,
                                         const Vec& z) const override;
  void recenter(Point& p, Carry& vectors) const override;
  AmbientVec embed(const Point& p) const override;
  AmbientMat tangent_map(const Point& p) const override;
  int ambient_dim() const override { return n_ + 1; }
  Point sample_point(Rng& rng) const override;
  Point origin() const override;

  /// Chart point of a unit vector of R^{n+1}.
  Point from_embedding(const AmbientVec& x) const;

 private:
  int n_;
};

/// Upper half-space {(x_1..x_{n-1}, y) : y > 0} with metric delta / y^2.
class HyperbolicSpace final : public ManifoldModel {
 public:
  explicit HyperbolicSpace(int n);

  std::string name() const override;
  int dim() const override { return n_; }
  bool is_compact() const override { return false; }
  bool contains(const Point& p) const override;
  Mat metric(const Point& p) const override;
  std::optional<Christoffel> christoffel_closed_form(const Point& p) const override;
  std::optional<Vec> riemann_closed_form(const Point& p, const Vec& x, const Vec& y,
                                         const Vec& z) const override;
  AmbientVec embed(const Point& p) const override;
  AmbientMat tangent_map(const Point& p) const override;
  int ambient_dim() const override { return n_; }
  Point sample_point(Rng& rng) const override;
  Point sample_probe_point(Rng& rng) const override;
  Point origin() const override;

 private:
  int n_;
};

class ProductManifold final : public ManifoldModel {
 public:
  ProductManifold(ModelPtr a, ModelPtr b);

  std::string name() const override;
  int dim() const override { return na_ + nb_; }
  bool is_compact() const override { return a_->is_compact() && b_->is_compact(); }
  bool is_flat() const override { return a_->is_flat() && b_->is_flat(); }
  int chart_count() const override { return a_->chart_count() * b_->chart_count(); }
  bool contains(const Point& p) const override;
  Mat metric(const Point& p) const override;
  std::optional<Christoffel> christoffel_closed_form(const Point& p) const override;
  std::optional<Vec> riemann_closed_form(const Point& p, const Vec& x, const Vec& y,
                                         const Vec& z) const override;
  void recenter(Point& p, Carry& vectors) const override;
  AmbientVec embed(const Point& p) const override;
  AmbientMat tangent_map(const Point& p) const override;
  int ambient_dim() const override { return a_->ambient_dim() + b_->ambient_dim(); }
  Point sample_point(Rng& rng) const override;
  Point sample_probe_point(Rng& rng) const override;
  Point origin() const override;
  std::optional<Mat> complex_structure(const Point& p) const override;

  Point first(const Point& p) const;
  Point second(const Point& p) const;
  Point join(const Point& a, const Point& b) const;

 private:
  ModelPtr a_;
  ModelPtr b_;
  int na_;
  int nb_;
};

/// Builds a model from its registry name; throws DomainError on unknown names.
ModelPtr make_manifold(const std::string& name);

}  // namespace pestov
