#include <doctest.h>

#include "pestov/models.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace pestov;

namespace {

const char* const kModels[] = {"torus:3", "ctorus:2", "sphere:2", "sphere:3",
                               "hyperbolic:2", "hyperbolic:3", "product:sphere:2xtorus:1"};

Vec random_tangent(const ManifoldModel& m, const Point& p, Rng& rng) {
  std::normal_distribution<double> normal;
  Vec c(m.dim());
  for (int a = 0; a < m.dim(); ++a) c[a] = normal(rng);
  return orthonormal_chart_basis(m, p) * c;
}

double sectional(const ManifoldModel& m, const Point& p, const Vec& x, const Vec& y,
                 const NumericalOptions& opt = {}) {
  const double area = m.inner(p, x, x) * m.inner(p, y, y) - std::pow(m.inner(p, x, y), 2);
  return m.inner(p, riemann(m, p, x, y, y, opt), x) / area;
}

/// Chart components of an ambient tangent vector (sphere).
Vec from_ambient(const ManifoldModel& m, const Point& p, const AmbientVec& a) {
  const AmbientMat j = m.tangent_map(p);
  return (j.transpose() * j).ldlt().solve(j.transpose() * a);
}

}  // namespace

TEST_CASE("registry names") {
  CHECK(make_manifold("sphere:3")->dim() == 3);
  CHECK(make_manifold("ctorus:4")->complex_structure(make_manifold("ctorus:4")->origin()));
  CHECK(make_manifold("product:sphere:2xtorus:1")->dim() == 3);
  CHECK(make_manifold("product:sphere:2xtorus:1")->name() == "product:sphere:2xtorus:1");
  CHECK_THROWS_AS(make_manifold("klein:2"), DomainError);
  CHECK_THROWS_AS(make_manifold("sphere:0"), DomainError);
  CHECK_THROWS_AS(make_manifold("ctorus:3"), DomainError);
}

TEST_CASE("metric is symmetric positive definite at sampled points") {
  for (const char* name : kModels) {
    const ModelPtr m = make_manifold(name);
    Rng rng(1);
    for (int s = 0; s < 20; ++s) {
      const Point p = m->sample_probe_point(rng);
      const Mat g = m->metric(p);
      CAPTURE(name);
      CHECK((g - g.transpose()).norm() < 1e-14);
      CHECK(Eigen::SelfAdjointEigenSolver<Mat>(g).eigenvalues().minCoeff() > 0.0);
    }
  }
}

TEST_CASE("tangent maps are isometric") {
  for (const char* name : kModels) {
    const ModelPtr m = make_manifold(name);
    Rng rng(2);
    const Point p = m->sample_probe_point(rng);
    const AmbientMat j = m->tangent_map(p);
    CAPTURE(name);
    CHECK((j.transpose() * j - m->metric(p)).norm() < 1e-12);
  }
}

TEST_CASE("closed-form Christoffel symbols agree with metric differences at second order") {
  for (const char* name : {"sphere:2", "sphere:3", "hyperbolic:3"}) {
    const ModelPtr m = make_manifold(name);
    Rng rng(3);
    const Point p = m->sample_probe_point(rng);
    const Christoffel exact = *m->christoffel_closed_form(p);
    auto error = [&](double h) {
      const Christoffel approx = christoffel_generic(*m, p, h);
      double e = 0.0;
      for (int k = 0; k < m->dim(); ++k)
        for (int i = 0; i < m->dim(); ++i)
          for (int j = 0; j < m->dim(); ++j) e = std::max(e, std::abs(approx(k, i, j) - exact(k, i, j)));
      return e;
    };
    const double e1 = error(1e-2);
    const double e2 = error(5e-3);
    CAPTURE(name);
    CHECK(e1 < 1e-3);
    CHECK(std::log2(e1 / e2) > 1.8);
  }
}

TEST_CASE("sectional curvatures of the model spaces") {
  Rng rng(4);
  for (auto [name, k] : {std::pair{"sphere:2", 1.0}, std::pair{"sphere:3", 1.0},
                         std::pair{"hyperbolic:2", -1.0}, std::pair{"hyperbolic:4", -1.0},
                         std::pair{"torus:3", 0.0}}) {
    const ModelPtr m = make_manifold(name);
    for (int s = 0; s < 5; ++s) {
      const Point p = m->sample_probe_point(rng);
      const Vec x = random_tangent(*m, p, rng);
      const Vec y = random_tangent(*m, p, rng);
      CAPTURE(name);
      CHECK(sectional(*m, p, x, y) == doctest::Approx(k).epsilon(1e-10));
      NumericalOptions generic;
      generic.force_generic = true;
      CHECK(sectional(*m, p, x, y, generic) == doctest::Approx(k).epsilon(1e-4));
    }
  }
  const ModelPtr prod = make_manifold("product:sphere:2xtorus:1");
  const Point p = prod->origin();
  Vec x = Vec::Zero(3), y = Vec::Zero(3);
  x[0] = 1.0;
  y[2] = 1.0;
  CHECK(std::abs(sectional(*prod, p, x, y)) < 1e-12);
  y.setZero();
  y[1] = 1.0;
  CHECK(sectional(*prod, p, x, y) == doctest::Approx(1.0));
}

TEST_CASE("curvature operator of the unit sphere is the identity on 2-forms") {
  const ModelPtr m = make_manifold("sphere:3");
  Rng rng(6);
  Frame f;
  f.base = m->sample_point(rng);
  f.vectors = orthonormal_chart_basis(*m, f.base);
  f.orthonormal = true;
  const auto op = curvature_operator(*m, f);
  CHECK(op.eigenvalues.maxCoeff() == doctest::Approx(1.0));
  CHECK(op.eigenvalues.minCoeff() == doctest::Approx(1.0));
  CHECK(wedge_index(3, 0, 1) == 0);
  CHECK(wedge_index(3, 1, 2) == 2);
}

TEST_CASE("geodesic energy drift stays below 1e-8 per unit time") {
  for (const char* name : {"sphere:2", "sphere:3", "hyperbolic:2", "product:sphere:2xtorus:1"}) {
    const ModelPtr m = make_manifold(name);
    Rng rng(7);
    for (int s = 0; s < 5; ++s) {
      const Point p = m->sample_probe_point(rng);
      Vec v = random_tangent(*m, p, rng);
      v /= std::sqrt(m->inner(p, v, v));
      const double t = 2.0;
      const GeodesicEnd end = geodesic_step(*m, {p, v}, t);
      const double energy = m->inner(end.point, end.velocity.components, end.velocity.components);
      CAPTURE(name);
      CHECK(std::abs(energy - 1.0) / t < 1e-8);
    }
  }
}

TEST_CASE("parallel transport preserves inner products to 1e-8 per unit time") {
  for (const char* name : {"sphere:2", "sphere:3", "hyperbolic:3"}) {
    const ModelPtr m = make_manifold(name);
    Rng rng(8);
    const Point p = m->sample_probe_point(rng);
    const Vec v = random_tangent(*m, p, rng).normalized();
    Carry carried(m->dim(), 2);
    carried.col(0) = random_tangent(*m, p, rng);
    carried.col(1) = random_tangent(*m, p, rng);
    const double before = m->inner(p, carried.col(0), carried.col(1));
    const double norm0 = m->inner(p, carried.col(0), carried.col(0));
    const double t = 3.0;
    const GeodesicState end = transport_along_geodesic(*m, p, v, t, carried, TransportSettings{});
    const double after = m->inner(end.point, end.carried.col(0), end.carried.col(1));
    const double norm1 = m->inner(end.point, end.carried.col(0), end.carried.col(0));
    CAPTURE(name);
    CHECK(std::abs(after - before) / t < 1e-8);
    CHECK(std::abs(norm1 - norm0) / t < 1e-8);
  }
}

TEST_CASE("holonomy of the octant triangle on the sphere is a quarter turn") {
  const auto s = std::make_shared<RoundSphere>(2);
  AmbientVec e[3];
  for (int a = 0; a < 3; ++a) {
    e[a] = AmbientVec::Zero(3);
    e[a][a] = 1.0;
  }
  Point p = s->from_embedding(e[0]);
  Vec w = from_ambient(*s, p, e[1]);
  const AmbientVec w0 = s->tangent_map(p) * w;
  for (int leg = 0; leg < 3; ++leg) {
    const Vec dir = from_ambient(*s, p, e[(leg + 1) % 3]);
    const Tangent moved = parallel_transport(*s, {p, dir}, std::numbers::pi / 2, {p, w});
    p = moved.base;
    w = moved.components;
  }
  CHECK((s->embed(p) - e[0]).norm() < 1e-9);
  const AmbientVec w1 = s->tangent_map(p) * w;
  const double angle = std::acos(std::clamp(w0.dot(w1), -1.0, 1.0));
  CHECK(std::abs(angle - std::numbers::pi / 2) < 1e-4);
}

TEST_CASE("chart changes keep the embedded point and vectors") {
  const auto s = std::make_shared<RoundSphere>(2);
  Point p;
  p.chart = 0;
  p.coords = Vec::Constant(2, 1.4);
  Carry vectors(2, 1);
  vectors.col(0) << 0.3, -0.8;
  const AmbientVec x0 = s->embed(p);
  const AmbientVec v0 = s->tangent_map(p) * Vec(vectors.col(0));
  s->recenter(p, vectors);
  CHECK(p.chart == 1);
  CHECK((s->embed(p) - x0).norm() < 1e-12);
  CHECK((s->tangent_map(p) * Vec(vectors.col(0)) - v0).norm() < 1e-12);

  const ModelPtr t = make_manifold("torus:2");
  Point q = t->origin();
  q.coords << 1.25, -0.5;
  Carry none(2, 0);
  const AmbientVec y0 = t->embed(q);
  t->recenter(q, none);
  CHECK(t->contains(q));
  CHECK((t->embed(q) - y0).norm() < 1e-12);
}

TEST_CASE("admissibility") {
  const ModelPtr h = make_manifold("hyperbolic:2");
  Point p = h->origin();
  CHECK(h->contains(p));
  p.coords[1] = -1.0;
  CHECK_FALSE(h->contains(p));
  CHECK_THROWS_AS(require_admissible(*h, p), ChartExitError);
  CHECK_THROWS_AS(h->sample_point(*std::make_unique<Rng>(1)), NonCompactError);
}
