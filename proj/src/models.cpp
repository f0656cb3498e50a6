#include "pestov/models.hpp"

#include <charconv>
#include <cmath>
#include <numbers>

namespace pestov {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Levi-Civita symbols of a conformally flat metric e^{2 sigma} delta, given
// the gradient of sigma.
Christoffel conformal_christoffel(const Vec& dsigma) {
  const int n = static_cast<int>(dsigma.size());
  Christoffel g(n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = 0.0;
        if (k == i) v += dsigma[j];
        if (k == j) v += dsigma[i];
        if (i == j) v -= dsigma[k];
        g(k, i, j) = v;
      }
  return g;
}

// Constant curvature c: R(x,y)z = c (<y,z> x - <x,z> y).
Vec constant_curvature(const Mat& g, double c, const Vec& x, const Vec& y, const Vec& z) {
  return c * (y.dot(g * z) * x - x.dot(g * z) * y);
}

int parse_positive(const std::string& s) {
  int value = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, value);
  if (ec != std::errc{} || ptr != end || value <= 0) {
    throw DomainError("invalid dimension '" + s + "'");
  }
  return value;
}

void check_dim(int n, int max_n, const std::string& what) {
  if (n < 1 || n > max_n) {
    throw DomainError(what + ": dimension must be in [1, " + std::to_string(max_n) + "]");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Flat torus

FlatTorus::FlatTorus(int n, bool complex_structure) : n_(n), kaehler_(complex_structure) {
  check_dim(n, kMaxDim, "torus");
  if (kaehler_ && n % 2 != 0) throw DomainError("ctorus needs an even dimension");
}

std::string FlatTorus::name() const {
  return (kaehler_ ? "ctorus:" : "torus:") + std::to_string(n_);
}

bool FlatTorus::contains(const Point& p) const {
  return p.chart == 0 && p.dim() == n_ && p.coords.allFinite();
}

Mat FlatTorus::metric(const Point&) const { return Mat::Identity(n_, n_); }

std::optional<Christoffel> FlatTorus::christoffel_closed_form(const Point&) const {
  return Christoffel(n_);
}

std::optional<Vec> FlatTorus::riemann_closed_form(const Point&, const Vec&, const Vec&,
                                                  const Vec&) const {
  return Vec::Zero(n_);
}

void FlatTorus::recenter(Point& p, Carry&) const {
  for (int i = 0; i < n_; ++i) p.coords[i] -= std::floor(p.coords[i]);
}

AmbientVec FlatTorus::embed(const Point& p) const {
  AmbientVec x(2 * n_);
  for (int i = 0; i < n_; ++i) {
    x[2 * i] = std::cos(kTwoPi * p.coords[i]) / kTwoPi;
    x[2 * i + 1] = std::sin(kTwoPi * p.coords[i]) / kTwoPi;
  }
  return x;
}

AmbientMat FlatTorus::tangent_map(const Point& p) const {
  AmbientMat j = AmbientMat::Zero(2 * n_, n_);
  for (int i = 0; i < n_; ++i) {
    j(2 * i, i) = -std::sin(kTwoPi * p.coords[i]);
    j(2 * i + 1, i) = std::cos(kTwoPi * p.coords[i]);
  }
  return j;
}

Point FlatTorus::sample_point(Rng& rng) const {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Point p{0, Vec(n_)};
  for (int i = 0; i < n_; ++i) p.coords[i] = u(rng);
  return p;
}

Point FlatTorus::origin() const { return {0, Vec::Zero(n_)}; }

std::optional<Mat> FlatTorus::complex_structure(const Point&) const {
  if (!kaehler_) return std::nullopt;
  Mat j = Mat::Zero(n_, n_);
  for (int a = 0; a < n_; a += 2) {
    j(a + 1, a) = 1.0;   // J e_a = e_{a+1}
    j(a, a + 1) = -1.0;  // J e_{a+1} = -e_a
  }
  return j;
}

// ---------------------------------------------------------------------------
// Round sphere

RoundSphere::RoundSphere(int n) : n_(n) { check_dim(n, kMaxDim, "sphere"); }

std::string RoundSphere::name() const { return "sphere:" + std::to_string(n_); }

bool RoundSphere::contains(const Point& p) const {
  return (p.chart == 0 || p.chart == 1) && p.dim() == n_ && p.coords.allFinite() &&
         p.coords.squaredNorm() < 1e4;
}

Mat RoundSphere::metric(const Point& p) const {
  const double lambda = 2.0 / (1.0 + p.coords.squaredNorm());
  return lambda * lambda * Mat::Identity(n_, n_);
}

std::optional<Christoffel> RoundSphere::christoffel_closed_form(const Point& p) const {
  // sigma = log 2 - log(1 + |x|^2)
  const Vec dsigma = -2.0 * p.coords / (1.0 + p.coords.squaredNorm());
  return conformal_christoffel(dsigma);
}

std::optional<Vec> RoundSphere::riemann_closed_form(const Point& p, const Vec& x, const Vec& y,
                                                    const Vec& z) const {
  return constant_curvature(metric(p), 1.0, x, y, z);
}

void RoundSphere::recenter(Point& p, Carry& vectors) const {
  const double r2 = p.coords.squaredNorm();
  if (r2 <= kSwitchRadius * kSwitchRadius) return;
  // Inversion x -> x/|x|^2 is the transition map in both directions.
  const Vec x = p.coords;
  const Mat d = Mat::Identity(n_, n_) / r2 - 2.0 * x * x.transpose() / (r2 * r2);
  if (vectors.cols() > 0) vectors = (d * vectors).eval();
  p.coords = x / r2;
  p.chart = 1 - p.chart;
}

AmbientVec RoundSphere::embed(const Point& p) const {
  const double r2 = p.coords.squaredNorm();
  AmbientVec x(n_ + 1);
  x.head(n_) = 2.0 * p.coords / (1.0 + r2);
  const double h = (r2 - 1.0) / (1.0 + r2);
  x[n_] = p.chart == 0 ? h : -h;
  return x;
}

AmbientMat RoundSphere::tangent_map(const Point& p) const {
  const double r2 = p.coords.squaredNorm();
  const double s = 1.0 + r2;
  AmbientMat j(n_ + 1, n_);
  j.topRows(n_) = 2.0 / s * Mat::Identity(n_, n_) - 4.0 / (s * s) * p.coords * p.coords.transpose();
  const double sign = p.chart == 0 ? 1.0 : -1.0;
  j.row(n_) = sign * 4.0 / (s * s) * p.coords.transpose();
  return j;
}

Point RoundSphere::from_embedding(const AmbientVec& x) const {
  const double z = x[n_];
  // |x_chart0| > 1.5  <=>  z > 1.25 / 3.25
  constexpr double kSwitchHeight = (kSwitchRadius * kSwitchRadius - 1.0) /
                                   (kSwitchRadius * kSwitchRadius + 1.0);
  if (z <= kSwitchHeight) return {0, x.head(n_) / (1.0 - z)};
  return {1, x.head(n_) / (1.0 + z)};
}

Point RoundSphere::sample_point(Rng& rng) const {
  std::normal_distribution<double> normal;
  AmbientVec x(n_ + 1);
  double norm = 0.0;
  do {
    for (int i = 0; i <= n_; ++i) x[i] = normal(rng);
    norm = x.norm();
  } while (norm < 1e-12);
  return from_embedding(x / norm);
}

Point RoundSphere::origin() const { return {0, Vec::Zero(n_)}; }

// ---------------------------------------------------------------------------
// Hyperbolic space

HyperbolicSpace::HyperbolicSpace(int n) : n_(n) { check_dim(n, kMaxDim, "hyperbolic"); }

std::string HyperbolicSpace::name() const { return "hyperbolic:" + std::to_string(n_); }

bool HyperbolicSpace::contains(const Point& p) const {
  if (p.chart != 0 || p.dim() != n_ || !p.coords.allFinite()) return false;
  const double y = p.coords[n_ - 1];
  return y > 1e-8 && y < 1e8;
}

Mat HyperbolicSpace::metric(const Point& p) const {
  const double y = p.coords[n_ - 1];
  return Mat::Identity(n_, n_) / (y * y);
}

std::optional<Christoffel> HyperbolicSpace::christoffel_closed_form(const Point& p) const {
  // sigma = -log y
  Vec dsigma = Vec::Zero(n_);
  dsigma[n_ - 1] = -1.0 / p.coords[n_ - 1];
  return conformal_christoffel(dsigma);
}

std::optional<Vec> HyperbolicSpace::riemann_closed_form(const Point& p, const Vec& x,
                                                        const Vec& y, const Vec& z) const {
  return constant_curvature(metric(p), -1.0, x, y, z);
}

AmbientVec HyperbolicSpace::embed(const Point& p) const {
  AmbientVec x = p.coords;
  x[n_ - 1] = std::log(p.coords[n_ - 1]);
  return x;
}

AmbientMat HyperbolicSpace::tangent_map(const Point& p) const {
  return AmbientMat::Identity(n_, n_) / p.coords[n_ - 1];
}

Point HyperbolicSpace::sample_point(Rng&) const {
  throw NonCompactError(name() + " is not compact: no normalized volume measure");
}

Point HyperbolicSpace::sample_probe_point(Rng& rng) const {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Point p{0, Vec(n_)};
  for (int i = 0; i + 1 < n_; ++i) p.coords[i] = u(rng);
  p.coords[n_ - 1] = std::exp(0.5 * u(rng));
  return p;
}

Point HyperbolicSpace::origin() const {
  Point p{0, Vec::Zero(n_)};
  p.coords[n_ - 1] = 1.0;
  return p;
}

// ---------------------------------------------------------------------------
// Products

ProductManifold::ProductManifold(ModelPtr a, ModelPtr b)
    : a_(std::move(a)), b_(std::move(b)), na_(a_->dim()), nb_(b_->dim()) {
  if (na_ + nb_ > kMaxDim) throw DomainError("product dimension exceeds the supported maximum");
  if (a_->ambient_dim() + b_->ambient_dim() > kMaxAmbient) {
    throw DomainError("product embedding dimension exceeds the supported maximum");
  }
}

std::string ProductManifold::name() const { return "product:" + a_->name() + "x" + b_->name(); }

Point ProductManifold::first(const Point& p) const {
  return {p.chart % a_->chart_count(), p.coords.head(na_)};
}

Point ProductManifold::second(const Point& p) const {
  return {p.chart / a_->chart_count(), p.coords.tail(nb_)};
}

Point ProductManifold::join(const Point& a, const Point& b) const {
  Point p{a.chart + a_->chart_count() * b.chart, Vec(na_ + nb_)};
  p.coords.head(na_) = a.coords;
  p.coords.tail(nb_) = b.coords;
  return p;
}

bool ProductManifold::contains(const Point& p) const {
  return p.dim() == na_ + nb_ && p.chart >= 0 && p.chart < chart_count() &&
         a_->contains(first(p)) && b_->contains(second(p));
}

Mat ProductManifold::metric(const Point& p) const {
  Mat g = Mat::Zero(na_ + nb_, na_ + nb_);
  g.topLeftCorner(na_, na_) = a_->metric(first(p));
  g.bottomRightCorner(nb_, nb_) = b_->metric(second(p));
  return g;
}

std::optional<Christoffel> ProductManifold::christoffel_closed_form(const Point& p) const {
  auto ga = a_->christoffel_closed_form(first(p));
  auto gb = b_->christoffel_closed_form(second(p));
  if (!ga || !gb) return std::nullopt;
  Christoffel g(na_ + nb_);
  for (int k = 0; k < na_; ++k)
    for (int i = 0; i < na_; ++i)
      for (int j = 0; j < na_; ++j) g(k, i, j) = (*ga)(k, i, j);
  for (int k = 0; k < nb_; ++k)
    for (int i = 0; i < nb_; ++i)
      for (int j = 0; j < nb_; ++j) g(na_ + k, na_ + i, na_ + j) = (*gb)(k, i, j);
  return g;
}

std::optional<Vec> ProductManifold::riemann_closed_form(const Point& p, const Vec& x,
                                                        const Vec& y, const Vec& z) const {
  auto ra = a_->riemann_closed_form(first(p), x.head(na_), y.head(na_), z.head(na_));
  auto rb = b_->riemann_closed_form(second(p), x.tail(nb_), y.tail(nb_), z.tail(nb_));
  if (!ra || !rb) return std::nullopt;
  Vec r(na_ + nb_);
  r.head(na_) = *ra;
  r.tail(nb_) = *rb;
  return r;
}

void ProductManifold::recenter(Point& p, Carry& vectors) const {
  Point pa = first(p);
  Point pb = second(p);
  Carry va = vectors.topRows(na_);
  Carry vb = vectors.bottomRows(nb_);
  a_->recenter(pa, va);
  b_->recenter(pb, vb);
  p = join(pa, pb);
  vectors.topRows(na_) = va;
  vectors.bottomRows(nb_) = vb;
}

AmbientVec ProductManifold::embed(const Point& p) const {
  const AmbientVec xa = a_->embed(first(p));
  const AmbientVec xb = b_->embed(second(p));
  AmbientVec x(xa.size() + xb.size());
  x << xa, xb;
  return x;
}

AmbientMat ProductManifold::tangent_map(const Point& p) const {
  const AmbientMat ja = a_->tangent_map(first(p));
  const AmbientMat jb = b_->tangent_map(second(p));
  AmbientMat j = AmbientMat::Zero(ja.rows() + jb.rows(), na_ + nb_);
  j.topLeftCorner(ja.rows(), na_) = ja;
  j.bottomRightCorner(jb.rows(), nb_) = jb;
  return j;
}

Point ProductManifold::sample_point(Rng& rng) const {
  Point pa = a_->sample_point(rng);
  Point pb = b_->sample_point(rng);
  return join(pa, pb);
}

Point ProductManifold::sample_probe_point(Rng& rng) const {
  Point pa = a_->sample_probe_point(rng);
  Point pb = b_->sample_probe_point(rng);
  return join(pa, pb);
}

Point ProductManifold::origin() const { return join(a_->origin(), b_->origin()); }

std::optional<Mat> ProductManifold::complex_structure(const Point& p) const {
  auto ja = a_->complex_structure(first(p));
  auto jb = b_->complex_structure(second(p));
  if (!ja || !jb) return std::nullopt;
  Mat j = Mat::Zero(na_ + nb_, na_ + nb_);
  j.topLeftCorner(na_, na_) = *ja;
  j.bottomRightCorner(nb_, nb_) = *jb;
  return j;
}

// ---------------------------------------------------------------------------
// Registry

ModelPtr make_manifold(const std::string& name) {
  const auto colon = name.find(':');
  if (colon == std::string::npos) throw DomainError("unknown manifold '" + name + "'");
  const std::string kind = name.substr(0, colon);
  const std::string arg = name.substr(colon + 1);
  if (kind == "torus") return std::make_shared<FlatTorus>(parse_positive(arg), false);
  if (kind == "ctorus") return std::make_shared<FlatTorus>(parse_positive(arg), true);
  if (kind == "sphere") return std::make_shared<RoundSphere>(parse_positive(arg));
  if (kind == "hyperbolic") return std::make_shared<HyperbolicSpace>(parse_positive(arg));
  if (kind == "product") {
    // Factor names contain no 'x' of their own, so try every split point.
    for (std::size_t pos = arg.find('x'); pos != std::string::npos; pos = arg.find('x', pos + 1)) {
      try {
        auto a = make_manifold(arg.substr(0, pos));
        auto b = make_manifold(arg.substr(pos + 1));
        return std::make_shared<ProductManifold>(std::move(a), std::move(b));
      } catch (const DomainError&) {
      }
    }
    throw DomainError("cannot parse product manifold '" + name + "'");
  }
  throw DomainError("unknown manifold '" + name + "'");
}

}  // namespace pestov
