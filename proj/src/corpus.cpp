#include "pestov/corpus.hpp"

#include <cmath>
#include <random>

namespace pestov {

namespace {

AmbientVec gaussian_ambient(int dim, double scale, Rng& rng) {
  std::normal_distribution<double> normal(0.0, scale);
  AmbientVec out(dim);
  for (int i = 0; i < dim; ++i) out[i] = normal(rng);
  return out;
}

Vec gaussian_vec(int dim, double scale, Rng& rng) {
  std::normal_distribution<double> normal(0.0, scale);
  Vec out(dim);
  for (int i = 0; i < dim; ++i) out[i] = normal(rng);
  return out;
}

using AmbientSquare = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxAmbient,
                                    kMaxAmbient>;

AmbientSquare symmetric_ambient(int dim, double scale, Rng& rng) {
  std::normal_distribution<double> normal(0.0, scale);
  AmbientSquare s(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j <= i; ++j) s(i, j) = s(j, i) = normal(rng);
  return s;
}

/// Ambient images of the frame vectors (columns).
AmbientMat ambient_frame(const ManifoldModel& m, const Frame& f) {
  return m.tangent_map(f.base) * f.vectors;
}

const char* family_name(CorpusFamily family) {
  switch (family) {
    case CorpusFamily::kTrigPoly: return "trig-poly";
    case CorpusFamily::kTrigBump: return "trig-bump";
    case CorpusFamily::kMixed: return "mixed";
  }
  return "?";
}

struct Coefficients {
  AmbientVec a, a2, d;
  double c = 0.0;
  std::vector<AmbientVec> b;
  AmbientSquare s;
};

Coefficients draw(const ManifoldModel& m, std::uint64_t seed) {
  const int big_n = m.ambient_dim();
  Rng rng(seed);
  Coefficients co;
  co.a = gaussian_ambient(big_n, 3.0, rng);
  co.a2 = gaussian_ambient(big_n, 3.0, rng);
  co.d = gaussian_ambient(big_n, 0.7, rng);
  co.c = std::uniform_real_distribution<double>(0.0, 2.0 * M_PI)(rng);
  for (int i = 0; i < kMaxDim; ++i) co.b.push_back(gaussian_ambient(big_n, 1.0, rng));
  co.s = symmetric_ambient(big_n, 0.5, rng);
  return co;
}

}  // namespace

Vec project_ambient(const ManifoldModel& m, const Point& p, const AmbientVec& a) {
  const AmbientMat j = m.tangent_map(p);
  return m.metric(p).ldlt().solve(j.transpose() * a);
}

ScalarBundleFunction corpus_function(ModelPtr m, CorpusFamily family, std::uint64_t seed) {
  ScalarBundleFunction out;
  out.name = std::string(family_name(family)) + "#" + std::to_string(seed);
  const Coefficients co = draw(*m, seed);
  switch (family) {
    case CorpusFamily::kTrigPoly:
      out.evaluate = [m, co](const Frame& f) {
        const AmbientVec x = m->embed(f.base);
        const AmbientMat v = ambient_frame(*m, f);
        double linear = 1.0;
        for (int i = 0; i < f.size(); ++i) linear += co.b[i].dot(v.col(i));
        double quadratic = 0.0;
        for (int i = 0; i < f.size(); ++i)
          for (int j = i; j < f.size(); ++j) quadratic += v.col(i).dot(co.s * v.col(j));
        return std::sin(co.a.dot(x) + co.c) * linear + 0.5 * std::cos(co.a2.dot(x)) * quadratic;
      };
      break;
    case CorpusFamily::kTrigBump:
      out.evaluate = [m, co](const Frame& f) {
        const AmbientVec x = m->embed(f.base);
        const AmbientMat v = ambient_frame(*m, f);
        const int last = f.size() - 1;
        const double bump = std::exp(-0.5 * (v.col(0) - co.d).squaredNorm());
        return std::cos(co.a.dot(x) + co.c) * bump + std::sin(co.a2.dot(x)) * co.b[0].dot(v.col(last));
      };
      break;
    case CorpusFamily::kMixed:
      out.evaluate = [m, co](const Frame& f) {
        const AmbientVec x = m->embed(f.base);
        const AmbientMat v = ambient_frame(*m, f);
        const int last = f.size() - 1;
        const double bump = std::exp(-0.5 * (v.col(last) - co.d).squaredNorm());
        const double poly = co.b[1].dot(v.col(0)) + v.col(0).dot(co.s * v.col(last));
        return std::sin(co.a.dot(x)) * std::cos(co.a2.dot(x) + co.c) + poly * bump;
      };
      break;
  }
  return out;
}

std::vector<ScalarBundleFunction> function_corpus(ModelPtr m, std::uint64_t seed) {
  std::seed_seq seq{seed, std::uint64_t{0x5eed}};
  std::uint64_t seeds[3];
  {
    std::uint32_t raw[6];
    seq.generate(raw, raw + 6);
    for (int i = 0; i < 3; ++i) seeds[i] = (std::uint64_t{raw[2 * i]} << 32) | raw[2 * i + 1];
  }
  return {corpus_function(m, CorpusFamily::kTrigPoly, seeds[0] % 1000000),
          corpus_function(m, CorpusFamily::kTrigBump, seeds[1] % 1000000),
          corpus_function(m, CorpusFamily::kMixed, seeds[2] % 1000000)};
}

std::vector<SemiBasicField> semibasic_corpus(ModelPtr m, std::uint64_t seed) {
  const Coefficients co = draw(*m, seed);
  SemiBasicField tangential;
  tangential.name = "projected-ambient#" + std::to_string(seed);
  tangential.evaluate = [m, co](const Frame& f) -> Vec {
    const AmbientVec x = m->embed(f.base);
    const AmbientMat v = ambient_frame(*m, f);
    const double weight = std::sin(co.a.dot(x) + co.c) + co.b[0].dot(v.col(0));
    return weight * project_ambient(*m, f.base, co.d);
  };
  SemiBasicField framed;
  framed.name = "weighted-frame#" + std::to_string(seed);
  framed.evaluate = [m, co](const Frame& f) -> Vec {
    const AmbientVec x = m->embed(f.base);
    const AmbientMat v = ambient_frame(*m, f);
    const int last = f.size() - 1;
    const double w0 = std::cos(co.a2.dot(x)) * std::exp(-0.5 * (v.col(0) - co.d).squaredNorm());
    const double w1 = std::sin(co.a.dot(x)) * co.b[1].dot(v.col(last));
    return w0 * f.vectors.col(0) + w1 * f.vectors.col(last) +
           std::cos(co.a.dot(x) + co.c) * project_ambient(*m, f.base, co.b[2]);
  };
  return {tangential, framed};
}

std::vector<ScalarBundleFunction> fiber_only_corpus(int n, std::uint64_t seed) {
  Rng rng(seed);
  const Vec a = gaussian_vec(n, 1.5, rng);
  const Vec b = gaussian_vec(n, 1.5, rng);
  const Vec c = gaussian_vec(n, 1.0, rng);
  const Vec d = gaussian_vec(n, 0.7, rng);
  Mat s = Mat::Zero(n, n);
  {
    const Mat r = Mat::NullaryExpr(n, n, [&rng]() {
      return std::normal_distribution<double>(0.0, 0.5)(rng);
    });
    s = 0.5 * (r + r.transpose());
  }
  ScalarBundleFunction wave;
  wave.name = "fiber-wave#" + std::to_string(seed);
  wave.evaluate = [a, b, s](const Frame& f) {
    const Vec v0 = f.vectors.col(0);
    const Vec v1 = f.vectors.col(f.size() > 1 ? 1 : 0);
    const Vec vl = f.vectors.col(f.size() - 1);
    return std::cos(a.dot(v0) + b.dot(v1)) * (1.0 + v0.dot(s * vl));
  };
  ScalarBundleFunction bump;
  bump.name = "fiber-bump#" + std::to_string(seed);
  bump.evaluate = [c, d](const Frame& f) {
    const Vec v0 = f.vectors.col(0);
    return std::exp(-0.5 * (v0 - d).squaredNorm()) * c.dot(f.vectors.col(f.size() - 1));
  };
  return {wave, bump};
}

ScalarBundleFunction constant_function(double c) {
  ScalarBundleFunction out;
  out.name = "constant";
  out.evaluate = [c](const Frame&) { return c; };
  return out;
}

}  // namespace pestov
