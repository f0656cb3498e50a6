#include <doctest.h>

#include "pestov/corpus.hpp"
#include "pestov/integration.hpp"
#include "pestov/models.hpp"

#include <cmath>
#include <cstdlib>

using namespace pestov;

TEST_CASE("volume sampling integrates known moments") {
  const ModelPtr s = make_manifold("sphere:2");
  MCOptions mc;
  mc.n_samples = 20000;
  mc.seed = 4;
  // Normalized volume: E[z^2] = 1/3 on the unit sphere.
  const MCEstimate e = mc_integral(
      *s, [s](const Frame& f) { return std::pow(s->embed(f.base)[2], 2); }, 1, mc);
  CHECK(std::abs(e.mean - 1.0 / 3.0) <= 3.0 * e.stderr_);
  CHECK(e.n_samples == 20000);

  const ModelPtr t = make_manifold("torus:2");
  const MCEstimate c = mc_integral(
      *t, [t](const Frame& f) { return t->embed(f.base)[0]; }, 1, mc);
  CHECK(std::abs(c.mean) <= 3.0 * c.stderr_);
}

TEST_CASE("results do not depend on the worker count") {
  const ModelPtr m = make_manifold("sphere:2");
  const ScalarBundleFunction phi = function_corpus(m, 1)[0];
  MCOptions mc;
  mc.n_samples = 1500;
  mc.seed = 9;
  mc.threads = 1;
  const MCEstimate one = mc_integral(*m, [&](const Frame& f) { return phi(f); }, 2, mc);
  mc.threads = 3;
  const MCEstimate three = mc_integral(*m, [&](const Frame& f) { return phi(f); }, 2, mc);
  CHECK(one.mean == three.mean);
  CHECK(one.stderr_ == three.stderr_);
}

TEST_CASE("sample streams are reproducible and prefix-stable") {
  const ModelPtr m = make_manifold("torus:3");
  const auto a = sample_stream(*m, 2, 600, 5);
  const auto b = sample_stream(*m, 2, 300, 5);
  for (int s = 0; s < 300; ++s) {
    CHECK(a[s].base.coords == b[s].base.coords);
    CHECK(a[s].vectors == b[s].vectors);
  }
  CHECK_THROWS_AS(sample_stream(*make_manifold("hyperbolic:2"), 1, 10, 1), NonCompactError);
}

TEST_CASE("PESTOV_LAB_THREADS caps the worker count") {
  setenv("PESTOV_LAB_THREADS", "1", 1);
  CHECK(worker_count(0) == 1);
  CHECK(worker_count(8) == 1);
  unsetenv("PESTOV_LAB_THREADS");
  CHECK(worker_count(2) == 2);
}

TEST_CASE("statistical verdict and bias allowance") {
  MCEstimate e;
  e.mean = 0.3;
  e.stderr_ = 0.1;
  CHECK(statistical_verdict(e, 0.0) == Verdict::kPass);
  e.mean = 0.31;
  CHECK(statistical_verdict(e, 0.0) == Verdict::kFail);
  CHECK(statistical_verdict(e, 0.02) == Verdict::kPass);
  // d = (r_2h - r_h) / 3 is constant 1 here.
  const std::vector<double> at_h{0.0, 1.0, 2.0};
  const std::vector<double> at_2h{3.0, 4.0, 5.0};
  CHECK(bias_allowance(at_h, at_2h) == doctest::Approx(1.0));
  const NumericalOptions d = doubled_steps(NumericalOptions{});
  CHECK(d.fd_step == doctest::Approx(2e-4));
}

TEST_CASE("pairwise summary of constant values is exact") {
  const std::vector<double> v(1000, 0.1);
  const MCEstimate e = summarize(v, 1);
  CHECK(e.mean == doctest::Approx(0.1).epsilon(1e-15));
  CHECK(e.stderr_ == doctest::Approx(0.0));
}

TEST_CASE("integrated identities hold on small runs") {
  const ModelPtr m = make_manifold("torus:2");
  const auto corpus = function_corpus(m, 2);
  const auto fields = semibasic_corpus(m, 2);
  IntegratedOptions options;
  options.mc.n_samples = 3000;
  options.mc.seed = 3;
  options.calibration_samples = 200;
  const IntegrandInputs inputs{corpus[1], corpus[2], fields[0]};
  const std::vector<IntegratedSpec> specs{{IdentityId::kDivHVanishes, -1, -1},
                                          {IdentityId::kFlowByParts, 0, -1},
                                          {IdentityId::kIntPestov, 0, 1},
                                          {IdentityId::kBundlePestov, -1, -1}};
  const auto results = integrated_residuals(specs, m, inputs, 2, options);
  REQUIRE(results.size() == 4);
  for (const auto& r : results) {
    CAPTURE(to_string(r.spec.id));
    CHECK(r.verdict == Verdict::kPass);
    CHECK(r.estimate.n_samples == 3000);
    CHECK(r.estimate.stderr_ > 0.0);
  }
  CHECK_THROWS_AS(integrated_residuals(specs, make_manifold("hyperbolic:2"), inputs, 2, options),
                  NonCompactError);
}

TEST_CASE("an integrand with non-zero mean fails the zero-mean test") {
  const ModelPtr m = make_manifold("sphere:2");
  const ScalarBundleFunction phi = function_corpus(m, 6)[0];
  MCOptions mc;
  mc.n_samples = 4000;
  const MCEstimate e = mc_integral(*m, [&](const Frame& f) { return phi(f) * phi(f) + 0.1; }, 1, mc);
  CHECK(statistical_verdict(e, 0.0) == Verdict::kFail);
}

TEST_CASE("invariant identity: flat torus fiber functions and curved-space skips") {
  const ModelPtr torus = make_manifold("torus:2");
  IntegratedOptions options;
  options.mc.n_samples = 500;
  options.calibration_samples = 100;
  for (const auto& phi : fiber_only_corpus(2, 3)) {
    const IntegratedResult r = invariant_identity(torus, phi, 2, 0, options);
    CAPTURE(phi.name);
    CHECK(r.verdict == Verdict::kPass);
    CHECK(std::abs(r.lhs) < 1e-8);
    CHECK(std::abs(r.rhs) < 1e-8);
  }
  const ModelPtr s = make_manifold("sphere:2");
  for (const auto& phi : function_corpus(s, 3)) {
    const IntegratedResult r = invariant_identity(s, phi, 2, 1, options);
    CHECK(r.verdict == Verdict::kSkip);
  }
  CHECK(invariant_identity(torus, fiber_only_corpus(2, 3)[0], 1, 0, options).verdict ==
        Verdict::kSkip);
  CHECK(invariant_identity(make_manifold("hyperbolic:2"), constant_function(1.0), 2, 0, options)
            .verdict == Verdict::kSkip);
}

TEST_CASE("invariant identity sides for a flow-invariant function on the torus") {
  const ModelPtr torus = make_manifold("torus:3");
  Rng rng(2);
  const Frame f = sample_fiber(*torus, torus->sample_point(rng), 3, rng);
  const auto sides = invariant_identity_sides(torus, fiber_only_corpus(3, 1)[1], f, 2);
  CHECK(sides[0] == doctest::Approx(0.0));
  CHECK(sides[1] == 0.0);
}
