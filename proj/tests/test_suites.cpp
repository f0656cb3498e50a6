#include <doctest.h>

#include "pestov/suites.hpp"

using namespace pestov;

TEST_CASE("config text parsing") {
  const auto kv = parse_config_text(
      "# comment\nmanifold = torus:3\n\n  k=2  # trailing\nfd-step = 5e-4\n");
  CHECK(kv.size() == 3);
  CHECK(kv.at("manifold") == "torus:3");
  CHECK(kv.at("k") == "2");
  CHECK_THROWS_AS(parse_config_text("manifold torus:3\n"), DomainError);
}

TEST_CASE("settings") {
  SuiteConfig c;
  apply_setting(c, "manifold", "hyperbolic:2");
  apply_setting(c, "k", "2");
  apply_setting(c, "i", "2");
  apply_setting(c, "fd-step", "2.5e-4");
  apply_setting(c, "seed", "18446744073709551615");
  apply_setting(c, "convergence-steps", "1e-3, 5e-4,2.5e-4,1.25e-4");
  CHECK(c.manifold == "hyperbolic:2");
  CHECK(*c.i == 1);
  CHECK(c.fd_step == 2.5e-4);
  CHECK(c.seed == 18446744073709551615ULL);
  CHECK(c.convergence_steps.size() == 4);
  CHECK(c.numerical().fd_step == 2.5e-4);
  CHECK_THROWS_AS(apply_setting(c, "i", "0"), DomainError);
  CHECK_THROWS_AS(apply_setting(c, "fd-step", "-1"), DomainError);
  CHECK_THROWS_AS(apply_setting(c, "k", "two"), DomainError);
  CHECK_THROWS_AS(apply_setting(c, "samples", "1"), DomainError);
  CHECK_THROWS_AS(apply_setting(c, "colour", "red"), DomainError);
  CHECK_THROWS_AS(apply_setting(c, "convergence-steps", "1e-3,5e-4"), DomainError);
}

TEST_CASE("report records follow the schema") {
  SuiteConfig c;
  c.manifold = "sphere:2";
  c.k = 2;
  c.pairs = 2;
  const Report r = run_pointwise(c);
  CHECK(r.records.size() == 12);
  CHECK(r.ok());
  const Json j = r.to_json();
  const std::vector<std::string> keys{"identity_id", "manifold", "k",        "indices",
                                      "fd_step",     "residual", "scale",    "n_samples",
                                      "stderr",      "verdict",  "seed"};
  for (const auto& rec : j["records"]) {
    auto it = rec.begin();
    for (const auto& key : keys) {
      REQUIRE(it != rec.end());
      CHECK(it.key() == key);
      ++it;
    }
    for (int idx : rec["indices"]) {
      CHECK(idx >= 1);
      CHECK(idx <= 2);
    }
  }
  CHECK(j["summary"]["total"] == 12);
  CHECK(j["config"]["suite"] == "pointwise");
}

TEST_CASE("negative controls count as expected when they fail") {
  CheckRecord r;
  r.verdict = Verdict::kFail;
  r.expect_fail = true;
  CHECK(r.ok());
  r.verdict = Verdict::kPass;
  CHECK_FALSE(r.ok());
  Report rep;
  rep.records.push_back(r);
  CHECK_FALSE(rep.ok());
  CHECK(to_json(r)["expected"] == "FAIL");
}

TEST_CASE("non-finite numbers serialize as strings") {
  CheckRecord r;
  r.residual = std::numeric_limits<double>::quiet_NaN();
  r.scale = std::numeric_limits<double>::infinity();
  const Json j = to_json(r);
  CHECK(j["residual"] == "nan");
  CHECK(j["scale"] == "inf");
}

TEST_CASE("reports are independent of the thread count") {
  SuiteConfig c;
  c.manifold = "torus:2";
  c.k = 2;
  c.samples = 600;
  c.calibration_samples = 100;
  c.threads = 1;
  const std::string one = run_integrated(c).dump();
  c.threads = 3;
  const std::string three = run_integrated(c).dump();
  CHECK(one == three);
}

TEST_CASE("non-compact models skip the integrated suite") {
  SuiteConfig c;
  c.manifold = "hyperbolic:2";
  const Report r = run_integrated(c);
  CHECK_FALSE(r.records.empty());
  for (const auto& rec : r.records) CHECK(rec.verdict == Verdict::kSkip);
  CHECK(r.ok());
}

TEST_CASE("suite names and invalid configurations") {
  CHECK(is_suite_name("pointwise"));
  CHECK(is_suite_name("all"));
  CHECK_FALSE(is_suite_name(""));
  SuiteConfig c;
  c.k = 5;
  CHECK_THROWS_AS(run_pointwise(c), DomainError);
  CHECK_THROWS_AS(run_suite("bogus", SuiteConfig{}), DomainError);
}
