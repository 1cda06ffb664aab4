#include <catch_amalgamated.hpp>

#include <cmath>

#include "geodp/harness.hpp"

using namespace geodp;

TEST_CASE("candidate set shape") {
  std::vector<Histogram> c = error_candidates(5, 3.0, 1);
  REQUIRE(c.size() == 1 + 2 * 5 + 32);
  REQUIRE(c[0].x.lpNorm<1>() == 0.0);
  for (std::size_t i = 1; i <= 10; ++i) REQUIRE(c[i].x.lpNorm<1>() == 3.0);
  for (std::size_t i = 11; i < c.size(); ++i) {
    REQUIRE(c[i].x.lpNorm<1>() == 3.0);  // floor(n) balls
    REQUIRE(c[i].integral);
    REQUIRE(c[i].x.minCoeff() >= 0.0);
  }
  // deterministic per seed
  std::vector<Histogram> c2 = error_candidates(5, 3.0, 1);
  for (std::size_t i = 0; i < c.size(); ++i) REQUIRE(c[i].x == c2[i].x);
}

TEST_CASE("trial seeds are pure functions of (seed, candidate, trial)") {
  REQUIRE(trial_seed(1, 2, 3) == trial_seed(1, 2, 3));
  REQUIRE(trial_seed(1, 2, 3) != trial_seed(1, 2, 4));
  REQUIRE(trial_seed(1, 2, 3) != trial_seed(1, 3, 3));
  REQUIRE(trial_seed(2, 2, 3) != trial_seed(1, 2, 3));
}

TEST_CASE("gaussian estimate matches the analytic value") {
  const PrivacyParams pp(1.0, 1e-4);
  Workload w = gen_workload("random_counting", 3, 6, 4);
  Mechanism mech = make_mechanism("gaussian", w.A, pp);
  ErrorEstimate est = evaluate_error(mech, "gaussian", w.A, 2.0, 2000, 9);
  const double analytic = analytic_error(build_noise_spec(decompose(w.A), pp));
  REQUIRE(std::abs(est.max_mse - analytic) <= 3.0 * est.std_error + 0.05 * analytic);
  REQUIRE(est.trials == 2000);
  // noise-oblivious: every candidate sees the same distribution
  for (double m : est.candidate_mse)
    REQUIRE(m == Catch::Approx(analytic).epsilon(0.2));
}

TEST_CASE("estimate invariants") {
  const PrivacyParams pp(1.0, 1e-6);
  Workload w = gen_workload("random_counting", 3, 6, 4);
  Mechanism mech = make_mechanism("lse", w.A, pp);
  ErrorEstimate est = evaluate_error(mech, "lse", w.A, 2.0, 150, 5);
  for (double m : est.candidate_mse) REQUIRE(est.max_mse >= m - 1e-12);
  REQUIRE_THROWS_AS(evaluate_error(mech, "lse", w.A, 2.0, 50, 5), ConfigError);
  REQUIRE_THROWS_AS(make_mechanism("nope", w.A, pp), ConfigError);
}

TEST_CASE("parallel evaluation reproduces the serial estimate exactly") {
  const PrivacyParams pp(1.0, 1e-6);
  Workload w = gen_workload("random_counting", 4, 8, 6);
  Mechanism mech = make_mechanism("gaussian", w.A, pp);
  ErrorEstimate serial = evaluate_error(mech, "gaussian", w.A, 2.0, 400, 11, 1);
  ErrorEstimate parallel = evaluate_error(mech, "gaussian", w.A, 2.0, 400, 11, 4);
  REQUIRE(serial.max_mse == parallel.max_mse);
  REQUIRE(serial.candidate_mse == parallel.candidate_mse);
  REQUIRE(serial.std_error == parallel.std_error);
}

TEST_CASE("corpus runner") {
  nlohmann::json config{
      {"seed", 3},
      {"trials", 120},
      {"eps", 1.0},
      {"delta", 1e-6},
      {"n", 2.0},
      {"workloads",
       {{{"kind", "identity"}, {"d", 3}, {"N", 3}},
        {{"kind", "random_counting"}, {"d", 4}, {"N", 6}, {"seed", 5}}}},
      {"mechanisms", {"gaussian", "lse"}}};

  CorpusResult r1 = run_corpus(config);
  REQUIRE(r1.bundle["schema"] == "geodp-report/1");
  REQUIRE(r1.bundle["results"].size() == 2);
  for (const auto& entry : r1.bundle["results"]) {
    REQUIRE(entry["estimates"].size() == 2);
    REQUIRE(entry.contains("lowerbound"));
  }
  REQUIRE(r1.assertions_ok);

  SECTION("byte-identical reruns") {
    CorpusResult r2 = run_corpus(config);
    REQUIRE(r1.bundle.dump() == r2.bundle.dump());
  }
  SECTION("serial and parallel runs agree byte for byte") {
    nlohmann::json par = config;
    par["threads"] = 4;
    CorpusResult r2 = run_corpus(par);
    REQUIRE(r1.bundle["results"].dump() == r2.bundle["results"].dump());
  }
  SECTION("empty corpus") {
    nlohmann::json empty{{"workloads", nlohmann::json::array()}};
    CorpusResult r = run_corpus(empty);
    REQUIRE(r.bundle["results"].empty());
    REQUIRE(r.assertions_ok);
  }
  SECTION("assertions flip the exit status") {
    nlohmann::json bad = config;
    bad["assertions"] = {{{"type", "max_error"}, {"value", 1e-12}}};
    REQUIRE_FALSE(run_corpus(bad).assertions_ok);
    nlohmann::json good = config;
    good["assertions"] = {{{"type", "max_error"}, {"value", 1e12}}};
    REQUIRE(run_corpus(good).assertions_ok);
    nlohmann::json unknown = config;
    unknown["assertions"] = {{{"type", "mystery"}, {"value", 1.0}}};
    REQUIRE_THROWS_AS(run_corpus(unknown), InputError);
  }
}

TEST_CASE("corpus embeds version and calibration constants") {
  nlohmann::json config{{"workloads", nlohmann::json::array()}};
  CorpusResult r = run_corpus(config);
  REQUIRE(r.bundle["version"] == kVersion);
  REQUIRE(r.bundle["calibration"]["ratio_cal"] == cal::kRatioCal);
  REQUIRE(r.bundle["calibration"]["sandwich_lower"] == cal::kSandwichLower);
}
