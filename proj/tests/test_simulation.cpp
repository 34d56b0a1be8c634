#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "satisfice/simulation.hpp"
#include "satisfice/theory.hpp"

using namespace satisfice;

namespace {

ExperimentConfig rs_config(std::vector<double> probs, Count horizon, Count runs) {
  ExperimentConfig config;
  config.env = FixedProbs{std::move(probs)};
  config.horizon = horizon;
  config.runs = runs;
  config.base_seed = 42;
  config.threads = 1;
  return config;
}

}  // namespace

TEST_CASE("RS on a deterministic pair locks on after one step") {
  auto config = rs_config({1.0, 0.0}, 200, 20);
  config.log = LogSchedule::every_step();
  const auto agg = run_experiment(config);
  REQUIRE(agg.size() == 200);
  for (const auto& row : agg) {
    CHECK(row.accuracy == 1.0);
    CHECK(row.mean_regret == 0.0);
    REQUIRE(row.bound.has_value());
    CHECK(*row.bound == 0.5);
  }
}

TEST_CASE("horizon of one") {
  auto config = rs_config({0.3, 0.6}, 1, 5);
  const auto agg = run_experiment(config);
  REQUIRE(agg.size() == 1);
  CHECK(agg[0].step == 1);
  // Every arm untried: RS takes arm 0, the worse one.
  CHECK(agg[0].accuracy == 0.0);
  CHECK(agg[0].mean_regret == doctest::Approx(0.3));
}

TEST_CASE("geometric log schedule") {
  CHECK(LogSchedule::geometric().resolve(100) ==
        std::vector<Count>{1, 3, 10, 32, 100});
  CHECK(LogSchedule::geometric().resolve(50) == std::vector<Count>{1, 3, 10, 32, 50});
  CHECK(LogSchedule::geometric().resolve(1) == std::vector<Count>{1});
  CHECK(LogSchedule::every_step().resolve(3) == std::vector<Count>{1, 2, 3});
  CHECK_THROWS_AS(LogSchedule::explicit_steps({3, 2}).resolve(5), std::invalid_argument);
  CHECK_THROWS_AS(LogSchedule::explicit_steps({0}).resolve(5), std::invalid_argument);
  CHECK_THROWS_AS(LogSchedule::explicit_steps({6}).resolve(5), std::invalid_argument);
}

TEST_CASE("results are identical across repeats and thread counts") {
  for (auto kind : {PolicyKind::kRS, PolicyKind::kPS, PolicyKind::kUCB1Tuned,
                    PolicyKind::kEpsilonGreedy}) {
    ExperimentConfig config;
    config.env = RandomProbs{5};
    config.policy.kind = kind;
    config.horizon = 2000;
    config.runs = 70;
    config.base_seed = 9;
    config.threads = 1;
    const auto one = run_experiment(config);
    const auto again = run_experiment(config);
    config.threads = 4;
    const auto four = run_experiment(config);
    REQUIRE(one.size() == four.size());
    for (std::size_t k = 0; k < one.size(); ++k) {
      CHECK(one[k].accuracy == again[k].accuracy);
      CHECK(one[k].mean_regret == again[k].mean_regret);
      CHECK(one[k].accuracy == four[k].accuracy);
      CHECK(one[k].mean_regret == four[k].mean_regret);
      CHECK(one[k].bound == four[k].bound);
    }
    config.base_seed = 10;
    const auto other = run_experiment(config);
    CHECK(other.back().mean_regret != one.back().mean_regret);
  }
}

TEST_CASE("regret_of_counts") {
  const std::vector<double> probs{0.6, 0.4};
  CHECK(regret_of_counts(probs, std::vector<Count>{7, 3}) == doctest::Approx(0.6));
  CHECK(regret_of_counts(probs, std::vector<Count>{10, 0}) == 0.0);
  const std::vector<double> three{0.2, 0.9, 0.5};
  CHECK(regret_of_counts(three, std::vector<Count>{1, 0, 2}) == doctest::Approx(1.5));
  CHECK_THROWS_AS(regret_of_counts(probs, std::vector<Count>{1}), std::invalid_argument);
}

TEST_CASE("single runs conserve counts and accumulate regret monotonically") {
  for (auto kind : {PolicyKind::kRS, PolicyKind::kGreedy, PolicyKind::kUCB1, PolicyKind::kS0}) {
    auto config = rs_config({0.55, 0.45}, 500, 1);
    config.policy.kind = kind;
    config.log = LogSchedule::every_step();
    for (Count run = 0; run < 5; ++run) {
      const auto trace = run_single(config, run);
      REQUIRE(trace.logged.size() == 500);
      double prev = 0.0;
      for (const auto& entry : trace.logged) {
        Count total = 0;
        for (Count c : entry.counts) total += c;
        REQUIRE(total == entry.step);
        const double regret = regret_of_counts(trace.probs, entry.counts);
        REQUIRE(regret >= prev);
        prev = regret;
      }
      Count total = 0;
      for (const auto& s : trace.final_stats) total += s.n;
      CHECK(total == 500);
    }
  }
}

TEST_CASE("run_single agrees with run_experiment for one run") {
  auto config = rs_config({0.7, 0.5, 0.3}, 300, 1);
  const auto trace = run_single(config, 0);
  const auto agg = run_experiment(config);
  REQUIRE(agg.size() == trace.logged.size());
  for (std::size_t k = 0; k < agg.size(); ++k) {
    CHECK(agg[k].accuracy == (trace.logged[k].chosen_is_optimal ? 1.0 : 0.0));
    CHECK(agg[k].mean_regret ==
          doctest::Approx(regret_of_counts(trace.probs, trace.logged[k].counts)));
  }
}

TEST_CASE("satisficing_check") {
  RunTrace trace;
  trace.probs = {0.8, 0.6, 0.2};
  for (Count t = 1; t <= 10; ++t) {
    trace.logged.push_back({t, t <= 4 ? ArmIndex{2} : ArmIndex{t % 2}, false, {}});
  }
  CHECK(satisficing_check(trace, trace.probs, 0.5, 6) == 1.0);
  CHECK(satisficing_check(trace, trace.probs, 0.5, 10) == doctest::Approx(0.6));
  CHECK(satisficing_check(trace, trace.probs, 0.7, 6) == doctest::Approx(0.5));
  CHECK_THROWS_AS(satisficing_check(trace, trace.probs, 0.9, 6), std::invalid_argument);
  CHECK_THROWS_AS(satisficing_check(trace, trace.probs, 0.5, 11), std::invalid_argument);
  CHECK_THROWS_AS(satisficing_check(trace, trace.probs, 0.5, 0), std::invalid_argument);
}

TEST_CASE("uniform choice scores about 1/2 on the satisficing check") {
  // PS with an unreachable aspiration never exploits, so it picks uniformly.
  auto config = rs_config({0.8, 0.6, 0.4, 0.2}, 4000, 1);
  config.policy.kind = PolicyKind::kPS;
  config.policy.aspiration = ConstantAspiration{1.0};
  config.log = LogSchedule::explicit_steps([] {
    std::vector<Count> s;
    for (Count t = 3001; t <= 4000; ++t) s.push_back(t);
    return s;
  }());
  double sum = 0.0;
  for (Count run = 0; run < 20; ++run) {
    const auto trace = run_single(config, run);
    sum += satisficing_check(trace, trace.probs, 0.5, 1000);
  }
  CHECK(std::abs(sum / 20 - 0.5) < 0.03);
}

TEST_CASE("random environments are drawn per run without tied maxima") {
  ExperimentConfig config;
  config.env = RandomProbs{10};
  config.horizon = 1;
  config.base_seed = 3;
  const auto a = run_single(config, 0);
  const auto b = run_single(config, 1);
  CHECK(a.probs.size() == 10);
  CHECK(a.probs != b.probs);
  CHECK(run_single(config, 0).probs == a.probs);

  RngStream rng(1, 1);
  for (int i = 0; i < 1000; ++i) {
    const auto probs = draw_env(RandomProbs{2}, rng);
    REQUIRE(probs[0] != probs[1]);
    for (double p : probs) REQUIRE((p >= 0.0 && p < 1.0));
  }
}

TEST_CASE("applicable_bound") {
  const std::vector<double> probs{0.8, 0.2};
  PolicySpec rs;
  CHECK(*applicable_bound(rs, probs) == doctest::Approx(regret_upper_bound(probs).total));
  rs.aspiration = ConstantAspiration{0.6};
  CHECK(*applicable_bound(rs, probs) ==
        doctest::Approx(regret_upper_bound_variable(probs, 0.6, 0.6).total));
  rs.aspiration = ConstantAspiration{0.9};
  CHECK_FALSE(applicable_bound(rs, probs).has_value());
  rs.aspiration = AspirationSchedule::variable([](Count) { return 0.5; }, 0.4, 0.6);
  CHECK(*applicable_bound(rs, probs) == doctest::Approx(2.7));
  PolicySpec ucb;
  ucb.kind = PolicyKind::kUCB1;
  CHECK_FALSE(applicable_bound(ucb, probs).has_value());
}

TEST_CASE("config validation") {
  auto config = rs_config({0.6, 0.4}, 10, 1);
  CHECK_NOTHROW(config.validate());
  config.horizon = 0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = rs_config({0.6}, 10, 1);
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = rs_config({0.6, 0.4, 0.2}, 10, 1);
  config.policy.kind = PolicyKind::kS0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = rs_config({0.5, 0.5}, 10, 1);
  config.policy.kind = PolicyKind::kEpsilonGreedy;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config.policy.d = 0.1;
  CHECK_NOTHROW(config.validate());
  config.runs = 0;
  CHECK_THROWS_AS(run_experiment(config), std::invalid_argument);
}

TEST_CASE("failures inside a run carry run and step context") {
  auto config = rs_config({0.6, 0.4}, 50, 3);
  config.policy.aspiration =
      AspirationSchedule::variable([](Count t) { return t < 20 ? 0.5 : 0.99; }, 0.45, 0.55);
  try {
    run_experiment(config);
    FAIL("expected a RunError");
  } catch (const RunError& e) {
    const std::string what = e.what();
    CHECK(what.find("run 0") != std::string::npos);
    CHECK(what.find("step 20") != std::string::npos);
  }
}
