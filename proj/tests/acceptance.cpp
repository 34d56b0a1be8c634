// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "satisfice/cli.hpp"
#include "satisfice/policies.hpp"
#include "satisfice/simulation.hpp"
#include "satisfice/theory.hpp"

using namespace satisfice;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), pattern, args...);
  return buf;
}

// Exact integer comparison of n (E - R) in tenths against the published value.
Outcome worked_example() {
  struct Case { Count n; int e_tenths, r_tenths, expect_tenths; };
  const Case cases[] = {{7, 4, 7, -21}, {2, 6, 7, -2}, {7, 4, 3, 7}, {2, 6, 3, 6}};
  double worst = 0.0;
  bool rational_ok = true;
  for (const auto& c : cases) {
    const long tenths = static_cast<long>(c.n) * (c.e_tenths - c.r_tenths);
    rational_ok = rational_ok && tenths == c.expect_tenths;
    const double got = rs_value_of_mean(c.n, c.e_tenths / 10.0, c.r_tenths / 10.0);
    worst = std::max(worst, std::abs(got - c.expect_tenths / 10.0));
  }
  // Two of the four: integral tallies through rs_select.
  const std::vector<ArmStats> stats{{10, 4}, {2, 1}};
  const bool choice_ok = rs_select(stats, 0.7) == 1 && rs_select(stats, 0.3) == 0;
  return {rational_ok && worst <= 1e-12 && choice_ok,
          fmt("rational exact, max float error %.3g", worst)};
}

std::set<ArmIndex> tie_set(double a, double b) {
  if (a == b) return {0, 1};
  return {a > b ? ArmIndex{0} : ArmIndex{1}};
}

Outcome s0_equivalence() {
  long tuples = 0, mismatches = 0;
  for (Count aw = 0; aw <= 30; ++aw)
    for (Count al = 0; al <= 30; ++al)
      for (Count bw = 0; bw <= 30; ++bw)
        for (Count bl = 0; bl <= 30; ++bl) {
          ++tuples;
          const std::vector<ArmStats> s{{aw + al, aw}, {bw + bl, bw}};
          const auto s0_ties = tie_set(double(aw + bl), double(bw + al));
          const auto rs_ties = tie_set(rs_value(s[0], 0.5), rs_value(s[1], 0.5));
          if (s0_select(s) != rs_select(s, 0.5) || s0_ties != rs_ties) ++mismatches;
          if (aw + al + bw + bl > 0) {
            const auto [va, vb] = s0_values(aw, al, bw, bl);
            if (tie_set(va, vb) != rs_ties) ++mismatches;
          }
        }
  return {mismatches == 0, fmt("%ld tuples, %ld mismatches", tuples, mismatches)};
}

Outcome tow_identity() {
  long checked = 0, mismatches = 0;
  for (double r : {0.0, 0.25, 0.5, 0.9})
    for (Count n = 0; n <= 100; ++n)
      for (Count w = 0; w <= n; ++w) {
        ++checked;
        if (tow_value(w, n, r) != rs_value({n, w}, r)) ++mismatches;
      }
  return {mismatches == 0, fmt("%ld tuples, %ld mismatches", checked, mismatches)};
}

// Independent recomputation of the constant-R bound for two arms.
double two_arm_bound(double p1, double p2) {
  const double s = std::max(std::sqrt(p1 * (1 - p1)), std::sqrt(p2 * (1 - p2)));
  const double phi = (p1 - p2) / (2 * s);
  return (p1 - p2) * (0.5 + 1 / (phi * phi));
}

Outcome fig1_bound() {
  ExperimentConfig config;
  config.env = FixedProbs{{0.51, 0.49}};
  config.horizon = 100000;
  config.runs = 1000;
  config.base_seed = 42;
  const double oracle = two_arm_bound(0.51, 0.49);
  const auto agg = run_experiment(config);
  double worst = 0.0;
  bool bound_ok = true;
  for (const auto& row : agg) {
    worst = std::max(worst, row.mean_regret);
    bound_ok = bound_ok && row.bound && std::abs(*row.bound - oracle) < 1e-9;
  }
  return {bound_ok && worst < 50.0 && worst < oracle,
          fmt("max mean regret %.4f, bound %.4f, final %.4f", worst, oracle,
              agg.back().mean_regret)};
}

LogSchedule last_steps(Count horizon, Count window) {
  std::vector<Count> steps;
  for (Count t = horizon - window + 1; t <= horizon; ++t) steps.push_back(t);
  return LogSchedule::explicit_steps(std::move(steps));
}

Outcome tail_check(AspirationSpec aspiration) {
  ExperimentConfig config;
  config.env = FixedProbs{{0.8, 0.6, 0.4, 0.2}};
  config.policy.aspiration = std::move(aspiration);
  config.horizon = 10000;
  config.runs = 1000;
  config.base_seed = 42;
  config.log = last_steps(config.horizon, 1000);
  double sum = 0.0, worst = 1.0;
  for (Count run = 0; run < config.runs; ++run) {
    const auto trace = run_single(config, run);
    const double f = satisficing_check(trace, trace.probs, 0.5, 1000);
    sum += f;
    worst = std::min(worst, f);
  }
  const double mean = sum / static_cast<double>(config.runs);
  return {mean >= 0.99, fmt("mean tail fraction %.5f, worst run %.3f", mean, worst)};
}

Outcome prop1() { return tail_check(ConstantAspiration{0.5}); }

Outcome prop3() {
  constexpr double kPi = 3.14159265358979323846;
  auto schedule = AspirationSchedule::variable(
      [=](Count t) {
        return std::clamp(0.5 + 0.05 * std::sin(2 * kPi * double(t) / 250.0), 0.45, 0.55);
      },
      0.45, 0.55);
  return tail_check(schedule);
}

Outcome expected_changes() {
  constexpr int kSamples = 100000;
  RngStream rng(2718, 0);
  int passed = 0, total = 0;
  double worst_z = 0.0;
  auto check = [&](double expect, const std::function<double()>& draw) {
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < kSamples; ++i) {
      const double x = draw();
      sum += x;
      sq += x * x;
    }
    const double mean = sum / kSamples;
    const double se = std::sqrt(std::max(0.0, sq / kSamples - mean * mean) / kSamples);
    const double z = se > 0 ? std::abs(mean - expect) / se : (mean == expect ? 0 : INFINITY);
    worst_z = std::max(worst_z, z);
    ++total;
    if (z <= 3.0) ++passed;
  };
  for (auto [p, r] : {std::pair{0.7, 0.5}, std::pair{0.2, 0.6}, std::pair{0.5, 0.5},
                      std::pair{0.9, 0.1}, std::pair{0.35, 0.4}}) {
    const BernoulliBandit env({p, 0.0});
    check(expected_delta_rs(p, r), [&] { return pull(env, 0, rng) - r; });
  }
  struct QCase { double p; Count n, wins; };
  for (auto c : {QCase{0.8, 5, 2}, QCase{0.3, 10, 7}, QCase{0.5, 1, 1},
                 QCase{0.65, 40, 26}, QCase{0.1, 3, 0}}) {
    const BernoulliBandit env({c.p, 0.0});
    const double e = double(c.wins) / double(c.n);
    check(expected_delta_q(c.p, e, c.n), [&] {
      return double(c.wins + pull(env, 0, rng)) / double(c.n + 1) - e;
    });
  }
  return {passed == total, fmt("%d/%d within 3 sigma, max |z| %.2f", passed, total, worst_z)};
}

Outcome fig3_ordering() {
  const auto plan = cli::repro_plan(cli::Figure::kFig3, cli::Scale::kDesk, 42, 0);
  double rs_acc = 0, rs_regret = 0;
  double best_other_acc = -1, best_other_regret = INFINITY;
  std::string detail;
  for (const auto& e : plan) {
    const auto final_row = run_experiment(e.config).back();
    detail += fmt("%s acc=%.3f regret=%.1f; ", e.policy_label.c_str(), final_row.accuracy,
                  final_row.mean_regret);
    if (e.policy_label == "rs") {
      rs_acc = final_row.accuracy;
      rs_regret = final_row.mean_regret;
    } else {
      best_other_acc = std::max(best_other_acc, final_row.accuracy);
      best_other_regret = std::min(best_other_regret, final_row.mean_regret);
    }
  }
  if (!detail.empty()) detail.resize(detail.size() - 2);
  return {rs_acc > best_other_acc && rs_regret < best_other_regret, detail};
}

Outcome q_properties() {
  const boost::math::normal_distribution<double> z;
  double worst_err = 0.0;
  for (int i = 0; i <= 4000; ++i) {
    const double x = -20.0 + i * 0.01;
    worst_err = std::max(
        worst_err, std::abs(q_function(x) - boost::math::cdf(boost::math::complement(z, x))));
  }
  bool dominated = true;
  for (int i = 0; i < 10000; ++i) {
    const double x = 10.0 * i / 9999.0;
    dominated = dominated && q_function(x) <= chernoff_tail_bound(x);
  }
  const bool quantile = std::abs(q_function(1.959964) - 0.025) <= 1e-6 && q_function(0) == 0.5;
  return {worst_err <= 1e-12 && dominated && quantile,
          fmt("max |Q - reference| %.3g, Chernoff dominance %s", worst_err,
              dominated ? "holds" : "violated")};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Outcome (*check)();
  };
  const Criterion criteria[] = {
      {"worked-example exactness", worked_example},
      {"S0 equivalence oracle", s0_equivalence},
      {"TOW identity", tow_identity},
      {"regret bound respected (0.51/0.49)", fig1_bound},
      {"satisficing tail check, constant R", prop1},
      {"satisficing tail check, variable R", prop3},
      {"expected-change oracles", expected_changes},
      {"comparison ordering (K=100)", fig3_ordering},
      {"Q-function and Chernoff properties", q_properties},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s: %s (%s) [%.1fs]\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(),
                secs);
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
