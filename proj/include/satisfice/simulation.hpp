#pragma once

// Monte Carlo experiment runner: repeated independent runs of one policy on
// one environment family, aggregated into per-step accuracy and regret.

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "satisfice/bandit.hpp"
#include "satisfice/policies.hpp"

namespace satisfice {

struct FixedProbs {
  std::vector<double> probs;
};

// Probabilities drawn i.i.d. uniform on [0, 1) from each run's own stream
// before the first pull; draws with a tied maximum are repeated.
struct RandomProbs {
  std::size_t arms = 0;
};

using EnvSpec = std::variant<FixedProbs, RandomProbs>;

struct ConstantAspiration {
  double level = 0.5;
};
// (p_1st + p_2nd) / 2 of each run's true probabilities. Oracle knowledge.
struct OptimalAspiration {};
using AspirationSpec =
    std::variant<ConstantAspiration, OptimalAspiration, AspirationSchedule>;

struct PolicySpec {
  PolicyKind kind = PolicyKind::kRS;
  AspirationSpec aspiration = OptimalAspiration{};
  double c = 1e-5;
  // Unset: the run's true gap p_1st - p_2nd.
  std::optional<double> d;
  TieBreak tie_break = TieBreak::kLowestIndex;
};

class LogSchedule {
 public:
  // 1 and round(10^(k/2)) for k = 1, 2, ... up to the horizon, plus the
  // horizon itself.
  static LogSchedule geometric() { return LogSchedule(Kind::kGeometric, {}); }
  static LogSchedule every_step() { return LogSchedule(Kind::kAll, {}); }
  // Sorted, unique, within [1, horizon] once resolved.
  static LogSchedule explicit_steps(std::vector<Count> steps) {
    return LogSchedule(Kind::kExplicit, std::move(steps));
  }

  // Throws std::invalid_argument if explicit steps are unsorted, repeated or
  // outside [1, horizon].
  std::vector<Count> resolve(Count horizon) const;

  // "geometric", "all" or "explicit".
  std::string_view name() const;

 private:
  enum class Kind { kGeometric, kAll, kExplicit };
  LogSchedule(Kind kind, std::vector<Count> steps)
      : kind_(kind), steps_(std::move(steps)) {}
  Kind kind_;
  std::vector<Count> steps_;
};

struct ExperimentConfig {
  EnvSpec env = FixedProbs{};
  PolicySpec policy;
  Count horizon = 1;
  Count runs = 1;
  std::uint64_t base_seed = 0;
  LogSchedule log = LogSchedule::geometric();
  // 0 means one worker per hardware thread.
  unsigned threads = 0;

  // Throws std::invalid_argument describing the first problem found.
  void validate() const;
};

struct LoggedStep {
  Count step = 0;
  ArmIndex chosen = 0;
  bool chosen_is_optimal = false;
  // n_i(step) for every arm, after the step's pull.
  std::vector<Count> counts;
};

struct RunTrace {
  std::vector<double> probs;
  ArmIndex optimal = 0;
  std::vector<ArmStats> final_stats;
  std::vector<LoggedStep> logged;
};

struct StepAggregate {
  Count step = 0;
  double accuracy = 0.0;
  double mean_regret = 0.0;
  std::optional<double> bound;
};

// Failure inside a run, tagged with the run index and step.
class RunError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

RunTrace run_single(const ExperimentConfig& config, Count run_index);

// sum_i (p* - p_i) n_i
double regret_of_counts(std::span<const double> probs,
                        std::span<const Count> counts);

// Runs are split into fixed blocks that are reduced in run order, so the
// result is bit-identical for any thread count.
std::vector<StepAggregate> run_experiment(const ExperimentConfig& config);

// Fraction of the last `tail_window` logged choices that fall on arms with
// p_i > R. Throws std::invalid_argument if no arm exceeds R or the trace
// holds fewer than `tail_window` logged steps.
double satisficing_check(const RunTrace& trace, std::span<const double> probs,
                         double aspiration, Count tail_window);

// Probabilities the run with this index will face.
std::vector<double> draw_env(const EnvSpec& env, RngStream& rng);

// Theoretical regret bound applicable to this policy on these probabilities,
// if any: RS with the optimal level uses the constant-R bound, RS with a
// constant level or schedule strictly inside (p_2nd, p_1st) the
// bounded-variable one.
std::optional<double> applicable_bound(const PolicySpec& policy,
                                       std::span<const double> probs);

}  // namespace satisfice
