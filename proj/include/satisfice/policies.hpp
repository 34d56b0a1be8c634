#pragma once

// Action-selection rules for the K-armed Bernoulli bandit. Every selector is
// a pure function of the arm tallies, its parameters and (where it needs
// randomness) the caller's RngStream.

#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <utility>

#include "satisfice/bandit.hpp"

namespace satisfice {

// How greedy argmaxes resolve equal values. kLowestIndex never touches the
// random stream.
enum class TieBreak { kLowestIndex, kUniformRandom };

// Aspiration level R, either constant or a step-indexed schedule with
// declared bounds. Steps are 1-based: at(t) is the level used to choose the
// t-th action.
class AspirationSchedule {
 public:
  using StepFunction = std::function<double(Count)>;

  static AspirationSchedule constant(double level);
  // Throws std::invalid_argument if r_min > r_max.
  static AspirationSchedule variable(StepFunction level_of_step, double r_min,
                                     double r_max);

  bool is_constant() const { return !level_of_step_; }
  double min() const { return r_min_; }
  double max() const { return r_max_; }

  // Throws std::out_of_range if a variable schedule leaves [min, max].
  double at(Count step) const;

 private:
  AspirationSchedule(StepFunction f, double r_min, double r_max)
      : level_of_step_(std::move(f)), r_min_(r_min), r_max_(r_max) {}

  StepFunction level_of_step_;
  double r_min_;
  double r_max_;
};

// Score assigned to an arm by one of the value functions below.
struct ArmEval {
  ArmIndex arm;
  double value;
};

// Annealing constants of the epsilon_n-greedy schedule; c > 0, 0 < d < 1.
class EpsilonGreedyParams {
 public:
  EpsilonGreedyParams(double c, double d);
  double c() const { return c_; }
  double d() const { return d_; }

 private:
  double c_;
  double d_;
};

// Running argmax over (arm, value) offers, honouring the tie rule. Under
// kUniformRandom the winner is uniform over all maximal offers (reservoir
// sampling, one draw per tie encountered).
class ArgmaxTracker {
 public:
  ArgmaxTracker(TieBreak tie_break, RngStream* rng)
      : tie_break_(tie_break), rng_(rng) {}

  void offer(ArmIndex arm, double value);
  bool empty() const { return ties_ == 0; }
  ArmIndex best() const { return best_; }
  double best_value() const { return best_value_; }

 private:
  TieBreak tie_break_;
  RngStream* rng_;
  ArmIndex best_ = 0;
  double best_value_ = 0.0;
  Count ties_ = 0;
};

// ---- value functions --------------------------------------------------------

// n (E - R), evaluated in the reward-sum form wins - n R. Zero for n = 0.
double rs_value(const ArmStats& stats, double aspiration);
// n (E - R) for an arbitrary (possibly non-integral) sample mean.
double rs_value_of_mean(Count n, double mean, double aspiration);

// E + sqrt(2 ln(total) / n). Throws std::domain_error for untried arms.
double ucb1_value(const ArmStats& stats, Count total_steps);

// E + sqrt(ln(total) / n * min{1/4, V}), V = E(1-E) + sqrt(2 ln(total) / n).
double ucb1t_value(const ArmStats& stats, Count total_steps);

// min{1, cK / (d^2 n)} for the 1-based step n.
double epsilon_n(const EpsilonGreedyParams& params, std::size_t arms,
                 Count step);

// Comparative values of the two-action S0 model for actions A and B.
// Throws std::domain_error when all counts are zero.
std::pair<double, double> s0_values(Count a_wins, Count a_losses, Count b_wins,
                                    Count b_losses);

// Tug-of-war sum form: reward_sum - n * k_param.
double tow_value(Count reward_sum, Count n, double k_param);

// ---- selectors --------------------------------------------------------------

ArmIndex rs_select(std::span<const ArmStats> stats, double aspiration,
                   TieBreak tie_break = TieBreak::kLowestIndex,
                   RngStream* rng = nullptr);

// Greedy on the mean reward when some tried arm has E > R, otherwise uniform
// over all arms.
ArmIndex ps_select(std::span<const ArmStats> stats, double aspiration,
                   RngStream& rng, TieBreak tie_break = TieBreak::kLowestIndex);

// Greedy on the mean reward over tried arms; uniform if nothing is tried.
ArmIndex greedy_select(std::span<const ArmStats> stats, RngStream& rng,
                       TieBreak tie_break = TieBreak::kLowestIndex);

// Untried arms are pulled first, in index order; then argmax of UCB1.
ArmIndex ucb1_select(std::span<const ArmStats> stats,
                     TieBreak tie_break = TieBreak::kLowestIndex,
                     RngStream* rng = nullptr);
ArmIndex ucb1t_select(std::span<const ArmStats> stats,
                      TieBreak tie_break = TieBreak::kLowestIndex,
                      RngStream* rng = nullptr);

// With probability epsilon_n a uniform arm, otherwise greedy_select. Always
// consumes one draw for the coin.
ArmIndex epsilon_greedy_select(std::span<const ArmStats> stats,
                               const EpsilonGreedyParams& params, Count step,
                               RngStream& rng,
                               TieBreak tie_break = TieBreak::kLowestIndex);

// Two-arm S0 choice: A (index 0) wins when a_A^1 + a_B^0 > a_B^1 + a_A^0.
// Throws std::invalid_argument unless exactly two arms are given.
ArmIndex s0_select(std::span<const ArmStats> stats,
                   TieBreak tie_break = TieBreak::kLowestIndex,
                   RngStream* rng = nullptr);

// ---- uniform dispatch -------------------------------------------------------

enum class PolicyKind { kRS, kPS, kGreedy, kUCB1, kUCB1Tuned, kEpsilonGreedy, kS0 };

std::string_view policy_name(PolicyKind kind);
std::optional<PolicyKind> parse_policy(std::string_view name);

struct PolicyParams {
  PolicyKind kind = PolicyKind::kRS;
  AspirationSchedule aspiration = AspirationSchedule::constant(0.5);
  std::optional<EpsilonGreedyParams> epsilon;
  TieBreak tie_break = TieBreak::kLowestIndex;
};

// Chooses the arm for the 1-based `step`, given tallies of the steps before.
// Throws std::invalid_argument if a required parameter is missing.
ArmIndex select_arm(const PolicyParams& params, std::span<const ArmStats> stats,
                    Count step, RngStream& rng);

}  // namespace satisfice
