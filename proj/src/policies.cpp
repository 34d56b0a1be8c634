#include "satisfice/policies.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace satisfice {
namespace {

Count total_pulls(std::span<const ArmStats> stats) {
  Count total = 0;
  for (const auto& s : stats) total += s.n;
  return total;
}

void require_arms(std::span<const ArmStats> stats, const char* who) {
  if (stats.size() < 2) {
    throw std::invalid_argument(std::string(who) + ": need at least 2 arms");
  }
}

// First untried arm, if any.
std::optional<ArmIndex> first_untried(std::span<const ArmStats> stats) {
  for (ArmIndex i = 0; i < stats.size(); ++i) {
    if (stats[i].n == 0) return i;
  }
  return std::nullopt;
}

}  // namespace

AspirationSchedule AspirationSchedule::constant(double level) {
  if (!std::isfinite(level)) {
    throw std::invalid_argument("aspiration level must be finite");
  }
  return AspirationSchedule({}, level, level);
}

AspirationSchedule AspirationSchedule::variable(StepFunction level_of_step,
                                                double r_min, double r_max) {
  if (!level_of_step) throw std::invalid_argument("empty aspiration schedule");
  if (!(r_min <= r_max)) {
    throw std::invalid_argument("aspiration bounds require r_min <= r_max");
  }
  return AspirationSchedule(std::move(level_of_step), r_min, r_max);
}

double AspirationSchedule::at(Count step) const {
  if (!level_of_step_) return r_min_;
  const double level = level_of_step_(step);
  if (!(level >= r_min_ && level <= r_max_)) {
    throw std::out_of_range("aspiration schedule emitted " +
                            std::to_string(level) + " at step " +
                            std::to_string(step) + ", outside [" +
                            std::to_string(r_min_) + ", " +
                            std::to_string(r_max_) + "]");
  }
  return level;
}

EpsilonGreedyParams::EpsilonGreedyParams(double c, double d) : c_(c), d_(d) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw std::invalid_argument("epsilon-greedy requires c > 0");
  }
  if (!(d > 0.0 && d < 1.0)) {
    throw std::invalid_argument("epsilon-greedy requires 0 < d < 1");
  }
}

void ArgmaxTracker::offer(ArmIndex arm, double value) {
  if (ties_ == 0 || value > best_value_) {
    best_ = arm;
    best_value_ = value;
    ties_ = 1;
    return;
  }
  if (value == best_value_) {
    ++ties_;
    if (tie_break_ == TieBreak::kUniformRandom) {
      if (rng_ == nullptr) {
        throw std::invalid_argument("uniform tie-breaking needs a random stream");
      }
      if (rng_->next_index(ties_) == 0) best_ = arm;
    }
  }
}

double rs_value(const ArmStats& stats, double aspiration) {
  return static_cast<double>(stats.wins) -
         static_cast<double>(stats.n) * aspiration;
}

double rs_value_of_mean(Count n, double mean, double aspiration) {
  return static_cast<double>(n) * (mean - aspiration);
}

double ucb1_value(const ArmStats& stats, Count total_steps) {
  if (stats.n == 0) {
    throw std::domain_error("UCB1 value of an untried arm; pull each arm once first");
  }
  if (total_steps == 0) throw std::invalid_argument("UCB1 needs total_steps >= 1");
  const double n_i = static_cast<double>(stats.n);
  return mean_reward(stats) +
         std::sqrt(2.0 * std::log(static_cast<double>(total_steps)) / n_i);
}

double ucb1t_value(const ArmStats& stats, Count total_steps) {
  if (stats.n == 0) {
    throw std::domain_error("UCB1-Tuned value of an untried arm; pull each arm once first");
  }
  if (total_steps == 0) throw std::invalid_argument("UCB1-Tuned needs total_steps >= 1");
  const double n_i = static_cast<double>(stats.n);
  const double log_n = std::log(static_cast<double>(total_steps));
  const double mean = mean_reward(stats);
  const double variance_bound = mean * (1.0 - mean) + std::sqrt(2.0 * log_n / n_i);
  return mean + std::sqrt(log_n / n_i * std::min(0.25, variance_bound));
}

double epsilon_n(const EpsilonGreedyParams& params, std::size_t arms,
                 Count step) {
  if (step == 0) throw std::invalid_argument("epsilon_n: steps are 1-based");
  const double d2 = params.d() * params.d();
  return std::min(1.0, params.c() * static_cast<double>(arms) /
                           (d2 * static_cast<double>(step)));
}

std::pair<double, double> s0_values(Count a_wins, Count a_losses, Count b_wins,
                                    Count b_losses) {
  const Count total = a_wins + b_losses + a_losses + b_wins;
  if (total == 0) throw std::domain_error("S0 values undefined with no observations");
  const auto denom = static_cast<double>(total);
  return {static_cast<double>(a_wins + b_losses) / denom,
          static_cast<double>(b_wins + a_losses) / denom};
}

double tow_value(Count reward_sum, Count n, double k_param) {
  return static_cast<double>(reward_sum) - static_cast<double>(n) * k_param;
}

ArmIndex rs_select(std::span<const ArmStats> stats, double aspiration,
                   TieBreak tie_break, RngStream* rng) {
  require_arms(stats, "rs_select");
  ArgmaxTracker best(tie_break, rng);
  for (ArmIndex i = 0; i < stats.size(); ++i) {
    best.offer(i, rs_value(stats[i], aspiration));
  }
  return best.best();
}

ArmIndex greedy_select(std::span<const ArmStats> stats, RngStream& rng,
                       TieBreak tie_break) {
  require_arms(stats, "greedy_select");
  ArgmaxTracker best(tie_break, &rng);
  for (ArmIndex i = 0; i < stats.size(); ++i) {
    if (stats[i].n > 0) best.offer(i, mean_reward(stats[i]));
  }
  if (best.empty()) return rng.next_index(stats.size());
  return best.best();
}

ArmIndex ps_select(std::span<const ArmStats> stats, double aspiration,
                   RngStream& rng, TieBreak tie_break) {
  require_arms(stats, "ps_select");
  ArgmaxTracker best(tie_break, &rng);
  for (ArmIndex i = 0; i < stats.size(); ++i) {
    if (stats[i].n > 0) best.offer(i, mean_reward(stats[i]));
  }
  // The greedy maximum exceeds R exactly when some tried arm does.
  if (!best.empty() && best.best_value() > aspiration) return best.best();
  return rng.next_index(stats.size());
}

ArmIndex ucb1_select(std::span<const ArmStats> stats, TieBreak tie_break,
                     RngStream* rng) {
  require_arms(stats, "ucb1_select");
  if (auto untried = first_untried(stats)) return *untried;
  const Count total = total_pulls(stats);
  ArgmaxTracker best(tie_break, rng);
  for (ArmIndex i = 0; i < stats.size(); ++i) {
    best.offer(i, ucb1_value(stats[i], total));
  }
  return best.best();
}

ArmIndex ucb1t_select(std::span<const ArmStats> stats, TieBreak tie_break,
                      RngStream* rng) {
  require_arms(stats, "ucb1t_select");
  if (auto untried = first_untried(stats)) return *untried;
  const Count total = total_pulls(stats);
  ArgmaxTracker best(tie_break, rng);
  for (ArmIndex i = 0; i < stats.size(); ++i) {
    best.offer(i, ucb1t_value(stats[i], total));
  }
  return best.best();
}

ArmIndex epsilon_greedy_select(std::span<const ArmStats> stats,
                               const EpsilonGreedyParams& params, Count step,
                               RngStream& rng, TieBreak tie_break) {
  require_arms(stats, "epsilon_greedy_select");
  const double epsilon = epsilon_n(params, stats.size(), step);
  if (rng.next_unit() < epsilon) return rng.next_index(stats.size());
  return greedy_select(stats, rng, tie_break);
}

ArmIndex s0_select(std::span<const ArmStats> stats, TieBreak tie_break,
                   RngStream* rng) {
  if (stats.size() != 2) {
    throw std::invalid_argument("S0 is defined for exactly two arms");
  }
  // Comparing numerators over the shared denominator keeps the all-zero
  // state well defined (a tie).
  const Count a_score = stats[0].wins + stats[1].losses();
  const Count b_score = stats[1].wins + stats[0].losses();
  ArgmaxTracker best(tie_break, rng);
  best.offer(0, static_cast<double>(a_score));
  best.offer(1, static_cast<double>(b_score));
  return best.best();
}

std::string_view policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kRS: return "rs";
    case PolicyKind::kPS: return "ps";
    case PolicyKind::kGreedy: return "greedy";
    case PolicyKind::kUCB1: return "ucb1";
    case PolicyKind::kUCB1Tuned: return "ucb1t";
    case PolicyKind::kEpsilonGreedy: return "egreedy";
    case PolicyKind::kS0: return "s0";
  }
  return "unknown";
}

std::optional<PolicyKind> parse_policy(std::string_view name) {
  for (auto kind : {PolicyKind::kRS, PolicyKind::kPS, PolicyKind::kGreedy,
                    PolicyKind::kUCB1, PolicyKind::kUCB1Tuned,
                    PolicyKind::kEpsilonGreedy, PolicyKind::kS0}) {
    if (policy_name(kind) == name) return kind;
  }
  return std::nullopt;
}

ArmIndex select_arm(const PolicyParams& params, std::span<const ArmStats> stats,
                    Count step, RngStream& rng) {
  switch (params.kind) {
    case PolicyKind::kRS:
      return rs_select(stats, params.aspiration.at(step), params.tie_break, &rng);
    case PolicyKind::kPS:
      return ps_select(stats, params.aspiration.at(step), rng, params.tie_break);
    case PolicyKind::kGreedy:
      return greedy_select(stats, rng, params.tie_break);
    case PolicyKind::kUCB1:
      return ucb1_select(stats, params.tie_break, &rng);
    case PolicyKind::kUCB1Tuned:
      return ucb1t_select(stats, params.tie_break, &rng);
    case PolicyKind::kEpsilonGreedy:
      if (!params.epsilon) {
        throw std::invalid_argument("epsilon-greedy needs c and d");
      }
      return epsilon_greedy_select(stats, *params.epsilon, step, rng,
                                   params.tie_break);
    case PolicyKind::kS0:
      return s0_select(stats, params.tie_break, &rng);
  }
  throw std::invalid_argument("unknown policy");
}

}  // namespace satisfice
