#pragma once

// Closed-form quantities for RS on Bernoulli bandits: the optimal aspiration
// level, the finite regret bound (constant and bounded-variable R), the
// Gaussian tail function it rests on, and the one-step expected changes of
// the RS, mean-reward and UCB1 values.
//
// Everything here takes the true reward probabilities, i.e. knowledge the
// agents themselves never get.

#include <span>
#include <vector>

#include "satisfice/bandit.hpp"

namespace satisfice {

// (p_1st + p_2nd) / 2. The second-largest value is taken after removing one
// occurrence of the maximum, so duplicated maxima give the maximum itself.
double optimal_aspiration(std::span<const double> probs);

// p_1st - p_2nd under the same multiset reading; zero for duplicated maxima.
double top_gap(std::span<const double> probs);

// Regret bound split by non-optimal arm. Entries of `arms`, `phi`, `gap` and
// `per_arm_limit` are parallel; `phi` is +inf when both the optimal arm and
// arm i are deterministic (their contribution is then gap / 2).
struct BoundReport {
  std::vector<ArmIndex> arms;
  std::vector<double> phi;
  std::vector<double> gap;
  std::vector<double> per_arm_limit;
  double total = 0.0;

  // Pre-limit bound after n steps:
  //   sum_i gap_i (1/2 + (1 - exp(-phi_i^2 (n - 1) / 2)) / phi_i^2).
  // Non-decreasing in n, equal to sum_i gap_i / 2 at n = 1, -> total.
  double finite_horizon(Count n) const;
};

// Bound for constant R = optimal_aspiration(probs), with
// phi_i = (p_1 - p_2) / (2 max(sigma_1, sigma_i)), sigma^2 = p (1 - p).
// Throws std::domain_error when p_1 == p_2.
BoundReport regret_upper_bound(std::span<const double> probs);

// Bound for any R(t) confined to [r_min, r_max] with p_2 < r_min <= r_max <
// p_1, using phi_i = min(p_1 - r_max, r_min - p_2) / max(sigma_1, sigma_i).
// Note this phi has no factor 2 in its denominator, unlike the constant-R
// form. Throws std::invalid_argument when the range is not strictly inside
// (p_2, p_1).
BoundReport regret_upper_bound_variable(std::span<const double> probs,
                                        double r_min, double r_max);

// Standard normal upper tail, P(Z > x).
double q_function(double x);

// (1/2) exp(-x^2 / 2); dominates q_function for x >= 0.
double chernoff_tail_bound(double x);

// E[RS(n+1) - RS(n)] when the arm is pulled: p - R.
double expected_delta_rs(double p, double aspiration);

// E[E_i(n+1) - E_i(n)] when the arm is pulled: (p - E) / (n_i + 1).
// Throws std::invalid_argument for n_i == 0.
double expected_delta_q(double p, double mean, Count n_i);

// Expected one-step change of the UCB1 value after step `total_steps`.
// Chosen arm:   (p - E)/(n_i + 1) + sqrt(2 ln(n+1)/(n_i+1)) - sqrt(2 ln n / n_i)
// Unchosen arm: sqrt(2 / n_i) (sqrt(ln(n+1)) - sqrt(ln n))
double expected_delta_ucb1(double p, double mean, Count n_i, Count total_steps,
                           bool chosen);

}  // namespace satisfice
