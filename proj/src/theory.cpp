#include "satisfice/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace satisfice {
namespace {

struct TopTwo {
  ArmIndex best;
  double first;
  double second;
};

TopTwo top_two(std::span<const double> probs) {
  if (probs.size() < 2) {
    throw std::invalid_argument("need at least 2 reward probabilities");
  }
  const ArmIndex best = optimal_arm(probs);
  double second = -std::numeric_limits<double>::infinity();
  for (ArmIndex i = 0; i < probs.size(); ++i) {
    if (i != best) second = std::max(second, probs[i]);
  }
  return {best, probs[best], second};
}

double bernoulli_sd(double p) { return std::sqrt(p * (1.0 - p)); }

// gap * (1/2 + 1/phi^2), with the deterministic-arm limit phi = inf.
double arm_limit(double gap, double phi) {
  if (std::isinf(phi)) return gap * 0.5;
  return gap * (0.5 + 1.0 / (phi * phi));
}

// phi_i = margin / max(sigma_1, sigma_i) for every non-optimal arm.
BoundReport aggregate(std::span<const double> probs, const TopTwo& top,
                      double margin) {
  BoundReport report;
  const double sd_best = bernoulli_sd(top.first);
  for (ArmIndex i = 0; i < probs.size(); ++i) {
    if (i == top.best) continue;
    const double sd = std::max(sd_best, bernoulli_sd(probs[i]));
    const double phi =
        sd > 0.0 ? margin / sd : std::numeric_limits<double>::infinity();
    const double gap = top.first - probs[i];
    report.arms.push_back(i);
    report.phi.push_back(phi);
    report.gap.push_back(gap);
    report.per_arm_limit.push_back(arm_limit(gap, phi));
    report.total += report.per_arm_limit.back();
  }
  return report;
}

void check_probs(std::span<const double> probs) {
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw std::invalid_argument("reward probabilities must lie in [0, 1]");
    }
  }
}

}  // namespace

double optimal_aspiration(std::span<const double> probs) {
  const TopTwo top = top_two(probs);
  return (top.first + top.second) / 2.0;
}

double top_gap(std::span<const double> probs) {
  const TopTwo top = top_two(probs);
  return top.first - top.second;
}

double BoundReport::finite_horizon(Count n) const {
  if (n == 0) throw std::invalid_argument("finite_horizon: steps are 1-based");
  const double elapsed = static_cast<double>(n - 1);
  double sum = 0.0;
  for (std::size_t k = 0; k < phi.size(); ++k) {
    double expected_pulls = 0.5;
    if (!std::isinf(phi[k])) {
      const double phi2 = phi[k] * phi[k];
      expected_pulls += -std::expm1(-phi2 * elapsed / 2.0) / phi2;
    }
    sum += gap[k] * expected_pulls;
  }
  return sum;
}

BoundReport regret_upper_bound(std::span<const double> probs) {
  check_probs(probs);
  const TopTwo top = top_two(probs);
  if (!(top.first > top.second)) {
    throw std::domain_error(
        "regret bound needs a strict gap between the two best arms");
  }
  return aggregate(probs, top, (top.first - top.second) / 2.0);
}

BoundReport regret_upper_bound_variable(std::span<const double> probs,
                                        double r_min, double r_max) {
  check_probs(probs);
  const TopTwo top = top_two(probs);
  if (!(r_min <= r_max)) {
    throw std::invalid_argument("aspiration range requires r_min <= r_max");
  }
  if (!(top.second < r_min && r_max < top.first)) {
    throw std::invalid_argument(
        "aspiration range must satisfy p_2nd < r_min <= r_max < p_1st");
  }
  return aggregate(probs, top, std::min(top.first - r_max, r_min - top.second));
}

double q_function(double x) {
  return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double chernoff_tail_bound(double x) { return 0.5 * std::exp(-x * x / 2.0); }

double expected_delta_rs(double p, double aspiration) { return p - aspiration; }

double expected_delta_q(double p, double mean, Count n_i) {
  if (n_i == 0) throw std::invalid_argument("expected_delta_q needs n_i >= 1");
  return (p - mean) / static_cast<double>(n_i + 1);
}

double expected_delta_ucb1(double p, double mean, Count n_i, Count total_steps,
                           bool chosen) {
  if (n_i == 0) throw std::invalid_argument("expected_delta_ucb1 needs n_i >= 1");
  if (total_steps == 0) {
    throw std::invalid_argument("expected_delta_ucb1 needs total_steps >= 1");
  }
  const double n = static_cast<double>(total_steps);
  const double ni = static_cast<double>(n_i);
  if (!chosen) {
    return std::sqrt(2.0 / ni) *
           (std::sqrt(std::log(n + 1.0)) - std::sqrt(std::log(n)));
  }
  return (p - mean) / (ni + 1.0) +
         (std::sqrt(2.0 * std::log(n + 1.0) / (ni + 1.0)) -
          std::sqrt(2.0 * std::log(n) / ni));
}

}  // namespace satisfice
