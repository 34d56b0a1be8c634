#pragma once

// Bernoulli bandit environments, per-arm tallies and the seeded random
// stream shared by every simulation component.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace satisfice {

using ArmIndex = std::size_t;
using Count = std::uint64_t;

// Deterministic generator keyed by (base_seed, run_index). The key is mixed
// with SplitMix64 and drives a xoshiro256** state, so the produced sequence
// depends only on the key and is identical on every platform.
class RngStream {
 public:
  RngStream(std::uint64_t base_seed, std::uint64_t run_index);

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 bits of resolution. One draw.
  double next_unit();

  // Uniform on [0, n). Usually one draw; rejection may take more.
  std::size_t next_index(std::size_t n);

 private:
  std::array<std::uint64_t, 4> state_;
};

class BernoulliBandit {
 public:
  // Throws std::invalid_argument unless there are at least two arms and
  // every probability lies in [0, 1].
  explicit BernoulliBandit(std::vector<double> probs);

  std::span<const double> probs() const { return probs_; }
  std::size_t arms() const { return probs_.size(); }
  double prob(ArmIndex arm) const { return probs_.at(arm); }

 private:
  std::vector<double> probs_;
};

// Pull counts for one arm. Losses are n - wins.
struct ArmStats {
  Count n = 0;
  Count wins = 0;

  Count losses() const { return n - wins; }
  friend bool operator==(const ArmStats&, const ArmStats&) = default;
};

// Returns 1 with probability probs[arm], else 0. Consumes exactly one draw.
int pull(const BernoulliBandit& env, ArmIndex arm, RngStream& rng);

// reward must be 0 or 1.
ArmStats update_stats(ArmStats stats, int reward);

// wins / n. Throws std::domain_error for an untried arm.
double mean_reward(const ArmStats& stats);

// Lowest index attaining the maximal probability.
ArmIndex optimal_arm(std::span<const double> probs);
inline ArmIndex optimal_arm(const BernoulliBandit& env) {
  return optimal_arm(env.probs());
}

}  // namespace satisfice
