#include "satisfice/bandit.hpp"

#include <stdexcept>
#include <string>

namespace satisfice {
namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

RngStream::RngStream(std::uint64_t base_seed, std::uint64_t run_index) {
  std::uint64_t seed_mix = base_seed;
  std::uint64_t key = splitmix64(seed_mix);
  std::uint64_t run_mix = run_index ^ 0xD1B54A32D192ED03ULL;
  key ^= splitmix64(run_mix);
  for (auto& word : state_) word = splitmix64(key);
  // xoshiro must not start from the all-zero state.
  if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RngStream::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

namespace {
__extension__ using Uint128 = unsigned __int128;
}  // namespace

std::size_t RngStream::next_index(std::size_t n) {
  if (n == 0) throw std::invalid_argument("next_index: empty range");
  // Lemire's multiply-shift with rejection of the biased low band.
  const auto bound = static_cast<std::uint64_t>(n);
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const Uint128 m = static_cast<Uint128>(next_u64()) * bound;
    if (static_cast<std::uint64_t>(m) >= threshold) {
      return static_cast<std::size_t>(m >> 64);
    }
  }
}

BernoulliBandit::BernoulliBandit(std::vector<double> probs)
    : probs_(std::move(probs)) {
  if (probs_.size() < 2) {
    throw std::invalid_argument("bandit needs at least 2 arms, got " +
                                std::to_string(probs_.size()));
  }
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    if (!(probs_[i] >= 0.0 && probs_[i] <= 1.0)) {
      throw std::invalid_argument("reward probability of arm " +
                                  std::to_string(i) + " outside [0, 1]");
    }
  }
}

int pull(const BernoulliBandit& env, ArmIndex arm, RngStream& rng) {
  if (arm >= env.arms()) {
    throw std::invalid_argument("arm " + std::to_string(arm) +
                                " out of range for " +
                                std::to_string(env.arms()) + " arms");
  }
  return rng.next_unit() < env.probs()[arm] ? 1 : 0;
}

ArmStats update_stats(ArmStats stats, int reward) {
  if (reward != 0 && reward != 1) {
    throw std::invalid_argument("reward must be 0 or 1");
  }
  stats.n += 1;
  stats.wins += static_cast<Count>(reward);
  return stats;
}

double mean_reward(const ArmStats& stats) {
  if (stats.n == 0) throw std::domain_error("mean reward of an untried arm");
  return static_cast<double>(stats.wins) / static_cast<double>(stats.n);
}

ArmIndex optimal_arm(std::span<const double> probs) {
  if (probs.empty()) throw std::invalid_argument("optimal_arm: no arms");
  ArmIndex best = 0;
  for (ArmIndex i = 1; i < probs.size(); ++i) {
    if (probs[i] > probs[best]) best = i;
  }
  return best;
}

}  // namespace satisfice
