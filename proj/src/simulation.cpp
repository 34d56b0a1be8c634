#include "satisfice/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "satisfice/theory.hpp"

namespace satisfice {
namespace {

// Runs per reduction block. Fixed so the summation order never depends on
// how blocks are scheduled across threads.
constexpr Count kRunsPerBlock = 16;

template <typename CountOf>
double regret_sum(std::span<const double> probs, CountOf&& count_of) {
  const double best = probs[optimal_arm(probs)];
  double regret = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    regret += (best - probs[i]) * static_cast<double>(count_of(i));
  }
  return regret;
}

PolicyParams resolve_policy(const PolicySpec& spec,
                            std::span<const double> probs) {
  PolicyParams params;
  params.kind = spec.kind;
  params.tie_break = spec.tie_break;
  params.aspiration = std::visit(
      [&](const auto& a) -> AspirationSchedule {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, ConstantAspiration>) {
          return AspirationSchedule::constant(a.level);
        } else if constexpr (std::is_same_v<T, OptimalAspiration>) {
          return AspirationSchedule::constant(optimal_aspiration(probs));
        } else {
          return a;
        }
      },
      spec.aspiration);
  if (spec.kind == PolicyKind::kEpsilonGreedy) {
    double d = 0.0;
    if (spec.d) {
      d = *spec.d;
    } else {
      d = top_gap(probs);
    }
    params.epsilon = EpsilonGreedyParams(spec.c, d);
  }
  return params;
}

// Drives one run. on_env(probs) fires once the environment is drawn;
// on_log(log_index, step, chosen, stats) fires after the pull of every
// logged step.
template <typename OnEnv, typename OnLog>
void simulate(const ExperimentConfig& config, Count run_index,
              std::span<const Count> log_steps, OnEnv&& on_env, OnLog&& on_log,
              std::vector<ArmStats>* final_stats = nullptr) {
  RngStream rng(config.base_seed, run_index);
  std::vector<double> probs;
  PolicyParams params;
  try {
    probs = draw_env(config.env, rng);
    params = resolve_policy(config.policy, probs);
  } catch (const std::exception& e) {
    throw RunError("run " + std::to_string(run_index) + ": " + e.what());
  }
  on_env(std::span<const double>(probs));
  const BernoulliBandit env(std::move(probs));
  std::vector<ArmStats> stats(env.arms());
  std::size_t next_log = 0;
  for (Count t = 1; t <= config.horizon; ++t) {
    ArmIndex arm = 0;
    try {
      arm = select_arm(params, stats, t, rng);
    } catch (const std::exception& e) {
      throw RunError("run " + std::to_string(run_index) + ", step " +
                     std::to_string(t) + ": " + e.what());
    }
    stats[arm] = update_stats(stats[arm], pull(env, arm, rng));
    if (next_log < log_steps.size() && log_steps[next_log] == t) {
      on_log(next_log, t, arm, std::span<const ArmStats>(stats));
      ++next_log;
    }
  }
  if (final_stats != nullptr) *final_stats = std::move(stats);
}

std::vector<Count> geometric_steps(Count horizon) {
  std::vector<Count> steps{1};
  for (int k = 1;; ++k) {
    const auto s = static_cast<Count>(std::llround(std::pow(10.0, k / 2.0)));
    if (s > horizon) break;
    if (s > steps.back()) steps.push_back(s);
  }
  if (steps.back() != horizon) steps.push_back(horizon);
  return steps;
}

}  // namespace

std::vector<Count> LogSchedule::resolve(Count horizon) const {
  switch (kind_) {
    case Kind::kGeometric:
      return geometric_steps(horizon);
    case Kind::kAll: {
      std::vector<Count> steps(horizon);
      for (Count t = 0; t < horizon; ++t) steps[t] = t + 1;
      return steps;
    }
    case Kind::kExplicit:
      break;
  }
  if (steps_.empty()) throw std::invalid_argument("empty explicit log schedule");
  for (std::size_t i = 0; i < steps_.size(); ++i) {
    if (steps_[i] < 1 || steps_[i] > horizon) {
      throw std::invalid_argument("logged step " + std::to_string(steps_[i]) +
                                  " outside [1, horizon]");
    }
    if (i > 0 && steps_[i] <= steps_[i - 1]) {
      throw std::invalid_argument("logged steps must be strictly increasing");
    }
  }
  return steps_;
}

std::string_view LogSchedule::name() const {
  switch (kind_) {
    case Kind::kGeometric: return "geometric";
    case Kind::kAll: return "all";
    case Kind::kExplicit: return "explicit";
  }
  return "unknown";
}

void ExperimentConfig::validate() const {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (runs < 1) throw std::invalid_argument("runs must be >= 1");
  std::size_t arms = 0;
  if (const auto* fixed = std::get_if<FixedProbs>(&env)) {
    arms = BernoulliBandit(fixed->probs).arms();
  } else {
    arms = std::get<RandomProbs>(env).arms;
    if (arms < 2) throw std::invalid_argument("random environments need >= 2 arms");
  }
  if (policy.kind == PolicyKind::kS0 && arms != 2) {
    throw std::invalid_argument("s0 policy requires exactly 2 arms");
  }
  if (policy.kind == PolicyKind::kEpsilonGreedy) {
    EpsilonGreedyParams(policy.c, policy.d.value_or(0.5));
    if (!policy.d && std::holds_alternative<FixedProbs>(env)) {
      if (!(top_gap(std::get<FixedProbs>(env).probs) > 0.0)) {
        throw std::invalid_argument(
            "egreedy: true gap is zero, pass d explicitly");
      }
    }
  }
  if (const auto* constant = std::get_if<ConstantAspiration>(&policy.aspiration)) {
    AspirationSchedule::constant(constant->level);
  }
  log.resolve(horizon);
}

std::vector<double> draw_env(const EnvSpec& env, RngStream& rng) {
  if (const auto* fixed = std::get_if<FixedProbs>(&env)) return fixed->probs;
  const std::size_t arms = std::get<RandomProbs>(env).arms;
  std::vector<double> probs(arms);
  for (;;) {
    for (auto& p : probs) p = rng.next_unit();
    const double best = probs[optimal_arm(probs)];
    if (std::count(probs.begin(), probs.end(), best) == 1) return probs;
  }
}

std::optional<double> applicable_bound(const PolicySpec& policy,
                                       std::span<const double> probs) {
  if (policy.kind != PolicyKind::kRS) return std::nullopt;
  try {
    if (std::holds_alternative<OptimalAspiration>(policy.aspiration)) {
      return regret_upper_bound(probs).total;
    }
    if (const auto* c = std::get_if<ConstantAspiration>(&policy.aspiration)) {
      return regret_upper_bound_variable(probs, c->level, c->level).total;
    }
    const auto& schedule = std::get<AspirationSchedule>(policy.aspiration);
    return regret_upper_bound_variable(probs, schedule.min(), schedule.max())
        .total;
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  } catch (const std::domain_error&) {
    return std::nullopt;
  }
}

double regret_of_counts(std::span<const double> probs,
                        std::span<const Count> counts) {
  if (counts.size() != probs.size()) {
    throw std::invalid_argument("regret_of_counts: length mismatch");
  }
  return regret_sum(probs, [&](std::size_t i) { return counts[i]; });
}

RunTrace run_single(const ExperimentConfig& config, Count run_index) {
  config.validate();
  const std::vector<Count> log_steps = config.log.resolve(config.horizon);
  RunTrace trace;
  trace.logged.reserve(log_steps.size());
  simulate(
      config, run_index, log_steps,
      [&](std::span<const double> probs) {
        trace.probs.assign(probs.begin(), probs.end());
      },
      [&](std::size_t, Count step, ArmIndex chosen,
          std::span<const ArmStats> stats) {
        LoggedStep entry{step, chosen, false, {}};
        entry.counts.reserve(stats.size());
        for (const auto& s : stats) entry.counts.push_back(s.n);
        trace.logged.push_back(std::move(entry));
      },
      &trace.final_stats);
  trace.optimal = optimal_arm(trace.probs);
  for (auto& entry : trace.logged) {
    entry.chosen_is_optimal = entry.chosen == trace.optimal;
  }
  return trace;
}

std::vector<StepAggregate> run_experiment(const ExperimentConfig& config) {
  config.validate();
  const std::vector<Count> log_steps = config.log.resolve(config.horizon);
  const Count blocks = (config.runs + kRunsPerBlock - 1) / kRunsPerBlock;

  struct BlockSum {
    std::vector<Count> optimal;
    std::vector<double> regret;
    double bound = 0.0;
    bool bound_defined = true;
  };
  std::vector<BlockSum> sums(blocks);

  std::atomic<Count> next_block{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::exception_ptr error;

  auto worker = [&] {
    for (;;) {
      const Count b = next_block.fetch_add(1);
      if (b >= blocks || failed.load()) return;
      BlockSum& sum = sums[b];
      sum.optimal.assign(log_steps.size(), 0);
      sum.regret.assign(log_steps.size(), 0.0);
      try {
        const Count end = std::min(config.runs, (b + 1) * kRunsPerBlock);
        for (Count run = b * kRunsPerBlock; run < end; ++run) {
          std::vector<double> probs;
          ArmIndex best = 0;
          simulate(config, run, log_steps,
                   [&](std::span<const double> drawn) {
                     probs.assign(drawn.begin(), drawn.end());
                     best = optimal_arm(probs);
                   },
                   [&](std::size_t idx, Count, ArmIndex chosen,
                       std::span<const ArmStats> stats) {
                     if (chosen == best) ++sum.optimal[idx];
                     sum.regret[idx] += regret_sum(
                         probs, [&](std::size_t i) { return stats[i].n; });
                   });
          if (sum.bound_defined) {
            const auto bound = applicable_bound(config.policy, probs);
            if (bound) {
              sum.bound += *bound;
            } else {
              sum.bound_defined = false;
            }
          }
        }
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };

  unsigned threads = config.threads;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<Count>(threads, blocks));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  const auto runs = static_cast<double>(config.runs);
  std::optional<double> bound;
  {
    double total = 0.0;
    bool defined = true;
    for (const auto& sum : sums) {
      defined = defined && sum.bound_defined;
      total += sum.bound;
    }
    if (defined) bound = total / runs;
  }

  std::vector<StepAggregate> out(log_steps.size());
  for (std::size_t k = 0; k < log_steps.size(); ++k) {
    Count optimal = 0;
    double regret = 0.0;
    for (const auto& sum : sums) {
      optimal += sum.optimal[k];
      regret += sum.regret[k];
    }
    out[k] = {log_steps[k], static_cast<double>(optimal) / runs, regret / runs,
              bound};
  }
  return out;
}

double satisficing_check(const RunTrace& trace, std::span<const double> probs,
                         double aspiration, Count tail_window) {
  std::vector<bool> satisfactory(probs.size());
  bool any = false;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    satisfactory[i] = probs[i] > aspiration;
    any = any || satisfactory[i];
  }
  if (!any) throw std::invalid_argument("no arm has p_i > R");
  if (tail_window == 0 || tail_window > trace.logged.size()) {
    throw std::invalid_argument("tail window must be in [1, logged steps]");
  }
  Count hits = 0;
  for (auto it = trace.logged.end() - static_cast<std::ptrdiff_t>(tail_window);
       it != trace.logged.end(); ++it) {
    if (it->chosen >= probs.size()) {
      throw std::invalid_argument("trace does not match the given probabilities");
    }
    if (satisfactory[it->chosen]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(tail_window);
}

}  // namespace satisfice
