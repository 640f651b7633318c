#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "croprl/environment.hpp"
#include "croprl/episode_log.hpp"
#include "croprl/rl/policy.hpp"
#include "croprl/rl/ppo.hpp"

namespace croprl::rl {

struct HistoryRow {
  int iteration = 0;
  long long env_steps = 0;     // cumulative
  double mean_return = 0.0;    // unscaled episode return of this iteration's rollouts
  double normalized_return = 0.0;
  double mean_irrigation = 0.0;  // mm per episode
  UpdateStats update;
};

struct TrainResult {
  Agent agent;
  std::vector<HistoryRow> history;
  double reference_yield = 0.0;
};

/// Called after every iteration; useful for logging progress.
using IterationCallback = std::function<void(const HistoryRow&)>;

/// Deterministic 64-bit seed derivation (splitmix64 over the parts).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                          std::uint64_t c = 0);

/// Fresh agent for `config`: initialised network plus observation statistics
/// collected from warm-up episodes with uniformly random irrigation.
Agent make_initial_agent(const EnvConfig& config, const PpoConfig& cfg, std::uint64_t seed);

/// Runs one stochastic episode and records it for PPO. `reward_scale`
/// multiplies the stored rewards; the returned trace keeps raw rewards.
struct Rollout {
  TrajectoryBuffer buffer;
  EpisodeTrace trace;
};
Rollout collect_rollout(const EnvConfig& config, const Agent& agent, std::uint64_t env_seed,
                        std::uint64_t policy_seed, double reward_scale);

/// PPO training loop: each iteration collects `episodes_per_iteration`
/// episodes in parallel (one environment each, independently seeded),
/// refreshes the observation statistics in episode order, and runs
/// ppo_update. Results depend only on (config, cfg, seed).
TrainResult train(const EnvConfig& config, const PpoConfig& cfg, std::uint64_t seed,
                  const IterationCallback& on_iteration = {});

struct EvaluationResult {
  std::vector<EpisodeTrace> episodes;
  std::vector<double> returns;
  std::vector<double> normalized_returns;
  double reference_yield = 0.0;
  double mean_return = 0.0;
  double std_return = 0.0;  // population std
  double mean_normalized = 0.0;
  double std_normalized = 0.0;
};

/// Builds the policy for episode `i`; receives that episode's seed.
using PolicyFactory = std::function<ActionFn(std::uint64_t episode_seed)>;

/// Runs `episodes` episodes seeded seed, seed+1, ...
EvaluationResult evaluate(const EnvConfig& config, const PolicyFactory& make_policy,
                          int episodes, std::uint64_t seed);

void write_history_csv(std::ostream& out, const std::vector<HistoryRow>& history);

}  // namespace croprl::rl
