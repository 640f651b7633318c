#include "croprl/rl/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <ostream>
#include <thread>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "croprl/error.hpp"

namespace croprl::rl {
namespace {

// Seed-derivation domains.
enum : std::uint64_t {
  kInitDomain = 0,
  kEnvDomain = 1,
  kPolicyDomain = 2,
  kShuffleDomain = 3,
  kWarmupEnvDomain = 4,
  kWarmupActionDomain = 5,
};

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Runs job(i) for i in [0, n) on up to `threads` workers. Each job writes
// only its own slot, so the result is independent of scheduling.
template <typename Job>
void parallel_for(int n, int threads, Job job) {
  const int workers = std::clamp(threads, 1, std::max(n, 1));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) job(i);
    return;
  }
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < n; i += workers) job(i);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ b);
  return splitmix64(h ^ c);
}

Agent make_initial_agent(const EnvConfig& config, const PpoConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Agent agent;
  agent.action_scale = cfg.action_scale;
  agent.action_offset = cfg.action_offset;
  agent.network = PolicyNetwork(PolicyLayout{static_cast<int>(kObservationSize), cfg.hidden},
                                cfg.initial_log_std);
  agent.network.initialize(derive_seed(seed, kInitDomain));
  agent.normalizer = RunningNormalizer(static_cast<int>(kObservationSize));

  for (int i = 0; i < cfg.normalizer_warmup_episodes; ++i) {
    Environment env(config);
    std::mt19937_64 rng(derive_seed(seed, kWarmupActionDomain, static_cast<std::uint64_t>(i)));
    std::uniform_real_distribution<double> irrigation(
        0.0, cfg.action_offset + 2.0 * cfg.action_scale);
    Observation o = env.reset(derive_seed(seed, kWarmupEnvDomain, static_cast<std::uint64_t>(i)));
    while (!env.done()) {
      agent.normalizer.update(o);
      o = env.step(irrigation(rng)).observation;
    }
  }
  return agent;
}

Rollout collect_rollout(const EnvConfig& config, const Agent& agent, std::uint64_t env_seed,
                        std::uint64_t policy_seed, double reward_scale) {
  Rollout out;
  TrajectoryBuffer& b = out.buffer;
  EpisodeTrace& trace = out.trace;
  trace.seed = env_seed;

  Environment env(config);
  PolicyRng rng(policy_seed);
  Observation o = env.reset(env_seed);
  while (!env.done()) {
    const Eigen::VectorXd x = agent.normalizer.normalize(o);
    const PolicyOutput p = agent.network.forward(std::span<const double>(x.data(), x.size()));
    const ActionSample a = sample_action(p.mean, p.log_std, rng);
    const double irrigation = agent.to_irrigation(a.raw_action);
    StepResult r = env.step(irrigation);

    b.observations.push_back(x);
    b.raw_actions.push_back(a.raw_action);
    b.applied_actions.push_back(r.info.applied_irrigation);
    b.log_probs.push_back(a.log_prob);
    b.rewards.push_back(r.reward * reward_scale);
    b.values.push_back(p.value);
    b.dones.push_back(r.done ? 1 : 0);

    EpisodeDay day;
    day.observation = o;
    day.action = irrigation;
    day.reward = r.reward;
    day.done = r.done;
    day.info = r.info;
    trace.days.push_back(day);
    trace.episode_return += r.reward;
    trace.total_irrigation += r.info.applied_irrigation;
    o = r.observation;
  }
  trace.final_yield = trace.days.back().info.yield_so_far;
  trace.matured = trace.days.back().info.matured;
  return out;
}

TrainResult train(const EnvConfig& config, const PpoConfig& cfg, std::uint64_t seed,
                  const IterationCallback& on_iteration) {
  cfg.validate();
  config.validate();

  TrainResult result;
  result.reference_yield = potential_yield(config);
  const double reward_scale = cfg.normalize_rewards ? 1.0 / result.reference_yield : 1.0;
  result.agent = make_initial_agent(config, cfg, seed);
  if (cfg.iterations == 0) return result;

  Agent& agent = result.agent;
  Adam optimizer(agent.network.parameters().size(), Adam::Options{cfg.learning_rate});
  std::mt19937_64 shuffle_rng(derive_seed(seed, kShuffleDomain));
  const int threads = resolve_threads(cfg.num_threads);
  const int n = cfg.episodes_per_iteration;
  long long env_steps = 0;

  for (int it = 0; it < cfg.iterations; ++it) {
    std::vector<Rollout> rollouts(static_cast<std::size_t>(n));
    parallel_for(n, threads, [&](int e) {
      const auto ue = static_cast<std::uint64_t>(e);
      const auto uit = static_cast<std::uint64_t>(it);
      rollouts[static_cast<std::size_t>(e)] =
          collect_rollout(config, agent, derive_seed(seed, kEnvDomain, uit, ue),
                          derive_seed(seed, kPolicyDomain, uit, ue), reward_scale);
    });

    TrajectoryBuffer batch;
    HistoryRow row;
    row.iteration = it;
    for (const Rollout& r : rollouts) {
      batch.append(r.buffer);
      row.mean_return += r.trace.episode_return;
      row.mean_irrigation += r.trace.total_irrigation;
      for (const EpisodeDay& d : r.trace.days) agent.normalizer.update(d.observation);
    }
    row.mean_return /= n;
    row.mean_irrigation /= n;
    row.normalized_return = normalized_return(row.mean_return, result.reference_yield);
    env_steps += static_cast<long long>(batch.size());
    row.env_steps = env_steps;

    batch.compute_advantages(cfg.gamma, cfg.lambda);
    row.update = ppo_update(agent.network, optimizer, batch, cfg, shuffle_rng);

    result.history.push_back(row);
    if (on_iteration) on_iteration(row);
  }
  return result;
}

EvaluationResult evaluate(const EnvConfig& config, const PolicyFactory& make_policy,
                          int episodes, std::uint64_t seed) {
  if (episodes < 1) throw ContractViolation("evaluate: need at least one episode");
  EvaluationResult out;
  out.reference_yield = potential_yield(config);
  Environment env(config);
  for (int i = 0; i < episodes; ++i) {
    const std::uint64_t episode_seed = seed + static_cast<std::uint64_t>(i);
    EpisodeTrace trace = run_episode(env, episode_seed, make_policy(episode_seed));
    out.returns.push_back(trace.episode_return);
    out.normalized_returns.push_back(normalized_return(trace.episode_return, out.reference_yield));
    out.episodes.push_back(std::move(trace));
  }
  const auto mean_std = [](const std::vector<double>& v, double& mean, double& std) {
    mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    std = std::sqrt(ss / static_cast<double>(v.size()));
  };
  mean_std(out.returns, out.mean_return, out.std_return);
  mean_std(out.normalized_returns, out.mean_normalized, out.std_normalized);
  return out;
}

void write_history_csv(std::ostream& out, const std::vector<HistoryRow>& history) {
  fmt::print(out,
             "iteration,env_steps,mean_return,normalized_return,mean_irrigation,policy_loss,"
             "value_loss,entropy,mean_ratio,clip_fraction,approx_kl\n");
  for (const HistoryRow& h : history) {
    fmt::print(out, "{},{},{},{},{},{},{},{},{},{},{}\n", h.iteration, h.env_steps,
               h.mean_return, h.normalized_return, h.mean_irrigation, h.update.policy_loss,
               h.update.value_loss, h.update.entropy, h.update.mean_ratio,
               h.update.clip_fraction, h.update.approx_kl);
  }
}

}  // namespace croprl::rl
