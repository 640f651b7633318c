#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "croprl/rl/adam.hpp"
#include "croprl/rl/policy.hpp"

namespace croprl::rl {

struct PpoConfig {
  double gamma = 0.99;
  double lambda = 0.95;
  double clip = 0.2;
  int epochs = 10;
  int minibatch_size = 64;
  double learning_rate = 3e-4;
  double value_coef = 0.5;
  double entropy_coef = 0.0;
  double max_grad_norm = 0.5;  // <= 0 disables clipping

  // Rollout and schedule.
  int iterations = 100;
  int episodes_per_iteration = 8;  // rollout batch, one episode per env instance
  int num_threads = 0;             // 0 = hardware concurrency
  int normalizer_warmup_episodes = 2;

  // Network and action map.
  int hidden = 64;
  double initial_log_std = 0.0;
  double action_scale = 10.0;   // mm per unit of policy output
  double action_offset = 0.0;   // mm
  bool normalize_rewards = true;  // divide rewards by the scenario's potential yield

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

/// Steps collected from complete episodes, laid out episode after episode.
struct TrajectoryBuffer {
  std::vector<Eigen::VectorXd> observations;  // normalised, as seen by the policy
  std::vector<double> raw_actions;
  std::vector<double> applied_actions;  // mm after the environment clamp
  std::vector<double> log_probs;
  std::vector<double> rewards;
  std::vector<double> values;
  std::vector<std::uint8_t> dones;

  // Filled by compute_advantages().
  std::vector<double> advantages;
  std::vector<double> returns;

  std::size_t size() const { return rewards.size(); }
  void append(const TrajectoryBuffer& other);
  void compute_advantages(double gamma, double lambda);
  /// Throws ContractViolation when per-step vectors disagree in length or
  /// the last step is not terminal.
  void check_consistent() const;
};

struct Minibatch {
  Eigen::MatrixXd observations;  // input x M
  Eigen::VectorXd raw_actions;
  Eigen::VectorXd old_log_probs;
  Eigen::VectorXd advantages;  // unnormalised; normalised inside the loss
  Eigen::VectorXd returns;

  static Minibatch gather(const TrajectoryBuffer& buffer, const std::vector<std::size_t>& index);
};

struct LossBreakdown {
  double total = 0.0;
  double policy = 0.0;   // -mean clipped surrogate
  double value = 0.0;    // 0.5 mean squared error
  double entropy = 0.0;
  double mean_ratio = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
};

struct LossAndGradient {
  LossBreakdown loss;
  Eigen::VectorXd gradient;
};

/// total = -mean(min(r*A, clip(r, 1-eps, 1+eps)*A)) + c_v * 0.5*mean((V-R)^2) - c_e * H
/// with A normalised to zero mean and unit (population) std over the minibatch.
LossAndGradient ppo_loss(const PolicyNetwork& network, const Minibatch& batch,
                         const PpoConfig& cfg);

/// Mean/unit-std normalisation used by ppo_loss (exposed for tests).
Eigen::VectorXd normalize_advantages(const Eigen::VectorXd& advantages);

struct UpdateStats {
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
  double mean_ratio = 0.0;
  double clip_fraction = 0.0;
  double approx_kl = 0.0;
  int minibatches = 0;
};

/// Several epochs of shuffled minibatch Adam steps on the clipped surrogate.
/// Throws NumericError (with the minibatch diagnostics) on a non-finite loss.
UpdateStats ppo_update(PolicyNetwork& network, Adam& optimizer, const TrajectoryBuffer& buffer,
                       const PpoConfig& cfg, std::mt19937_64& shuffle_rng);

}  // namespace croprl::rl
