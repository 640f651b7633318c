#include "croprl/rl/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <fmt/format.h>

#include "croprl/error.hpp"
#include "croprl/rl/gae.hpp"

namespace croprl::rl {

void PpoConfig::validate() const {
  const auto fail = [](const char* key, const std::string& why) {
    throw ConfigError(fmt::format("ppo option '{}': {}", key, why));
  };
  if (!(gamma > 0.0 && gamma <= 1.0)) fail("gamma", "must be in (0, 1]");
  if (!(lambda > 0.0 && lambda <= 1.0)) fail("lambda", "must be in (0, 1]");
  if (!(clip > 0.0)) fail("clip", "must be > 0");
  if (epochs < 1) fail("epochs", "must be >= 1");
  if (minibatch_size < 1) fail("minibatch_size", "must be >= 1");
  if (!(learning_rate > 0.0)) fail("learning_rate", "must be > 0");
  if (!(value_coef >= 0.0)) fail("value_coef", "must be >= 0");
  if (!(entropy_coef >= 0.0)) fail("entropy_coef", "must be >= 0");
  if (iterations < 0) fail("iterations", "must be >= 0");
  if (episodes_per_iteration < 1) fail("episodes_per_iteration", "must be >= 1");
  if (num_threads < 0) fail("num_threads", "must be >= 0");
  if (normalizer_warmup_episodes < 0) fail("normalizer_warmup_episodes", "must be >= 0");
  if (hidden < 1) fail("hidden", "must be >= 1");
  if (!(initial_log_std >= kLogStdMin && initial_log_std <= kLogStdMax)) {
    fail("initial_log_std", fmt::format("must be in [{}, {}]", kLogStdMin, kLogStdMax));
  }
  if (!(action_scale > 0.0)) fail("action_scale", "must be > 0");
  if (!std::isfinite(action_offset)) fail("action_offset", "must be finite");
}

void TrajectoryBuffer::append(const TrajectoryBuffer& other) {
  const auto cat = [](auto& dst, const auto& src) { dst.insert(dst.end(), src.begin(), src.end()); };
  cat(observations, other.observations);
  cat(raw_actions, other.raw_actions);
  cat(applied_actions, other.applied_actions);
  cat(log_probs, other.log_probs);
  cat(rewards, other.rewards);
  cat(values, other.values);
  cat(dones, other.dones);
  cat(advantages, other.advantages);
  cat(returns, other.returns);
}

void TrajectoryBuffer::check_consistent() const {
  const std::size_t n = rewards.size();
  if (observations.size() != n || raw_actions.size() != n || applied_actions.size() != n ||
      log_probs.size() != n || values.size() != n || dones.size() != n) {
    throw ContractViolation("trajectory buffer: per-step arrays differ in length");
  }
  if (n > 0 && dones.back() == 0) {
    throw ContractViolation("trajectory buffer: last step must end an episode");
  }
}

void TrajectoryBuffer::compute_advantages(double gamma, double lambda) {
  check_consistent();
  auto estimate = gae_advantages(rewards, values, dones, 0.0, gamma, lambda);
  advantages = std::move(estimate.advantages);
  returns = std::move(estimate.returns);
}

Minibatch Minibatch::gather(const TrajectoryBuffer& buffer, const std::vector<std::size_t>& index) {
  if (buffer.advantages.size() != buffer.size()) {
    throw ContractViolation("minibatch: advantages have not been computed");
  }
  const auto m = static_cast<Eigen::Index>(index.size());
  const auto dim = buffer.observations.front().size();
  Minibatch b;
  b.observations.resize(dim, m);
  b.raw_actions.resize(m);
  b.old_log_probs.resize(m);
  b.advantages.resize(m);
  b.returns.resize(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const std::size_t i = index[static_cast<std::size_t>(j)];
    b.observations.col(j) = buffer.observations[i];
    b.raw_actions[j] = buffer.raw_actions[i];
    b.old_log_probs[j] = buffer.log_probs[i];
    b.advantages[j] = buffer.advantages[i];
    b.returns[j] = buffer.returns[i];
  }
  return b;
}

Eigen::VectorXd normalize_advantages(const Eigen::VectorXd& advantages) {
  const double n = static_cast<double>(advantages.size());
  const double mean = advantages.mean();
  const Eigen::VectorXd centered = advantages.array() - mean;
  const double std = std::sqrt(centered.squaredNorm() / n);
  return centered / (std + 1e-8);
}

LossAndGradient ppo_loss(const PolicyNetwork& network, const Minibatch& batch,
                         const PpoConfig& cfg) {
  const Eigen::Index m = batch.raw_actions.size();
  if (m == 0) throw ContractViolation("ppo_loss: empty minibatch");
  const double inv_m = 1.0 / static_cast<double>(m);

  const BatchActivations act = network.forward_batch(batch.observations);
  const double log_std = network.log_std();
  const double inv_var = std::exp(-2.0 * log_std);
  const Eigen::VectorXd adv = normalize_advantages(batch.advantages);

  LossBreakdown loss;
  Eigen::RowVectorXd dmean(m);
  Eigen::RowVectorXd dvalue(m);
  double dlog_std = 0.0;
  double surrogate_sum = 0.0;
  double value_sum = 0.0;
  int clipped = 0;

  for (Eigen::Index i = 0; i < m; ++i) {
    const double mu = act.mean[i];
    const double u = batch.raw_actions[i];
    const double log_prob = gaussian_log_prob(u, mu, log_std);
    const double ratio = std::exp(log_prob - batch.old_log_probs[i]);
    const double a = adv[i];

    const double unclipped = ratio * a;
    const double clipped_ratio = std::clamp(ratio, 1.0 - cfg.clip, 1.0 + cfg.clip);
    const double clipped_term = clipped_ratio * a;
    surrogate_sum += std::min(unclipped, clipped_term);
    if (std::abs(ratio - 1.0) > cfg.clip) ++clipped;
    loss.mean_ratio += ratio;
    loss.approx_kl += (ratio - 1.0) - (log_prob - batch.old_log_probs[i]);

    // d(-surrogate)/d(ratio): only the unclipped branch depends on the ratio
    const double dratio = unclipped <= clipped_term ? -a * inv_m : 0.0;
    const double diff = u - mu;
    dmean[i] = dratio * ratio * diff * inv_var;
    dlog_std += dratio * ratio * (diff * diff * inv_var - 1.0);

    const double err = act.value[i] - batch.returns[i];
    value_sum += err * err;
    dvalue[i] = cfg.value_coef * err * inv_m;
  }

  loss.policy = -surrogate_sum * inv_m;
  loss.value = 0.5 * value_sum * inv_m;
  loss.entropy = log_std + 0.5 * (1.0 + std::log(2.0 * std::numbers::pi));
  loss.total = loss.policy + cfg.value_coef * loss.value - cfg.entropy_coef * loss.entropy;
  loss.mean_ratio *= inv_m;
  loss.clip_fraction = clipped * inv_m;
  loss.approx_kl *= inv_m;
  dlog_std -= cfg.entropy_coef;

  LossAndGradient out;
  out.loss = loss;
  out.gradient = network.backward(batch.observations, act, dmean, dvalue, dlog_std);
  return out;
}

UpdateStats ppo_update(PolicyNetwork& network, Adam& optimizer, const TrajectoryBuffer& buffer,
                       const PpoConfig& cfg, std::mt19937_64& shuffle_rng) {
  if (buffer.size() == 0) throw ContractViolation("ppo_update: empty buffer");
  if (buffer.advantages.size() != buffer.size()) {
    throw ContractViolation("ppo_update: advantages have not been computed");
  }
  std::vector<std::size_t> order(buffer.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto mb = static_cast<std::size_t>(cfg.minibatch_size);

  UpdateStats stats;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    for (std::size_t start = 0; start < order.size(); start += mb) {
      const std::size_t stop = std::min(start + mb, order.size());
      // a trailing single-sample minibatch has no advantage spread; skip it
      if (stop - start < 2 && order.size() >= 2) continue;
      const std::vector<std::size_t> index(order.begin() + static_cast<std::ptrdiff_t>(start),
                                           order.begin() + static_cast<std::ptrdiff_t>(stop));
      LossAndGradient lg = ppo_loss(network, Minibatch::gather(buffer, index), cfg);
      if (!std::isfinite(lg.loss.total) || !lg.gradient.allFinite()) {
        throw NumericError(fmt::format(
            "non-finite PPO loss (epoch {}, minibatch at {}): policy {} value {} entropy {} "
            "mean ratio {} log_std {}",
            epoch, start, lg.loss.policy, lg.loss.value, lg.loss.entropy, lg.loss.mean_ratio,
            network.log_std()));
      }
      if (cfg.max_grad_norm > 0.0) {
        const double norm = lg.gradient.norm();
        if (norm > cfg.max_grad_norm) lg.gradient *= cfg.max_grad_norm / norm;
      }
      optimizer.step(network.parameters(), lg.gradient);
      network.project();

      stats.policy_loss += lg.loss.policy;
      stats.value_loss += lg.loss.value;
      stats.entropy += lg.loss.entropy;
      stats.mean_ratio += lg.loss.mean_ratio;
      stats.clip_fraction += lg.loss.clip_fraction;
      stats.approx_kl += lg.loss.approx_kl;
      ++stats.minibatches;
    }
  }
  if (stats.minibatches > 0) {
    const double k = 1.0 / stats.minibatches;
    stats.policy_loss *= k;
    stats.value_loss *= k;
    stats.entropy *= k;
    stats.mean_ratio *= k;
    stats.clip_fraction *= k;
    stats.approx_kl *= k;
  }
  return stats;
}

}  // namespace croprl::rl
