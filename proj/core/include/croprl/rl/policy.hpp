#pragma once

#include <cstdint>
#include <random>
#include <span>

#include <Eigen/Dense>

namespace croprl::rl {

inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 2.0;

/// Shapes of the actor-critic: two separate `input -> hidden -> hidden -> 1`
/// tanh MLPs (policy mean and state value) and one state-independent
/// log standard deviation.
struct PolicyLayout {
  int input = 21;
  int hidden = 64;

  // Offsets of one head's blocks relative to the head start.
  int w1() const { return 0; }
  int b1() const { return w1() + hidden * input; }
  int w2() const { return b1() + hidden; }
  int b2() const { return w2() + hidden * hidden; }
  int w3() const { return b2() + hidden; }
  int b3() const { return w3() + hidden; }
  int head_size() const { return b3() + 1; }

  int actor() const { return 0; }
  int critic() const { return head_size(); }
  int log_std() const { return 2 * head_size(); }
  int size() const { return 2 * head_size() + 1; }
};

struct PolicyOutput {
  double mean = 0.0;
  double log_std = 0.0;
  double value = 0.0;
};

/// Forward activations of a batch, kept for backpropagation.
struct BatchActivations {
  Eigen::MatrixXd actor_h1, actor_h2, critic_h1, critic_h2;
  Eigen::RowVectorXd mean, value;
};

/// Actor-critic parameters stored as one flat vector (column-major blocks).
class PolicyNetwork {
 public:
  PolicyNetwork() = default;
  explicit PolicyNetwork(PolicyLayout layout, double initial_log_std = 0.0);

  /// Scaled-normal initialisation: hidden layers use std 1/sqrt(fan_in),
  /// the policy output layer is scaled by 0.01 so the initial mean is ~0.
  void initialize(std::uint64_t seed);

  const PolicyLayout& layout() const { return layout_; }
  Eigen::VectorXd& parameters() { return theta_; }
  const Eigen::VectorXd& parameters() const { return theta_; }

  double log_std() const { return theta_[layout_.log_std()]; }
  /// Keeps log-std inside [kLogStdMin, kLogStdMax].
  void project();

  /// Single observation (already normalised).
  PolicyOutput forward(std::span<const double> x) const;

  /// Column-wise batch forward; `x` is input x N.
  BatchActivations forward_batch(const Eigen::MatrixXd& x) const;

  /// Gradient of a loss given dL/dmean and dL/dvalue per column and
  /// dL/dlog_std, for the batch whose activations are `act`.
  Eigen::VectorXd backward(const Eigen::MatrixXd& x, const BatchActivations& act,
                           const Eigen::RowVectorXd& dmean, const Eigen::RowVectorXd& dvalue,
                           double dlog_std) const;

 private:
  PolicyLayout layout_;
  Eigen::VectorXd theta_;
};

/// Running mean/variance of observations (parallel Welford merge).
class RunningNormalizer {
 public:
  RunningNormalizer() = default;
  explicit RunningNormalizer(int dim);

  void update(std::span<const double> x);
  Eigen::VectorXd normalize(std::span<const double> x) const;

  int dim() const { return static_cast<int>(mean_.size()); }
  double count() const { return count_; }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::VectorXd& variance() const { return var_; }
  void set_state(double count, Eigen::VectorXd mean, Eigen::VectorXd var);

  static constexpr double kEpsilon = 1e-8;
  static constexpr double kClip = 10.0;

 private:
  double count_ = 0.0;
  Eigen::VectorXd mean_;
  Eigen::VectorXd var_;
};

/// Gaussian log-density of `x` under N(mean, exp(log_std)^2).
double gaussian_log_prob(double x, double mean, double log_std);

struct ActionSample {
  double raw_action = 0.0;
  double log_prob = 0.0;
};

using PolicyRng = std::mt19937_64;

ActionSample sample_action(double mean, double log_std, PolicyRng& rng);

/// A trained agent: network, observation statistics, and the affine map
/// from the policy's action space to millimetres of irrigation.
struct Agent {
  PolicyNetwork network;
  RunningNormalizer normalizer;
  double action_scale = 10.0;
  double action_offset = 0.0;

  double to_irrigation(double raw_action) const { return action_offset + action_scale * raw_action; }
};

}  // namespace croprl::rl
