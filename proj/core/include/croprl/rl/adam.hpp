#pragma once

#include <Eigen/Dense>

namespace croprl::rl {

/// Adam with bias correction, operating on a flat parameter vector.
class Adam {
 public:
  struct Options {
    double learning_rate = 3e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
  };

  Adam() = default;
  Adam(Eigen::Index size, Options options);

  /// theta -= lr * m_hat / (sqrt(v_hat) + eps)
  void step(Eigen::VectorXd& theta, const Eigen::VectorXd& grad);

  long long steps() const { return t_; }
  const Options& options() const { return options_; }

 private:
  Options options_;
  Eigen::VectorXd m_;
  Eigen::VectorXd v_;
  long long t_ = 0;
};

}  // namespace croprl::rl
