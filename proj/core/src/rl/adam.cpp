#include "croprl/rl/adam.hpp"

#include <cmath>

#include "croprl/error.hpp"

namespace croprl::rl {

Adam::Adam(Eigen::Index size, Options options)
    : options_(options), m_(Eigen::VectorXd::Zero(size)), v_(Eigen::VectorXd::Zero(size)) {}

void Adam::step(Eigen::VectorXd& theta, const Eigen::VectorXd& grad) {
  if (grad.size() != m_.size() || theta.size() != m_.size()) {
    throw ContractViolation("Adam: parameter/gradient size mismatch");
  }
  ++t_;
  m_ = options_.beta1 * m_ + (1.0 - options_.beta1) * grad;
  v_ = options_.beta2 * v_ + (1.0 - options_.beta2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(options_.beta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(options_.beta2, static_cast<double>(t_));
  theta.array() -= options_.learning_rate * (m_.array() / c1) /
                   ((v_.array() / c2).sqrt() + options_.epsilon);
}

}  // namespace croprl::rl
