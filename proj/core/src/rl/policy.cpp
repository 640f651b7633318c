#include "croprl/rl/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "croprl/error.hpp"

namespace croprl::rl {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using ConstMap = Eigen::Map<const MatrixXd>;
using Map = Eigen::Map<MatrixXd>;

struct HeadView {
  ConstMap w1, w2, w3;
  Eigen::Map<const VectorXd> b1, b2;
  double b3;
};

HeadView head(const PolicyLayout& l, const VectorXd& theta, int start) {
  const double* p = theta.data() + start;
  return HeadView{ConstMap(p + l.w1(), l.hidden, l.input),
                  ConstMap(p + l.w2(), l.hidden, l.hidden),
                  ConstMap(p + l.w3(), 1, l.hidden),
                  Eigen::Map<const VectorXd>(p + l.b1(), l.hidden),
                  Eigen::Map<const VectorXd>(p + l.b2(), l.hidden),
                  p[l.b3()]};
}

void head_forward(const HeadView& h, const MatrixXd& x, MatrixXd& h1, MatrixXd& h2,
                  Eigen::RowVectorXd& out) {
  h1 = ((h.w1 * x).colwise() + h.b1).array().tanh().matrix();
  h2 = ((h.w2 * h1).colwise() + h.b2).array().tanh().matrix();
  out = (h.w3 * h2).array() + h.b3;
}

void head_backward(const PolicyLayout& l, const HeadView& h, const MatrixXd& x,
                   const MatrixXd& h1, const MatrixXd& h2, const Eigen::RowVectorXd& dout,
                   double* grad) {
  Map(grad + l.w3(), 1, l.hidden) = dout * h2.transpose();
  grad[l.b3()] = dout.sum();
  const MatrixXd dz2 = ((h.w3.transpose() * dout).array() * (1.0 - h2.array().square())).matrix();
  Map(grad + l.w2(), l.hidden, l.hidden) = dz2 * h1.transpose();
  Eigen::Map<VectorXd>(grad + l.b2(), l.hidden) = dz2.rowwise().sum();
  const MatrixXd dz1 = ((h.w2.transpose() * dz2).array() * (1.0 - h1.array().square())).matrix();
  Map(grad + l.w1(), l.hidden, l.input) = dz1 * x.transpose();
  Eigen::Map<VectorXd>(grad + l.b1(), l.hidden) = dz1.rowwise().sum();
}

}  // namespace

PolicyNetwork::PolicyNetwork(PolicyLayout layout, double initial_log_std)
    : layout_(layout), theta_(VectorXd::Zero(layout.size())) {
  theta_[layout_.log_std()] = initial_log_std;
  project();
}

void PolicyNetwork::initialize(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto fill = [&](int start, int rows, int cols, double gain) {
    std::normal_distribution<double> normal(0.0, gain / std::sqrt(static_cast<double>(cols)));
    for (int i = 0; i < rows * cols; ++i) theta_[start + i] = normal(rng);
  };
  const PolicyLayout& l = layout_;
  for (int start : {l.actor(), l.critic()}) {
    fill(start + l.w1(), l.hidden, l.input, 1.0);
    fill(start + l.w2(), l.hidden, l.hidden, 1.0);
    theta_.segment(start + l.b1(), l.hidden).setZero();
    theta_.segment(start + l.b2(), l.hidden).setZero();
    theta_[start + l.b3()] = 0.0;
  }
  fill(l.actor() + l.w3(), 1, l.hidden, 0.01);
  fill(l.critic() + l.w3(), 1, l.hidden, 1.0);
}

void PolicyNetwork::project() {
  auto& s = theta_[layout_.log_std()];
  s = std::clamp(s, kLogStdMin, kLogStdMax);
}

PolicyOutput PolicyNetwork::forward(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != layout_.input) {
    throw ContractViolation(
        fmt::format("policy expects {} inputs, got {}", layout_.input, x.size()));
  }
  const MatrixXd input = Eigen::Map<const VectorXd>(x.data(), layout_.input);
  const BatchActivations act = forward_batch(input);
  PolicyOutput out;
  out.mean = require_finite(act.mean[0], "policy mean");
  out.value = require_finite(act.value[0], "value estimate");
  out.log_std = log_std();
  return out;
}

BatchActivations PolicyNetwork::forward_batch(const MatrixXd& x) const {
  BatchActivations act;
  head_forward(head(layout_, theta_, layout_.actor()), x, act.actor_h1, act.actor_h2, act.mean);
  head_forward(head(layout_, theta_, layout_.critic()), x, act.critic_h1, act.critic_h2,
               act.value);
  return act;
}

VectorXd PolicyNetwork::backward(const MatrixXd& x, const BatchActivations& act,
                                 const Eigen::RowVectorXd& dmean,
                                 const Eigen::RowVectorXd& dvalue, double dlog_std) const {
  VectorXd grad = VectorXd::Zero(layout_.size());
  head_backward(layout_, head(layout_, theta_, layout_.actor()), x, act.actor_h1, act.actor_h2,
                dmean, grad.data() + layout_.actor());
  head_backward(layout_, head(layout_, theta_, layout_.critic()), x, act.critic_h1,
                act.critic_h2, dvalue, grad.data() + layout_.critic());
  grad[layout_.log_std()] = dlog_std;
  return grad;
}

RunningNormalizer::RunningNormalizer(int dim)
    : mean_(VectorXd::Zero(dim)), var_(VectorXd::Ones(dim)) {}

void RunningNormalizer::update(std::span<const double> x) {
  const Eigen::Map<const VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
  if (v.size() != mean_.size()) throw ContractViolation("normalizer dimension mismatch");
  if (count_ == 0.0) {
    count_ = 1.0;
    mean_ = v;
    var_.setZero();
    return;
  }
  const double n = count_ + 1.0;
  const VectorXd delta = v - mean_;
  mean_ += delta / n;
  // population variance, incremental form
  var_ = (var_ * count_ + delta.cwiseProduct(v - mean_)) / n;
  count_ = n;
}

VectorXd RunningNormalizer::normalize(std::span<const double> x) const {
  const Eigen::Map<const VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
  const VectorXd z =
      ((v - mean_).array() / (var_.array() + kEpsilon).sqrt()).matrix();
  return z.cwiseMax(-kClip).cwiseMin(kClip);
}

void RunningNormalizer::set_state(double count, VectorXd mean, VectorXd var) {
  if (mean.size() != var.size()) throw ContractViolation("normalizer state size mismatch");
  count_ = count;
  mean_ = std::move(mean);
  var_ = std::move(var);
}

double gaussian_log_prob(double x, double mean, double log_std) {
  const double z = (x - mean) * std::exp(-log_std);
  return -0.5 * z * z - log_std - 0.5 * std::log(2.0 * std::numbers::pi);
}

ActionSample sample_action(double mean, double log_std, PolicyRng& rng) {
  std::normal_distribution<double> standard_normal(0.0, 1.0);
  const double z = standard_normal(rng);
  ActionSample s;
  s.raw_action = mean + std::exp(log_std) * z;
  s.log_prob = gaussian_log_prob(s.raw_action, mean, log_std);
  return s;
}

}  // namespace croprl::rl
