#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "croprl/error.hpp"
#include "croprl/rl/checkpoint.hpp"
#include "croprl/rl/policy.hpp"
#include "fixtures.hpp"

using namespace croprl;
using namespace croprl::rl;

namespace {

std::vector<double> random_input(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> z(0, 1);
  std::vector<double> x(static_cast<std::size_t>(n));
  for (double& v : x) v = z(rng);
  return x;
}

}  // namespace

TEST(PolicyLayout, BlocksTileTheParameterVector) {
  const PolicyLayout l{21, 64};
  EXPECT_EQ(l.head_size(), 21 * 64 + 64 + 64 * 64 + 64 + 64 + 1);
  EXPECT_EQ(l.critic(), l.head_size());
  EXPECT_EQ(l.log_std(), 2 * l.head_size());
  EXPECT_EQ(l.size(), 2 * l.head_size() + 1);
}

TEST(PolicyNetwork, ZeroWeightsGiveZeroOutputs) {
  PolicyNetwork net(PolicyLayout{21, 8}, -0.5);
  net.parameters().setZero();
  net.parameters()[net.layout().log_std()] = -0.5;
  std::mt19937_64 rng(1);
  const auto x = random_input(21, rng);
  const PolicyOutput out = net.forward(x);
  EXPECT_EQ(out.mean, 0.0);
  EXPECT_EQ(out.value, 0.0);
  EXPECT_EQ(out.log_std, -0.5);
}

TEST(PolicyNetwork, ForwardIsDeterministicAndInitialMeanSmall) {
  PolicyNetwork a(PolicyLayout{}), b(PolicyLayout{});
  a.initialize(3);
  b.initialize(3);
  EXPECT_EQ(a.parameters(), b.parameters());
  std::mt19937_64 rng(2);
  const auto x = random_input(21, rng);
  EXPECT_EQ(a.forward(x).mean, a.forward(x).mean);
  EXPECT_EQ(a.forward(x).value, b.forward(x).value);
  EXPECT_LT(std::abs(a.forward(x).mean), 0.2);
  b.initialize(4);
  EXPECT_NE(a.parameters(), b.parameters());
}

TEST(PolicyNetwork, BatchForwardMatchesSingle) {
  PolicyNetwork net(PolicyLayout{21, 16});
  net.initialize(8);
  std::mt19937_64 rng(3);
  Eigen::MatrixXd x(21, 5);
  for (int j = 0; j < 5; ++j) {
    const auto col = random_input(21, rng);
    for (int i = 0; i < 21; ++i) x(i, j) = col[static_cast<std::size_t>(i)];
  }
  const BatchActivations act = net.forward_batch(x);
  for (int j = 0; j < 5; ++j) {
    const PolicyOutput o = net.forward(std::span<const double>(x.col(j).data(), 21));
    // matrix-vector and matrix-matrix kernels may round differently
    EXPECT_NEAR(o.mean, act.mean[j], 1e-13);
    EXPECT_NEAR(o.value, act.value[j], 1e-13);
  }
}

TEST(PolicyNetwork, BackwardMatchesPerturbation) {
  PolicyNetwork net(PolicyLayout{21, 4});
  net.initialize(5);
  net.parameters() *= 3.0;  // larger weights exercise the tanh curvature
  std::mt19937_64 rng(4);
  const auto xv = random_input(21, rng);
  const Eigen::MatrixXd x = Eigen::Map<const Eigen::VectorXd>(xv.data(), 21);
  const BatchActivations act = net.forward_batch(x);
  // d(mean + 0.7 value)/dtheta
  const Eigen::VectorXd g = net.backward(x, act, Eigen::RowVectorXd::Constant(1, 1.0),
                                         Eigen::RowVectorXd::Constant(1, 0.7), 0.0);
  const double h = 1e-6;
  for (Eigen::Index i = 0; i < net.parameters().size() - 1; ++i) {
    PolicyNetwork p = net;
    p.parameters()[i] += h;
    const PolicyOutput up = p.forward(xv);
    p.parameters()[i] -= 2 * h;
    const PolicyOutput down = p.forward(xv);
    const double numeric = ((up.mean + 0.7 * up.value) - (down.mean + 0.7 * down.value)) / (2 * h);
    EXPECT_NEAR(g[i], numeric, 1e-7 + 1e-6 * std::abs(numeric)) << "parameter " << i;
  }
}

TEST(PolicyNetwork, RejectsBadInput) {
  PolicyNetwork net(PolicyLayout{21, 4});
  net.initialize(1);
  std::vector<double> x(20, 0.0);
  EXPECT_THROW(net.forward(x), ContractViolation);
  x.assign(21, 0.0);
  x[3] = std::nan("");
  EXPECT_THROW(net.forward(x), NumericError);
}

TEST(PolicyNetwork, ProjectBoundsLogStd) {
  PolicyNetwork net(PolicyLayout{21, 4});
  net.parameters()[net.layout().log_std()] = -40;
  net.project();
  EXPECT_EQ(net.log_std(), kLogStdMin);
  net.parameters()[net.layout().log_std()] = 40;
  net.project();
  EXPECT_EQ(net.log_std(), kLogStdMax);
}

TEST(Gaussian, LogProbAtMean) {
  for (double s : {-2.0, 0.0, 0.7}) {
    EXPECT_NEAR(gaussian_log_prob(1.5, 1.5, s), -s - 0.5 * std::log(2 * std::numbers::pi), 1e-14);
  }
}

TEST(Gaussian, SampleSpreadMatchesLogStd) {
  PolicyRng rng(10);
  const int n = 100000;
  const double log_std = std::log(1.7);
  double sum = 0, sq = 0;
  for (int i = 0; i < n; ++i) {
    const ActionSample a = sample_action(2.0, log_std, rng);
    ASSERT_NEAR(a.log_prob, gaussian_log_prob(a.raw_action, 2.0, log_std), 1e-12);
    sum += a.raw_action;
    sq += a.raw_action * a.raw_action;
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sq / n - mean * mean);
  EXPECT_NEAR(sd / 1.7, 1.0, 0.02);
}

TEST(Gaussian, FloorCollapsesToMean) {
  PolicyRng rng(11);
  for (int i = 0; i < 100; ++i) EXPECT_NEAR(sample_action(3.0, kLogStdMin, rng).raw_action, 3.0, 0.05);
}

TEST(RunningNormalizer, MatchesBatchStatistics) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> z(0, 1);
  RunningNormalizer norm(3);
  std::vector<std::array<double, 3>> xs;
  for (int i = 0; i < 500; ++i) {
    const std::array<double, 3> x{5 + 2 * z(rng), -100 + 30 * z(rng), 0.25};
    xs.push_back(x);
    norm.update(x);
  }
  for (int d = 0; d < 3; ++d) {
    double m = 0, v = 0;
    for (const auto& x : xs) m += x[d];
    m /= 500;
    for (const auto& x : xs) v += (x[d] - m) * (x[d] - m);
    v /= 500;
    EXPECT_NEAR(norm.mean()[d], m, 1e-9 * (1 + std::abs(m)));
    EXPECT_NEAR(norm.variance()[d], v, 1e-9 * (1 + v));
  }
  EXPECT_EQ(norm.count(), 500);
  // constant feature: no division blow-up, and the output is clipped
  const std::array<double, 3> far{1e6, -100, 0.25};
  const Eigen::VectorXd z0 = norm.normalize(far);
  EXPECT_EQ(z0[0], RunningNormalizer::kClip);
  EXPECT_EQ(z0[2], 0.0);
}

TEST(Checkpoint, RoundTripIsBitExact) {
  Agent a;
  a.network = PolicyNetwork(PolicyLayout{21, 7}, -0.3);
  a.network.initialize(77);
  a.normalizer = RunningNormalizer(21);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 40; ++i) a.normalizer.update(random_input(21, rng));
  a.action_scale = 12.5;
  a.action_offset = 1.0 / 3.0;

  const auto dir = croprl::testing::scratch_dir("checkpoint");
  save_checkpoint(dir / "agent.txt", a);
  EXPECT_FALSE(std::filesystem::exists(dir / "agent.txt.tmp"));
  const Agent b = load_checkpoint(dir / "agent.txt");
  EXPECT_EQ(a.network.parameters(), b.network.parameters());
  EXPECT_EQ(a.network.layout().hidden, b.network.layout().hidden);
  EXPECT_EQ(a.normalizer.mean(), b.normalizer.mean());
  EXPECT_EQ(a.normalizer.variance(), b.normalizer.variance());
  EXPECT_EQ(a.normalizer.count(), b.normalizer.count());
  EXPECT_EQ(a.action_scale, b.action_scale);
  EXPECT_EQ(a.action_offset, b.action_offset);
}

TEST(Checkpoint, CorruptFilesAreRejected) {
  Agent a;
  a.network = PolicyNetwork(PolicyLayout{21, 3});
  a.network.initialize(1);
  a.normalizer = RunningNormalizer(21);
  std::ostringstream out;
  write_checkpoint(out, a);
  const std::string good = out.str();

  std::istringstream truncated(good.substr(0, good.size() / 2));
  EXPECT_THROW(read_checkpoint(truncated), DataError);
  std::string wrong_version = good;
  wrong_version.replace(wrong_version.find(" 1"), 2, " 9");
  std::istringstream v(wrong_version);
  EXPECT_THROW(read_checkpoint(v), DataError);
  std::istringstream empty("");
  EXPECT_THROW(read_checkpoint(empty), DataError);
  EXPECT_THROW(load_checkpoint("/nonexistent/agent.txt"), DataError);
}
