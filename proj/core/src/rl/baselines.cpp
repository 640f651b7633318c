#include "croprl/rl/baselines.hpp"

#include <memory>

#include <fmt/format.h>

#include "croprl/error.hpp"

namespace croprl::rl {

ActionFn constant_policy(double level) {
  if (!(level >= 0.0 && level <= 100.0)) {
    throw ContractViolation(fmt::format("constant policy level must be in [0, 100], got {}", level));
  }
  return [level](const Observation&) { return level; };
}

ActionFn agent_policy(const Agent& agent, bool deterministic, std::uint64_t seed) {
  auto shared = std::make_shared<const Agent>(agent);
  auto rng = std::make_shared<PolicyRng>(seed);
  return [shared, rng, deterministic](const Observation& o) {
    const Eigen::VectorXd x = shared->normalizer.normalize(o);
    const PolicyOutput out = shared->network.forward(std::span<const double>(x.data(), x.size()));
    const double raw = deterministic ? out.mean : sample_action(out.mean, out.log_std, *rng).raw_action;
    return shared->to_irrigation(raw);
  };
}

}  // namespace croprl::rl
