#include "croprl/rl/gae.hpp"

#include <fmt/format.h>

#include "croprl/error.hpp"

namespace croprl::rl {

AdvantageEstimate gae_advantages(std::span<const double> rewards, std::span<const double> values,
                                 std::span<const std::uint8_t> dones, double last_value, double gamma,
                                 double lambda) {
  const std::size_t n = rewards.size();
  if (values.size() != n || dones.size() != n) {
    throw ContractViolation(fmt::format("gae: length mismatch (rewards {}, values {}, dones {})",
                                        n, values.size(), dones.size()));
  }
  AdvantageEstimate out;
  out.advantages.assign(n, 0.0);
  out.returns.assign(n, 0.0);

  double next_advantage = 0.0;
  double next_value = last_value;
  for (std::size_t i = n; i-- > 0;) {
    const double not_done = dones[i] ? 0.0 : 1.0;
    const double delta = rewards[i] + gamma * next_value * not_done - values[i];
    next_advantage = delta + gamma * lambda * not_done * next_advantage;
    out.advantages[i] = next_advantage;
    out.returns[i] = next_advantage + values[i];
    next_value = values[i];
  }
  return out;
}

}  // namespace croprl::rl
