#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace croprl::rl {

struct AdvantageEstimate {
  std::vector<double> advantages;
  std::vector<double> returns;  // advantages + values
};

/// Generalised advantage estimation over a flat sequence of steps.
///
/// `dones[t]` marks the last step of an episode; nothing is bootstrapped
/// across it. `last_value` is V(s_T) for a trailing unfinished episode.
AdvantageEstimate gae_advantages(std::span<const double> rewards, std::span<const double> values,
                                 std::span<const std::uint8_t> dones, double last_value, double gamma,
                                 double lambda);

}  // namespace croprl::rl
