#pragma once

#include <cstdint>

#include "croprl/episode_log.hpp"
#include "croprl/rl/policy.hpp"

namespace croprl::rl {

/// Ignores observations and always requests `level` mm. Throws
/// ContractViolation unless level is in [0, 100].
ActionFn constant_policy(double level);

/// Acts with a trained agent. Deterministic mode uses the policy mean;
/// otherwise actions are sampled from a private stream seeded by `seed`.
ActionFn agent_policy(const Agent& agent, bool deterministic, std::uint64_t seed);

}  // namespace croprl::rl
