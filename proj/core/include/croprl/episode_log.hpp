#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <vector>

#include "croprl/environment.hpp"

namespace croprl {

/// Maps the current observation to an irrigation request in mm.
using ActionFn = std::function<double(const Observation&)>;

struct EpisodeDay {
  Observation observation{};  // what the action was chosen from
  double action = 0.0;
  double reward = 0.0;
  bool done = false;
  StepInfo info;
};

struct EpisodeTrace {
  std::uint64_t seed = 0;
  std::vector<EpisodeDay> days;
  double episode_return = 0.0;
  double total_irrigation = 0.0;  // mm actually applied
  double final_yield = 0.0;       // t/ha
  bool matured = false;
};

/// Resets `env` with `seed` and runs it to completion.
EpisodeTrace run_episode(Environment& env, std::uint64_t seed, const ActionFn& policy);

/// One row per simulated day: observation, action, reward and true state.
void write_episode_csv(std::ostream& out, const EpisodeTrace& trace, const EnvConfig& config);
void write_episode_csv(const std::filesystem::path& path, const EpisodeTrace& trace,
                       const EnvConfig& config);

/// Writes through a temporary sibling and renames it into place, so readers
/// never observe a half-written file.
void write_file_atomically(const std::filesystem::path& path,
                           const std::function<void(std::ostream&)>& writer);

}  // namespace croprl
