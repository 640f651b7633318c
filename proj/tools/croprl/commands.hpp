#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "croprl/rl/ppo.hpp"
#include "croprl/rl/trainer.hpp"
#include "croprl/scenario.hpp"

namespace croprl::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kRuntime = 2 };

/// Parsed `--policy` value: `zero`, `constant:<mm>` or `checkpoint:<path>`.
struct PolicySpec {
  enum class Kind { kConstant, kCheckpoint };
  Kind kind = Kind::kConstant;
  double level = 0.0;
  std::filesystem::path checkpoint;

  static PolicySpec parse(const std::string& text);
  std::string describe() const;
};

/// Policy factory for a spec; checkpoints act on their mean when
/// `deterministic` is set and sample otherwise.
rl::PolicyFactory make_policy_factory(const PolicySpec& spec, bool deterministic);

/// Reads PPO options from a key-value file (keys named like PpoConfig
/// fields); absent keys keep their defaults.
rl::PpoConfig load_ppo_config(const std::filesystem::path& path);

struct SimulateOptions {
  std::filesystem::path scenario;
  std::optional<std::uint64_t> seed;  // overrides the scenario's seed
  std::string policy = "constant:10";
  std::filesystem::path out;
};

struct SimulateSummary {
  double yield = 0.0;
  double total_irrigation = 0.0;
  double episode_return = 0.0;
  double normalized_return = 0.0;
  double reference_yield = 0.0;
  int days = 0;
  bool matured = false;
};

/// Writes `episode.csv` and `summary.csv` into `out`.
SimulateSummary cmd_simulate(const SimulateOptions& options);

struct TrainOptions {
  std::filesystem::path scenario;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> ppo_config;
  std::optional<int> iterations;  // overrides the PPO config
  std::filesystem::path out;
};

/// Writes `history.csv` and `checkpoint.txt` into `out`.
rl::TrainResult cmd_train(const TrainOptions& options);

struct EvaluateOptions {
  std::filesystem::path scenario;
  std::optional<std::uint64_t> seed;
  std::string policy;
  int episodes = 10;
  bool deterministic = true;
  std::optional<std::filesystem::path> out;
};

/// Writes `evaluation.csv` (one row per episode) and `summary.csv` into
/// `out` when given.
rl::EvaluationResult cmd_evaluate(const EvaluateOptions& options);

/// Full command-line entry point; returns the process exit code.
int run(int argc, char** argv);

}  // namespace croprl::cli
