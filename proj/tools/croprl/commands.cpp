#include "commands.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <spdlog/spdlog.h>

#include "croprl/episode_log.hpp"
#include "croprl/error.hpp"
#include "croprl/keyvalue.hpp"
#include "croprl/rl/baselines.hpp"
#include "croprl/rl/checkpoint.hpp"

namespace croprl::cli {
namespace {

class UsageError : public Error {
 public:
  using Error::Error;
};

Scenario load_with_seed(const std::filesystem::path& path, std::optional<std::uint64_t> seed) {
  Scenario s = load_scenario(path);
  if (seed) s.seed = *seed;
  return s;
}

void ensure_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir)) {
    throw Error(fmt::format("cannot create output directory '{}'", dir.string()));
  }
}

}  // namespace

PolicySpec PolicySpec::parse(const std::string& text) {
  PolicySpec spec;
  if (text == "zero") return spec;
  if (text.starts_with("constant:")) {
    const std::string value = text.substr(9);
    double level = 0.0;
    auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), level);
    if (ec != std::errc() || ptr != value.data() + value.size() || !(level >= 0.0) ||
        !(level <= 100.0)) {
      throw UsageError(fmt::format("constant policy needs a level in [0, 100] mm, got '{}'", value));
    }
    spec.level = level;
    return spec;
  }
  if (text.starts_with("checkpoint:") && text.size() > 11) {
    spec.kind = Kind::kCheckpoint;
    spec.checkpoint = text.substr(11);
    return spec;
  }
  throw UsageError(
      fmt::format("unknown policy '{}' (use zero, constant:<mm> or checkpoint:<path>)", text));
}

std::string PolicySpec::describe() const {
  if (kind == Kind::kCheckpoint) return "checkpoint:" + checkpoint.string();
  return fmt::format("constant:{}", level);
}

rl::PolicyFactory make_policy_factory(const PolicySpec& spec, bool deterministic) {
  if (spec.kind == PolicySpec::Kind::kConstant) {
    const double level = spec.level;
    return [level](std::uint64_t) { return rl::constant_policy(level); };
  }
  auto agent = std::make_shared<const rl::Agent>(rl::load_checkpoint(spec.checkpoint));
  return [agent, deterministic](std::uint64_t episode_seed) {
    return rl::agent_policy(*agent, deterministic, rl::derive_seed(episode_seed, 0xe7a1));
  };
}

rl::PpoConfig load_ppo_config(const std::filesystem::path& path) {
  const KeyValueFile file = KeyValueFile::load(path);
  rl::PpoConfig c;
  file.reject_unknown({"gamma", "lambda", "clip", "epochs", "minibatch_size", "learning_rate",
                       "value_coef", "entropy_coef", "max_grad_norm", "iterations",
                       "episodes_per_iteration", "num_threads", "normalizer_warmup_episodes",
                       "hidden", "initial_log_std", "action_scale", "action_offset",
                       "normalize_rewards"});
  const auto real = [&](const char* key, double& field) {
    field = file.optional_number(key).value_or(field);
  };
  const auto whole = [&](const char* key, int& field) {
    if (file.contains(key)) field = static_cast<int>(file.integer(key));
  };
  real("gamma", c.gamma);
  real("lambda", c.lambda);
  real("clip", c.clip);
  whole("epochs", c.epochs);
  whole("minibatch_size", c.minibatch_size);
  real("learning_rate", c.learning_rate);
  real("value_coef", c.value_coef);
  real("entropy_coef", c.entropy_coef);
  real("max_grad_norm", c.max_grad_norm);
  whole("iterations", c.iterations);
  whole("episodes_per_iteration", c.episodes_per_iteration);
  whole("num_threads", c.num_threads);
  whole("normalizer_warmup_episodes", c.normalizer_warmup_episodes);
  whole("hidden", c.hidden);
  real("initial_log_std", c.initial_log_std);
  real("action_scale", c.action_scale);
  real("action_offset", c.action_offset);
  if (file.contains("normalize_rewards")) c.normalize_rewards = file.integer("normalize_rewards") != 0;
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", file.source(), e.what()));
  }
  return c;
}

SimulateSummary cmd_simulate(const SimulateOptions& options) {
  const Scenario scenario = load_with_seed(options.scenario, options.seed);
  const PolicySpec spec = PolicySpec::parse(options.policy);
  ensure_directory(options.out);

  Environment env(scenario.config);
  const ActionFn policy = make_policy_factory(spec, true)(scenario.seed);
  const EpisodeTrace trace = run_episode(env, scenario.seed, policy);

  SimulateSummary s;
  s.yield = trace.final_yield;
  s.total_irrigation = trace.total_irrigation;
  s.episode_return = trace.episode_return;
  s.reference_yield = potential_yield(scenario.config);
  s.normalized_return = normalized_return(trace.episode_return, s.reference_yield);
  s.days = static_cast<int>(trace.days.size());
  s.matured = trace.matured;

  write_episode_csv(options.out / "episode.csv", trace, scenario.config);
  write_file_atomically(options.out / "summary.csv", [&](std::ostream& out) {
    fmt::print(out,
               "policy,seed,yield_t_ha,total_irrigation_mm,episode_return,normalized_return,"
               "reference_yield_t_ha,days,matured\n");
    fmt::print(out, "{},{},{},{},{},{},{},{},{}\n", spec.describe(), scenario.seed, s.yield,
               s.total_irrigation, s.episode_return, s.normalized_return, s.reference_yield,
               s.days, s.matured ? 1 : 0);
  });
  spdlog::info("simulate {}: yield {:.4f} t/ha, irrigation {:.1f} mm, return {:.6f}, "
               "normalized {:.6f}",
               spec.describe(), s.yield, s.total_irrigation, s.episode_return, s.normalized_return);
  return s;
}

rl::TrainResult cmd_train(const TrainOptions& options) {
  const Scenario scenario = load_with_seed(options.scenario, options.seed);
  rl::PpoConfig cfg = options.ppo_config ? load_ppo_config(*options.ppo_config) : rl::PpoConfig{};
  if (options.iterations) cfg.iterations = *options.iterations;
  cfg.validate();
  ensure_directory(options.out);

  rl::TrainResult result =
      rl::train(scenario.config, cfg, scenario.seed, [](const rl::HistoryRow& row) {
        spdlog::info("iteration {:4d}  steps {:7d}  return {:9.5f}  normalized {:.4f}  "
                     "irrigation {:7.1f} mm  clip {:.3f}",
                     row.iteration, row.env_steps, row.mean_return, row.normalized_return,
                     row.mean_irrigation, row.update.clip_fraction);
      });

  write_file_atomically(options.out / "history.csv",
                        [&](std::ostream& out) { rl::write_history_csv(out, result.history); });
  rl::save_checkpoint(options.out / "checkpoint.txt", result.agent);
  spdlog::info("wrote {} history rows and checkpoint to {}", result.history.size(),
               options.out.string());
  return result;
}

rl::EvaluationResult cmd_evaluate(const EvaluateOptions& options) {
  const Scenario scenario = load_with_seed(options.scenario, options.seed);
  const PolicySpec spec = PolicySpec::parse(options.policy);
  if (options.episodes < 1) throw UsageError("--episodes must be >= 1");

  rl::EvaluationResult r = rl::evaluate(
      scenario.config, make_policy_factory(spec, options.deterministic), options.episodes,
      scenario.seed);

  if (options.out) {
    ensure_directory(*options.out);
    write_file_atomically(*options.out / "evaluation.csv", [&](std::ostream& out) {
      fmt::print(out, "episode,seed,yield_t_ha,total_irrigation_mm,episode_return,"
                      "normalized_return,days\n");
      for (std::size_t i = 0; i < r.episodes.size(); ++i) {
        const EpisodeTrace& t = r.episodes[i];
        fmt::print(out, "{},{},{},{},{},{},{}\n", i, t.seed, t.final_yield, t.total_irrigation,
                   t.episode_return, r.normalized_returns[i], t.days.size());
      }
    });
    write_file_atomically(*options.out / "summary.csv", [&](std::ostream& out) {
      fmt::print(out, "policy,episodes,seed,deterministic,mean_return,std_return,"
                      "mean_normalized_return,std_normalized_return,reference_yield_t_ha\n");
      fmt::print(out, "{},{},{},{},{},{},{},{},{}\n", spec.describe(), options.episodes,
                 scenario.seed, options.deterministic ? 1 : 0, r.mean_return, r.std_return,
                 r.mean_normalized, r.std_normalized, r.reference_yield);
    });
  }
  return r;
}

namespace {

void configure_logging() {
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::info);
  if (const char* level = std::getenv("CROPRL_LOG_LEVEL")) {
    const auto parsed = spdlog::level::from_str(level);
    // from_str maps unknown names to "off"; only accept an explicit "off"
    if (parsed != spdlog::level::off || std::string_view(level) == "off") {
      spdlog::set_level(parsed);
    }
  }
}

}  // namespace

int run(int argc, char** argv) {
  configure_logging();

  CLI::App app{"croprl: crop-growth irrigation environment, PPO trainer and baselines"};
  app.require_subcommand(1);

  SimulateOptions sim;
  std::uint64_t sim_seed = 0;
  auto* simulate = app.add_subcommand("simulate", "Run one episode with a scripted or saved policy");
  simulate->add_option("--scenario", sim.scenario, "Scenario file")->required();
  auto* sim_seed_opt = simulate->add_option("--seed", sim_seed, "Seed (default: scenario seed)");
  simulate->add_option("--policy", sim.policy, "zero | constant:<mm> | checkpoint:<path>")
      ->capture_default_str();
  simulate->add_option("--out", sim.out, "Output directory")->required();

  TrainOptions tr;
  std::uint64_t tr_seed = 0;
  int tr_iterations = 0;
  std::filesystem::path tr_config;
  auto* train = app.add_subcommand("train", "Train a PPO agent");
  train->add_option("--scenario", tr.scenario, "Scenario file")->required();
  auto* tr_seed_opt = train->add_option("--seed", tr_seed, "Seed (default: scenario seed)");
  auto* tr_iter_opt = train->add_option("--iterations", tr_iterations, "Training iterations");
  auto* tr_cfg_opt = train->add_option("--ppo-config", tr_config, "PPO options file");
  train->add_option("--out", tr.out, "Output directory")->required();

  EvaluateOptions ev;
  std::uint64_t ev_seed = 0;
  std::filesystem::path ev_out;
  bool stochastic = false;
  auto* evaluate = app.add_subcommand("evaluate", "Evaluate a policy over several episodes");
  evaluate->add_option("--scenario", ev.scenario, "Scenario file")->required();
  auto* ev_seed_opt = evaluate->add_option("--seed", ev_seed, "First episode seed");
  evaluate->add_option("--policy", ev.policy, "zero | constant:<mm> | checkpoint:<path>")
      ->required();
  evaluate->add_option("--episodes", ev.episodes, "Number of episodes")->capture_default_str();
  evaluate->add_flag("--stochastic", stochastic, "Sample actions instead of using the mean");
  auto* ev_out_opt = evaluate->add_option("--out", ev_out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (simulate->parsed()) {
      if (*sim_seed_opt) sim.seed = sim_seed;
      const SimulateSummary s = cmd_simulate(sim);
      fmt::print("yield_t_ha={} total_irrigation_mm={} episode_return={} normalized_return={}\n",
                 s.yield, s.total_irrigation, s.episode_return, s.normalized_return);
    } else if (train->parsed()) {
      if (*tr_seed_opt) tr.seed = tr_seed;
      if (*tr_iter_opt) tr.iterations = tr_iterations;
      if (*tr_cfg_opt) tr.ppo_config = tr_config;
      const rl::TrainResult r = cmd_train(tr);
      if (!r.history.empty()) {
        fmt::print("final_iteration={} normalized_return={}\n", r.history.back().iteration,
                   r.history.back().normalized_return);
      }
    } else if (evaluate->parsed()) {
      if (*ev_seed_opt) ev.seed = ev_seed;
      if (*ev_out_opt) ev.out = ev_out;
      ev.deterministic = !stochastic;
      const rl::EvaluationResult r = cmd_evaluate(ev);
      fmt::print("return {} +/- {}  normalized {} +/- {}  ({} episodes)\n", r.mean_return,
                 r.std_return, r.mean_normalized, r.std_normalized, r.returns.size());
    }
  } catch (const UsageError& e) {
    spdlog::error("{}", e.what());
    return kUsage;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kRuntime;
  }
  return kOk;
}

}  // namespace croprl::cli
