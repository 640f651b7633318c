#include <random>

#include <benchmark/benchmark.h>

#include "croprl/environment.hpp"
#include "croprl/episode_log.hpp"
#include "croprl/rl/policy.hpp"
#include "croprl/rl/ppo.hpp"
#include "croprl/scenario.hpp"
#include "croprl/water_balance.hpp"

using namespace croprl;

namespace {

const Scenario& shipped_scenario() {
  static const Scenario s =
      load_scenario(std::filesystem::path(CROPRL_BENCH_DATA_DIR) / "scenarios/semiarid_potato.scenario");
  return s;
}

rl::Minibatch random_batch(int m) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z(0, 1);
  rl::Minibatch b;
  b.observations.resize(21, m);
  b.raw_actions.resize(m);
  b.old_log_probs.resize(m);
  b.advantages.resize(m);
  b.returns.resize(m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < 21; ++i) b.observations(i, j) = z(rng);
    b.raw_actions[j] = z(rng);
    b.old_log_probs[j] = -1.0 + 0.1 * z(rng);
    b.advantages[j] = z(rng);
    b.returns[j] = z(rng);
  }
  return b;
}

}  // namespace

static void BM_WaterStep(benchmark::State& state) {
  const Scenario& sc = shipped_scenario();
  const WeatherRecord& w = (*sc.config.weather)[sc.config.sowing_index()];
  SoilState s{0.5 * sc.config.soil.awc};
  for (auto _ : state) {
    const WaterStepResult r = step_water(s, w.rain, 5.0, w, sc.config.soil);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_WaterStep);

static void BM_EnvironmentStep(benchmark::State& state) {
  Environment env(shipped_scenario().config);
  env.reset(1);
  for (auto _ : state) {
    StepResult r = env.step(5.0);
    if (r.done) {
      state.PauseTiming();
      env.reset(1);
      state.ResumeTiming();
    }
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_EnvironmentStep);

static void BM_FullEpisode(benchmark::State& state) {
  Environment env(shipped_scenario().config);
  for (auto _ : state) {
    const EpisodeTrace t = run_episode(env, 7, [](const Observation&) { return 10.0; });
    benchmark::DoNotOptimize(t.episode_return);
  }
}
BENCHMARK(BM_FullEpisode)->Unit(benchmark::kMicrosecond);

static void BM_PolicyForward(benchmark::State& state) {
  rl::PolicyNetwork net(rl::PolicyLayout{21, static_cast<int>(state.range(0))});
  net.initialize(1);
  std::vector<double> x(21, 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(net.forward(x));
}
BENCHMARK(BM_PolicyForward)->Arg(64);

static void BM_PpoLoss(benchmark::State& state) {
  rl::PolicyNetwork net(rl::PolicyLayout{21, 64});
  net.initialize(2);
  const rl::Minibatch b = random_batch(static_cast<int>(state.range(0)));
  const rl::PpoConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(rl::ppo_loss(net, b, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PpoLoss)->Arg(64)->Arg(256)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
