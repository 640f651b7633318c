#include "croprl/episode_log.hpp"

#include <chrono>
#include <fstream>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "croprl/error.hpp"

namespace croprl {

EpisodeTrace run_episode(Environment& env, std::uint64_t seed, const ActionFn& policy) {
  EpisodeTrace trace;
  trace.seed = seed;
  Observation current = env.reset(seed);
  while (!env.done()) {
    EpisodeDay day;
    day.observation = current;
    day.action = policy(current);
    StepResult r = env.step(day.action);
    day.reward = r.reward;
    day.done = r.done;
    day.info = r.info;
    trace.episode_return += r.reward;
    trace.total_irrigation += r.info.applied_irrigation;
    current = r.observation;
    trace.days.push_back(day);
  }
  if (!trace.days.empty()) {
    trace.final_yield = trace.days.back().info.yield_so_far;
    trace.matured = trace.days.back().info.matured;
  }
  return trace;
}

void write_episode_csv(std::ostream& out, const EpisodeTrace& trace, const EnvConfig& config) {
  fmt::print(out, "day,date");
  for (std::size_t i = 0; i < kObservationSize; ++i) fmt::print(out, ",obs_{}", i);
  fmt::print(out,
             ",action,applied_irrigation,action_clamped,reward,done,biomass,paw,cumulative_tt,"
             "arid,f_temp,f_heat,f_co2,f_water,f_solar,rain,runoff,et0,uptake,drainage,"
             "yield_so_far\n");

  const auto sowing = std::chrono::sys_days{config.sowing_date};
  for (std::size_t d = 0; d < trace.days.size(); ++d) {
    const EpisodeDay& day = trace.days[d];
    const StepInfo& i = day.info;
    const std::chrono::year_month_day date{sowing + std::chrono::days{static_cast<int>(d)}};
    fmt::print(out, "{},{}", d, format_iso_date(date));
    for (double v : day.observation) fmt::print(out, ",{}", v);
    fmt::print(out, ",{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", day.action,
               i.applied_irrigation, i.action_clamped ? 1 : 0, day.reward, day.done ? 1 : 0,
               i.biomass, i.paw, i.cumulative_tt, i.arid, i.stress.f_temp, i.stress.f_heat,
               i.stress.f_co2, i.stress.f_water, i.stress.f_solar, i.fluxes.rain, i.fluxes.runoff,
               i.fluxes.et0, i.fluxes.uptake, i.fluxes.drainage, i.yield_so_far);
  }
}

void write_episode_csv(const std::filesystem::path& path, const EpisodeTrace& trace,
                       const EnvConfig& config) {
  write_file_atomically(path, [&](std::ostream& out) { write_episode_csv(out, trace, config); });
}

void write_file_atomically(const std::filesystem::path& path,
                           const std::function<void(std::ostream&)>& writer) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(fmt::format("cannot write '{}'", tmp.string()));
    writer(out);
    out.flush();
    if (!out) throw Error(fmt::format("write to '{}' failed", tmp.string()));
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error(fmt::format("cannot move '{}' into place: {}", path.string(), ec.message()));
  }
}

}  // namespace croprl
