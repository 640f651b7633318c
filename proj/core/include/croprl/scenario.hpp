#pragma once

#include <cstdint>
#include <filesystem>

#include "croprl/environment.hpp"

namespace croprl {

/// A scenario file ties together crop, soil and weather files plus the
/// season and noise settings. Relative paths resolve against the scenario
/// file's directory.
///
///   crop_file = ../crop/potato_russet.params
///   soil_file = ../soil/sandy_loam.params
///   weather_file = ../weather/semiarid_synthetic.csv
///   sowing_date = 2000-04-01
///   seed = 17
///   # optional: max_season_days, irrigation_cost, action_min, action_max,
///   # initial_water_content, noise_<biomass|paw|tmax|tmin|tavg|rain|srad|co2|vap|wind>
struct Scenario {
  std::filesystem::path path;
  EnvConfig config;
  std::uint64_t seed = 0;
};

Scenario load_scenario(const std::filesystem::path& path);

}  // namespace croprl
