#include "croprl/scenario.hpp"

#include <fmt/format.h>

#include "croprl/error.hpp"
#include "croprl/keyvalue.hpp"

namespace croprl {

Scenario load_scenario(const std::filesystem::path& path) {
  const KeyValueFile file = KeyValueFile::load(path);
  file.reject_unknown({"crop_file", "soil_file", "weather_file", "sowing_date", "seed",
                       "max_season_days", "irrigation_cost", "action_min", "action_max",
                       "initial_water_content", "noise_biomass", "noise_paw", "noise_tmax",
                       "noise_tmin", "noise_tavg", "noise_rain", "noise_srad", "noise_co2",
                       "noise_vap", "noise_wind"});

  const auto base = path.parent_path();
  const auto resolve = [&](const std::string& key) {
    std::filesystem::path p = file.string(key);
    return p.is_absolute() ? p : base / p;
  };

  Scenario scenario;
  scenario.path = path;
  EnvConfig& c = scenario.config;
  c.crop = CropParameters::load(resolve("crop_file"));
  c.soil = SoilParameters::load(resolve("soil_file"));
  c.weather = std::make_shared<const WeatherSeries>(load_weather_csv(resolve("weather_file")));
  try {
    c.sowing_date = parse_iso_date(file.string("sowing_date"));
  } catch (const DataError& e) {
    throw ConfigError(fmt::format("{}: key 'sowing_date': {}", file.source(), e.what()));
  }

  const long long seed = file.integer("seed");
  if (seed < 0) throw ConfigError(fmt::format("{}: key 'seed' must be >= 0", file.source()));
  scenario.seed = static_cast<std::uint64_t>(seed);

  if (file.contains("max_season_days")) {
    c.max_season_days = static_cast<int>(file.integer("max_season_days"));
  }
  c.irrigation_cost = file.optional_number("irrigation_cost").value_or(c.irrigation_cost);
  c.action_min = file.optional_number("action_min").value_or(c.action_min);
  c.action_max = file.optional_number("action_max").value_or(c.action_max);
  c.initial_water_content = file.optional_number("initial_water_content");

  NoiseSpec& n = c.noise;
  for (auto [key, field] :
       {std::pair{"noise_biomass", &n.biomass}, {"noise_paw", &n.paw}, {"noise_tmax", &n.tmax},
        {"noise_tmin", &n.tmin}, {"noise_tavg", &n.tavg}, {"noise_rain", &n.rain},
        {"noise_srad", &n.srad}, {"noise_co2", &n.co2}, {"noise_vap", &n.vap},
        {"noise_wind", &n.wind}}) {
    *field = file.optional_number(key).value_or(*field);
  }

  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", file.source(), e.what()));
  }
  return scenario;
}

}  // namespace croprl
