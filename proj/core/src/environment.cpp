#include "croprl/environment.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "croprl/error.hpp"

namespace croprl {

void EnvConfig::validate() const {
  crop.validate();
  soil.validate();
  noise.validate();
  if (!weather || weather->records.empty()) throw ConfigError("scenario has no weather data");
  if (max_season_days < 1) throw ConfigError("max_season_days must be >= 1");
  if (!(action_min < action_max) || !std::isfinite(action_min) || !std::isfinite(action_max)) {
    throw ConfigError(
        fmt::format("action bounds must be ordered, got [{}, {}]", action_min, action_max));
  }
  if (!std::isfinite(irrigation_cost)) throw ConfigError("irrigation_cost must be finite");
  if (initial_water_content && !(*initial_water_content >= 0.0)) {
    throw ConfigError("initial_water_content must be >= 0");
  }
  const std::size_t first = sowing_index();
  const std::size_t needed = first + static_cast<std::size_t>(max_season_days) + 1;
  if (weather->size() < needed) {
    throw ConfigError(fmt::format(
        "weather series ends {} but the season window needs data through {} "
        "(sowing {} + {} days)",
        format_iso_date(weather->records.back().date),
        format_iso_date(std::chrono::year_month_day{
            std::chrono::sys_days{sowing_date} + std::chrono::days{max_season_days}}),
        format_iso_date(sowing_date), max_season_days));
  }
}

std::size_t EnvConfig::sowing_index() const { return weather->index_of(sowing_date); }

std::map<std::string, double> StepInfo::as_map() const {
  return {
      {"requested_action", requested_action},
      {"applied_irrigation", applied_irrigation},
      {"action_clamped", action_clamped ? 1.0 : 0.0},
      {"biomass", biomass},
      {"paw", paw},
      {"cumulative_tt", cumulative_tt},
      {"arid", arid},
      {"f_temp", stress.f_temp},
      {"f_heat", stress.f_heat},
      {"f_co2", stress.f_co2},
      {"f_water", stress.f_water},
      {"f_solar", stress.f_solar},
      {"rain", fluxes.rain},
      {"runoff", fluxes.runoff},
      {"et0", fluxes.et0},
      {"uptake", fluxes.uptake},
      {"drainage", fluxes.drainage},
      {"yield_so_far", yield_so_far},
      {"matured", matured ? 1.0 : 0.0},
      {"day", static_cast<double>(day)},
  };
}

double reward_fn(double action, bool is_harvest, double yield_t_ha, double irrigation_cost) {
  return irrigation_cost * action + (is_harvest ? yield_t_ha : 0.0);
}

Environment::Environment(EnvConfig config) : config_(std::move(config)) {
  config_.validate();
  sowing_index_ = config_.sowing_index();
}

const WeatherRecord& Environment::today() const {
  return (*config_.weather)[sowing_index_ + static_cast<std::size_t>(crop_.days_elapsed)];
}

Observation Environment::reset(std::uint64_t seed) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  rng_.seed(seq);
  crop_ = CropState::initial(config_.crop);
  soil_ = SoilState{config_.initial_water_content.value_or(config_.soil.awc)};
  started_ = true;
  done_ = false;
  observation_ = observe();
  return observation_;
}

StepResult Environment::step(double action) {
  if (!started_) throw ContractViolation("step() called before reset()");
  if (done_) throw ContractViolation("step() called on a finished episode; call reset()");
  if (!std::isfinite(action)) {
    throw ContractViolation(fmt::format("non-finite action {}", action));
  }

  StepResult result;
  StepInfo& info = result.info;
  info.requested_action = action;
  info.applied_irrigation = std::clamp(action, config_.action_min, config_.action_max);
  info.action_clamped = info.applied_irrigation != action;

  const WeatherRecord& w = today();
  const WaterStepResult water =
      step_water(soil_, w.rain, info.applied_irrigation, w, config_.soil);
  const double arid_seen = config_.disable_water_stress ? 0.0 : water.arid;
  auto [crop, stress] = step_crop(crop_, w.tavg, w.tmax, w.srad, w.co2, arid_seen, config_.crop);
  soil_ = water.state;
  crop_ = crop;

  done_ = crop_.matured || crop_.days_elapsed >= config_.max_season_days;
  const double yield = harvestable_yield(crop_, config_.crop);
  result.reward = reward_fn(info.applied_irrigation, done_, yield, config_.irrigation_cost);
  result.done = done_;

  info.biomass = crop_.cumulative_biomass;
  info.paw = soil_.paw_mm(config_.soil);
  info.cumulative_tt = crop_.cumulative_tt;
  info.arid = water.arid;
  info.stress = stress;
  info.fluxes = water.fluxes;
  info.yield_so_far = yield;
  info.matured = crop_.matured;
  info.day = crop_.days_elapsed;

  observation_ = observe();
  result.observation = observation_;
  return result;
}

Observation Environment::observe() {
  const auto& series = *config_.weather;
  const std::size_t today_index = sowing_index_ + static_cast<std::size_t>(crop_.days_elapsed);
  const WeatherRecord& today_w = series[today_index];
  const bool has_tomorrow = today_index + 1 < series.size();

  Observation o{};
  o[obs::kBiomass] = noisy_reading(crop_.cumulative_biomass, config_.noise.biomass, rng_);
  o[obs::kCumulativeTt] = crop_.cumulative_tt;
  o[obs::kDaysSinceSowing] = static_cast<double>(crop_.days_elapsed);

  const auto today_fields = weather_fields(today_w);
  std::copy(today_fields.begin(), today_fields.end(), o.begin() + obs::kTodayWeather);

  const auto forecast_fields =
      has_tomorrow ? weather_fields(forecast(series[today_index + 1], config_.noise, rng_))
                   : today_fields;
  std::copy(forecast_fields.begin(), forecast_fields.end(), o.begin() + obs::kForecast);
  o[obs::kNoTomorrow] = has_tomorrow ? 0.0 : 1.0;

  o[obs::kPaw] = noisy_reading(soil_.paw_mm(config_.soil), config_.noise.paw, rng_);
  return o;
}

double potential_yield(const EnvConfig& config) {
  EnvConfig reference = config;
  reference.disable_water_stress = true;
  reference.noise = NoiseSpec::zero();
  Environment env(std::move(reference));
  env.reset(0);
  StepResult r;
  while (!env.done()) r = env.step(0.0);
  return r.info.yield_so_far;
}

double normalized_return(double episode_return, double reference_yield) {
  if (!(reference_yield > 0.0)) {
    throw ContractViolation(
        fmt::format("normalized return needs a positive reference yield, got {}",
                    reference_yield));
  }
  return episode_return / reference_yield;
}

double normalized_return(double episode_return, const EnvConfig& config) {
  return normalized_return(episode_return, potential_yield(config));
}

}  // namespace croprl
