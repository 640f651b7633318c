#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "croprl/crop_model.hpp"
#include "croprl/water_balance.hpp"
#include "croprl/weather.hpp"

namespace croprl {

inline constexpr double kDefaultIrrigationCost = -1.25e-4;  // reward units per mm
inline constexpr std::size_t kObservationSize = 21;

/// Layout of the flat observation vector.
namespace obs {
inline constexpr std::size_t kBiomass = 0;          // noisy, g/m²
inline constexpr std::size_t kCumulativeTt = 1;     // degree-days since sowing
inline constexpr std::size_t kDaysSinceSowing = 2;
inline constexpr std::size_t kTodayWeather = 3;     // 8 slots, WeatherRecord field order
inline constexpr std::size_t kForecast = 11;        // 8 slots, noisy
inline constexpr std::size_t kNoTomorrow = 19;      // 1 when the forecast is a repeat of today
inline constexpr std::size_t kPaw = 20;             // noisy, mm
}  // namespace obs

using Observation = std::array<double, kObservationSize>;

struct EnvConfig {
  CropParameters crop;
  SoilParameters soil;
  std::shared_ptr<const WeatherSeries> weather;
  NoiseSpec noise;
  std::chrono::year_month_day sowing_date{};
  int max_season_days = 365;
  double irrigation_cost = kDefaultIrrigationCost;
  double action_min = 0.0;
  double action_max = 100.0;
  std::optional<double> initial_water_content;  // defaults to soil.awc
  // Potential-yield mode: the crop never sees drought stress (ARID fed as 0).
  bool disable_water_stress = false;

  /// Checks every invariant, including weather coverage of the season
  /// window (sowing day through sowing + max_season_days). Throws ConfigError.
  void validate() const;
  std::size_t sowing_index() const;
};

/// Diagnostics for one step. Everything here is ground truth.
struct StepInfo {
  double requested_action = 0.0;
  double applied_irrigation = 0.0;
  bool action_clamped = false;
  double biomass = 0.0;       // g/m²
  double paw = 0.0;           // mm
  double cumulative_tt = 0.0;
  double arid = 0.0;
  DailyStressFactors stress;
  WaterFluxes fluxes;
  double yield_so_far = 0.0;  // t/ha from current biomass
  bool matured = false;
  int day = 0;                // days since sowing after the step

  /// Flat name -> value view (used for logs and language bindings).
  std::map<std::string, double> as_map() const;
};

struct StepResult {
  Observation observation{};
  double reward = 0.0;
  bool done = false;
  StepInfo info;
};

/// c_i * action, plus the yield on the harvest step.
double reward_fn(double action, bool is_harvest, double yield_t_ha, double irrigation_cost);

/// Daily irrigation MDP over one growing season.
///
/// Life cycle is reset() then step() until done; a finished episode rejects
/// further steps until the next reset. The noise stream is private to the
/// instance and seeded only by reset(), so two instances never interact.
class Environment {
 public:
  explicit Environment(EnvConfig config);

  Observation reset(std::uint64_t seed);
  StepResult step(double action);

  bool done() const { return done_; }
  bool started() const { return started_; }
  const EnvConfig& config() const { return config_; }
  const CropState& crop_state() const { return crop_; }
  const SoilState& soil_state() const { return soil_; }
  const Observation& last_observation() const { return observation_; }
  /// Weather of the day the next action applies to.
  const WeatherRecord& today() const;

 private:
  Observation observe();

  EnvConfig config_;
  std::size_t sowing_index_ = 0;
  CropState crop_;
  SoilState soil_;
  NoiseRng rng_;
  Observation observation_{};
  bool started_ = false;
  bool done_ = false;
};

/// Final yield (t/ha) of the zero-irrigation rollout with water stress
/// disabled: the season's potential yield without water limitation.
double potential_yield(const EnvConfig& config);

/// episode_return / reference_yield; throws ContractViolation when the
/// reference yield is not positive.
double normalized_return(double episode_return, double reference_yield);
double normalized_return(double episode_return, const EnvConfig& config);

}  // namespace croprl
