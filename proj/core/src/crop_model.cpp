#include "croprl/crop_model.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "croprl/error.hpp"
#include "croprl/keyvalue.hpp"

namespace croprl {
namespace {

// Logistic slope of the canopy curves, per degree-day.
constexpr double kCanopySlope = 0.01;
constexpr double kCo2Reference = 350.0;
constexpr double kCo2Saturation = 700.0;
// g/m² -> t/ha
constexpr double kGramsPerSquareMeterToTonnesPerHectare = 0.01;

void require(bool ok, const char* key, const std::string& why) {
  if (!ok) throw ConfigError(fmt::format("crop parameter '{}': {}", key, why));
}

}  // namespace

void CropParameters::validate() const {
  const auto finite = [](double v) { return std::isfinite(v); };
  for (auto [name, value] :
       {std::pair{"t_sum", t_sum}, {"harvest_index", harvest_index}, {"i50a", i50a},
        {"i50b", i50b}, {"t_base", t_base}, {"t_opt", t_opt}, {"rue", rue},
        {"i50max_h", i50max_h}, {"i50max_w", i50max_w}, {"t_heat", t_heat},
        {"t_extreme", t_extreme}, {"s_co2", s_co2}, {"s_water", s_water},
        {"f_solar_max", f_solar_max}}) {
    require(finite(value), name, "must be finite");
  }
  require(t_sum > 0.0, "t_sum", "must be > 0");
  require(harvest_index > 0.0 && harvest_index <= 1.0, "harvest_index", "must be in (0, 1]");
  require(i50a > 0.0, "i50a", "must be > 0");
  require(i50b > 0.0, "i50b", "must be > 0");
  require(t_base < t_opt, "t_opt", "must exceed t_base");
  require(rue > 0.0, "rue", "must be > 0");
  require(i50max_h >= 0.0, "i50max_h", "must be >= 0");
  require(i50max_w >= 0.0, "i50max_w", "must be >= 0");
  require(t_heat < t_extreme, "t_extreme", "must exceed t_heat");
  require(s_water >= 0.0, "s_water", "must be >= 0");
  require(f_solar_max > 0.0 && f_solar_max <= 1.0, "f_solar_max", "must be in (0, 1]");
}

CropParameters CropParameters::from_keyvalue(const KeyValueFile& file) {
  file.reject_unknown({"t_sum", "harvest_index", "i50a", "i50b", "t_base", "t_opt", "rue",
                       "i50max_h", "i50max_w", "t_heat", "t_extreme", "s_co2", "s_water",
                       "f_solar_max"});
  CropParameters p;
  p.t_sum = file.number("t_sum");
  p.harvest_index = file.number("harvest_index");
  p.i50a = file.number("i50a");
  p.i50b = file.number("i50b");
  p.t_base = file.number("t_base");
  p.t_opt = file.number("t_opt");
  p.rue = file.number("rue");
  p.i50max_h = file.number("i50max_h");
  p.i50max_w = file.number("i50max_w");
  p.t_heat = file.number("t_heat");
  p.t_extreme = file.number("t_extreme");
  p.s_co2 = file.number("s_co2");
  p.s_water = file.number("s_water");
  p.f_solar_max = file.number("f_solar_max");
  try {
    p.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", file.source(), e.what()));
  }
  return p;
}

CropParameters CropParameters::load(const std::filesystem::path& path) {
  return from_keyvalue(KeyValueFile::load(path));
}

CropState CropState::initial(const CropParameters& p) {
  CropState s;
  s.i50b_effective = p.i50b;
  return s;
}

double thermal_time_delta(double tavg, double t_base) { return std::max(tavg - t_base, 0.0); }

double f_temp(double tavg, const CropParameters& p) {
  if (tavg < p.t_base) return 0.0;
  if (tavg >= p.t_opt) return 1.0;
  return (tavg - p.t_base) / (p.t_opt - p.t_base);
}

double f_heat(double tmax, const CropParameters& p) {
  if (tmax <= p.t_heat) return 1.0;
  if (tmax > p.t_extreme) return 0.0;
  return 1.0 - (tmax - p.t_heat) / (p.t_extreme - p.t_heat);
}

double f_co2(double co2_ppm, const CropParameters& p) {
  // Below the reference concentration the response is flat (noisy readings
  // must not push RUE under its reference value).
  const double c = std::clamp(co2_ppm, kCo2Reference, kCo2Saturation);
  return 1.0 + p.s_co2 * (c - kCo2Reference);
}

double f_water(double arid, const CropParameters& p) {
  return std::clamp(1.0 - p.s_water * arid, 0.0, 1.0);
}

double f_solar(double cumulative_tt, double i50a, double i50b_effective, double t_sum,
               double f_solar_max) {
  const double growth = f_solar_max / (1.0 + std::exp(-kCanopySlope * (cumulative_tt - i50a)));
  const double senescence =
      f_solar_max / (1.0 + std::exp(kCanopySlope * (cumulative_tt - (t_sum - i50b_effective))));
  return std::min(growth, senescence);
}

double update_senescence(double i50b_effective, double heat, double water,
                         const CropParameters& p) {
  return i50b_effective + p.i50max_h * (1.0 - heat) + p.i50max_w * (1.0 - water);
}

double daily_biomass_rate(double srad, const DailyStressFactors& s, double rue) {
  return srad * s.f_solar * rue * s.f_co2 * s.f_temp * std::min(s.f_heat, s.f_water);
}

std::pair<CropState, DailyStressFactors> step_crop(const CropState& state, double tavg,
                                                   double tmax, double srad, double co2,
                                                   double arid, const CropParameters& p) {
  if (state.matured) {
    throw ContractViolation(
        fmt::format("step_crop called on a matured crop (day {})", state.days_elapsed));
  }

  DailyStressFactors stress;
  stress.f_temp = f_temp(tavg, p);
  stress.f_heat = f_heat(tmax, p);
  stress.f_co2 = f_co2(co2, p);
  stress.f_water = f_water(arid, p);

  CropState next = state;
  next.cumulative_tt = state.cumulative_tt + thermal_time_delta(tavg, p.t_base);
  next.i50b_effective = update_senescence(state.i50b_effective, stress.f_heat, stress.f_water, p);
  stress.f_solar = f_solar(next.cumulative_tt, p.i50a, next.i50b_effective, p.t_sum,
                           p.f_solar_max);
  next.cumulative_biomass = state.cumulative_biomass + daily_biomass_rate(srad, stress, p.rue);
  next.days_elapsed = state.days_elapsed + 1;
  next.matured = next.cumulative_tt >= p.t_sum;
  return {next, stress};
}

double yield_at_maturity(const CropState& state, const CropParameters& p) {
  if (!state.matured) {
    throw ContractViolation(
        fmt::format("yield requested before maturity (TT {:.1f} of {:.1f})",
                    state.cumulative_tt, p.t_sum));
  }
  return harvestable_yield(state, p);
}

double harvestable_yield(const CropState& state, const CropParameters& p) {
  return state.cumulative_biomass * p.harvest_index * kGramsPerSquareMeterToTonnesPerHectare;
}

}  // namespace croprl
