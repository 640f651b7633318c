#include "croprl/water_balance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "croprl/error.hpp"
#include "croprl/keyvalue.hpp"

namespace croprl {
namespace {

constexpr double kStefanBoltzmann = 4.903e-9;  // MJ K^-4 m^-2 day^-1
constexpr double kAlbedo = 0.23;
constexpr double kSolarConstant = 0.0820;      // MJ m^-2 min^-1

void require(bool ok, const char* key, const std::string& why) {
  if (!ok) throw ConfigError(fmt::format("soil parameter '{}': {}", key, why));
}

// kPa
double saturation_vapour_pressure(double t) {
  return 0.6108 * std::exp(17.27 * t / (t + 237.3));
}

// MJ m^-2 day^-1
double extraterrestrial_radiation(double latitude_deg, int doy) {
  const double phi = latitude_deg * std::numbers::pi / 180.0;
  const double angle = 2.0 * std::numbers::pi * doy / 365.0;
  const double dr = 1.0 + 0.033 * std::cos(angle);
  const double decl = 0.409 * std::sin(angle - 1.39);
  const double ws = std::acos(std::clamp(-std::tan(phi) * std::tan(decl), -1.0, 1.0));
  return 24.0 * 60.0 / std::numbers::pi * kSolarConstant * dr *
         (ws * std::sin(phi) * std::sin(decl) + std::cos(phi) * std::cos(decl) * std::sin(ws));
}

}  // namespace

void SoilParameters::validate() const {
  for (auto [name, value] :
       {std::pair{"awc", awc}, {"rcn", rcn}, {"ddc", ddc}, {"rzd", rzd}, {"wuc", wuc},
        {"latitude", latitude}, {"elevation", elevation}}) {
    require(std::isfinite(value), name, "must be finite");
  }
  require(awc > 0.0 && awc < 1.0, "awc", "must be in (0, 1)");
  require(rcn >= 30.0 && rcn <= 100.0, "rcn", "must be in [30, 100]");
  require(ddc >= 0.0 && ddc <= 1.0, "ddc", "must be in [0, 1]");
  require(rzd > 0.0, "rzd", "must be > 0");
  require(wuc > 0.0 && wuc < 1.0, "wuc", "must be in (0, 1)");
  require(latitude >= -90.0 && latitude <= 90.0, "latitude", "must be in [-90, 90]");
}

SoilParameters SoilParameters::from_keyvalue(const KeyValueFile& file) {
  file.reject_unknown({"awc", "rcn", "ddc", "rzd", "wuc", "latitude", "elevation"});
  SoilParameters s;
  s.awc = file.number("awc");
  s.rcn = file.number("rcn");
  s.ddc = file.number("ddc");
  s.rzd = file.number("rzd");
  s.wuc = file.number("wuc");
  s.latitude = file.number("latitude");
  s.elevation = file.number("elevation");
  try {
    s.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", file.source(), e.what()));
  }
  return s;
}

SoilParameters SoilParameters::load(const std::filesystem::path& path) {
  return from_keyvalue(KeyValueFile::load(path));
}

double penman_monteith_et0(const WeatherRecord& w, const SoilParameters& soil) {
  if (w.tmax < w.tmin) throw ContractViolation("penman_monteith_et0: tmax < tmin");
  if (w.wind < 0.0) throw ContractViolation("penman_monteith_et0: negative wind");
  if (w.vap < 0.0) throw ContractViolation("penman_monteith_et0: negative vapour pressure");

  const double pressure = 101.3 * std::pow((293.0 - 0.0065 * soil.elevation) / 293.0, 5.26);
  const double gamma = 0.000665 * pressure;

  const double tmean = 0.5 * (w.tmax + w.tmin);
  const double slope =
      4098.0 * saturation_vapour_pressure(tmean) / ((tmean + 237.3) * (tmean + 237.3));
  const double es = 0.5 * (saturation_vapour_pressure(w.tmax) + saturation_vapour_pressure(w.tmin));
  const double ea = w.vap / 10.0;  // hPa -> kPa

  const double ra = extraterrestrial_radiation(soil.latitude, w.day_of_year());
  const double rso = (0.75 + 2e-5 * soil.elevation) * ra;
  const double rns = (1.0 - kAlbedo) * w.srad;
  const double relative_shortwave = rso > 0.0 ? std::min(w.srad / rso, 1.0) : 1.0;
  const double tk_max = w.tmax + 273.16;
  const double tk_min = w.tmin + 273.16;
  const double rnl = kStefanBoltzmann * 0.5 * (std::pow(tk_max, 4) + std::pow(tk_min, 4)) *
                     (0.34 - 0.14 * std::sqrt(ea)) * (1.35 * relative_shortwave - 0.35);
  const double rn = rns - rnl;

  const double numerator =
      0.408 * slope * rn + gamma * (900.0 / (tmean + 273.0)) * w.wind * (es - ea);
  const double denominator = slope + gamma * (1.0 + 0.34 * w.wind);
  return std::max(require_finite(numerator / denominator, "reference evapotranspiration"), 0.0);
}

double curve_number_runoff(double rain, double rcn) {
  const double retention = 25400.0 / rcn - 254.0;
  const double abstraction = 0.2 * retention;
  if (rain <= abstraction) return 0.0;
  const double excess = rain - abstraction;
  return excess * excess / (rain + 0.8 * retention);
}

double deep_drainage(double water_content, const SoilParameters& soil) {
  return soil.ddc * soil.rzd * std::max(water_content - soil.awc, 0.0);
}

double water_uptake(double water_content, double et0, const SoilParameters& soil) {
  return std::min(soil.wuc * soil.rzd * water_content, et0);
}

double arid_index(double uptake, double et0) {
  if (et0 <= 0.0) return 0.0;
  return std::clamp(1.0 - uptake / et0, 0.0, 1.0);
}

WaterStepResult apply_water_fluxes(const SoilState& state, double rain, double irrigation,
                                   double et0, const SoilParameters& soil) {
  if (rain < 0.0 || irrigation < 0.0 || et0 < 0.0) {
    throw ContractViolation(fmt::format(
        "water step needs non-negative inputs (rain {}, irrigation {}, et0 {})", rain,
        irrigation, et0));
  }
  WaterStepResult out;
  WaterFluxes& f = out.fluxes;
  f.rain = rain;
  f.irrigation = irrigation;
  f.et0 = et0;

  f.runoff = curve_number_runoff(rain, soil.rcn);

  // Bookkeeping is in mm so the balance closes to rounding.
  double paw = state.water_content * soil.rzd;
  paw += rain - f.runoff + irrigation;
  const double wc_infiltrated = paw / soil.rzd;

  f.uptake = water_uptake(wc_infiltrated, et0, soil);
  out.arid = arid_index(f.uptake, et0);
  paw -= f.uptake;

  f.drainage = deep_drainage(paw / soil.rzd, soil);
  paw -= f.drainage;

  out.state.water_content = std::max(paw, 0.0) / soil.rzd;
  return out;
}

WaterStepResult step_water(const SoilState& state, double rain, double irrigation,
                           const WeatherRecord& w, const SoilParameters& soil) {
  return apply_water_fluxes(state, rain, irrigation, penman_monteith_et0(w, soil), soil);
}

}  // namespace croprl
