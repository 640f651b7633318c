#pragma once

#include <filesystem>

#include "croprl/weather.hpp"

namespace croprl {

class KeyValueFile;

/// Single-bucket root-zone soil description.
struct SoilParameters {
  double awc = 0.0;        // volumetric available water capacity, mm/mm
  double rcn = 0.0;        // runoff curve number, 30..100
  double ddc = 0.0;        // deep drainage coefficient, fraction/day
  double rzd = 0.0;        // root zone depth, mm
  double wuc = 0.096;      // water uptake coefficient, fraction/day
  double latitude = 0.0;   // degrees north
  double elevation = 0.0;  // m above sea level

  void validate() const;

  static SoilParameters from_keyvalue(const KeyValueFile& file);
  static SoilParameters load(const std::filesystem::path& path);
};

struct SoilState {
  double water_content = 0.0;  // mm/mm

  double paw_mm(const SoilParameters& soil) const { return water_content * soil.rzd; }
};

/// Fluxes of one simulated day, all in mm.
struct WaterFluxes {
  double rain = 0.0;
  double runoff = 0.0;
  double irrigation = 0.0;
  double et0 = 0.0;
  double uptake = 0.0;
  double drainage = 0.0;
};

struct WaterStepResult {
  SoilState state;
  double arid = 0.0;
  WaterFluxes fluxes;
};

/// FAO-56 daily grass reference evapotranspiration (mm/day), clamped at 0.
///
/// Uses TMAX/TMIN (mean temperature is their midpoint, as in FAO-56), SRAD,
/// VAP as actual vapour pressure, WIND at 2 m, the site's latitude and
/// elevation, and the record's day of year. Soil heat flux is 0 at daily
/// resolution. Throws ContractViolation on tmax < tmin, wind < 0 or vap < 0,
/// and NumericError if the result is not finite.
double penman_monteith_et0(const WeatherRecord& w, const SoilParameters& soil);

/// SCS curve-number runoff (mm) for a day's rainfall.
double curve_number_runoff(double rain, double rcn);

/// Drainage (mm) of water held above field capacity.
double deep_drainage(double water_content, const SoilParameters& soil);

/// Uptake (mm) limited by supply and by atmospheric demand.
double water_uptake(double water_content, double et0, const SoilParameters& soil);

/// ARID drought index; 0 when there is no demand.
double arid_index(double uptake, double et0);

/// Daily flux sequence with a given reference ET: runoff (rain only),
/// infiltration of rain and irrigation, uptake and ARID from the
/// post-infiltration content, then drainage of the excess above `awc`.
WaterStepResult apply_water_fluxes(const SoilState& state, double rain, double irrigation,
                                   double et0, const SoilParameters& soil);

/// One day of the soil water balance; ET0 is computed from `w`.
WaterStepResult step_water(const SoilState& state, double rain, double irrigation,
                           const WeatherRecord& w, const SoilParameters& soil);

}  // namespace croprl
