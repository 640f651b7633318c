#pragma once

#include <filesystem>
#include <utility>

namespace croprl {

class KeyValueFile;

/// Crop/cultivar coefficients of the SIMPLE model.
///
/// Thermal quantities are degree-days above `t_base`; temperatures are °C.
struct CropParameters {
  double t_sum = 0.0;          // thermal time sowing -> maturity
  double harvest_index = 0.0;  // yield / biomass
  double i50a = 0.0;           // thermal time to 50% interception (growth)
  double i50b = 0.0;           // thermal time before maturity at 50% interception (senescence)
  double t_base = 0.0;
  double t_opt = 0.0;
  double rue = 0.0;            // g biomass per MJ intercepted radiation
  double i50max_h = 0.0;       // max daily i50b increase from heat stress
  double i50max_w = 0.0;       // max daily i50b increase from drought stress
  double t_heat = 0.0;         // TMAX where heat stress starts
  double t_extreme = 0.0;      // TMAX where growth stops
  double s_co2 = 0.0;          // relative RUE increase per ppm above 350
  double s_water = 0.0;        // drought sensitivity on ARID
  double f_solar_max = 0.95;

  /// Throws ConfigError naming the first violated field.
  void validate() const;

  static CropParameters from_keyvalue(const KeyValueFile& file);
  static CropParameters load(const std::filesystem::path& path);
};

struct CropState {
  double cumulative_biomass = 0.0;  // g/m²
  double cumulative_tt = 0.0;       // degree-days
  double i50b_effective = 0.0;      // degree-days, >= CropParameters::i50b
  int days_elapsed = 0;
  bool matured = false;

  /// State at sowing.
  static CropState initial(const CropParameters& p);
};

struct DailyStressFactors {
  double f_temp = 0.0;
  double f_heat = 0.0;
  double f_co2 = 0.0;
  double f_water = 0.0;
  double f_solar = 0.0;
};

double thermal_time_delta(double tavg, double t_base);
double f_temp(double tavg, const CropParameters& p);
double f_heat(double tmax, const CropParameters& p);
double f_co2(double co2_ppm, const CropParameters& p);
double f_water(double arid, const CropParameters& p);

/// Canopy interception: the smaller of the growth and senescence logistics.
double f_solar(double cumulative_tt, double i50a, double i50b_effective, double t_sum,
               double f_solar_max);

/// Heat and drought stress move the senescence midpoint earlier.
double update_senescence(double i50b_effective, double heat, double water,
                         const CropParameters& p);

/// g/m²/day; `srad` in MJ/m²/day.
double daily_biomass_rate(double srad, const DailyStressFactors& stress, double rue);

/// One day of crop development.
///
/// Order: stress factors from today's weather and `arid`, then thermal time
/// and senescence are advanced, the canopy fraction is evaluated on the
/// advanced state, and biomass grows by the resulting rate. Throws
/// ContractViolation if `state` has already matured.
std::pair<CropState, DailyStressFactors> step_crop(const CropState& state, double tavg,
                                                   double tmax, double srad, double co2,
                                                   double arid, const CropParameters& p);

/// Final yield in t/ha; throws ContractViolation before maturity.
double yield_at_maturity(const CropState& state, const CropParameters& p);

/// Yield in t/ha from the current biomass, no maturity requirement.
double harvestable_yield(const CropState& state, const CropParameters& p);

}  // namespace croprl
