#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "croprl/crop_model.hpp"
#include "croprl/error.hpp"
#include "croprl/keyvalue.hpp"
#include "fixtures.hpp"

using namespace croprl;
using croprl::testing::sample_crop;

namespace {

CropParameters with_temps(double t_base, double t_opt) {
  CropParameters p = sample_crop();
  p.t_base = t_base;
  p.t_opt = t_opt;
  return p;
}

}  // namespace

TEST(ThermalTime, AboveBelowAndAtBase) {
  EXPECT_EQ(thermal_time_delta(15, 10), 5);
  EXPECT_EQ(thermal_time_delta(8, 10), 0);
  EXPECT_EQ(thermal_time_delta(10, 10), 0);
}

TEST(FTemp, PiecewiseLinear) {
  const CropParameters p = with_temps(10, 30);
  EXPECT_DOUBLE_EQ(f_temp(20, p), 0.5);
  EXPECT_EQ(f_temp(5, p), 0);
  EXPECT_EQ(f_temp(35, p), 1);
  EXPECT_EQ(f_temp(30, p), 1);
  EXPECT_EQ(f_temp(10, p), 0);
}

TEST(FHeat, PiecewiseLinear) {
  const CropParameters p = sample_crop();  // t_heat 34, t_extreme 45
  EXPECT_EQ(f_heat(34, p), 1);
  EXPECT_DOUBLE_EQ(f_heat(39.5, p), 0.5);
  EXPECT_EQ(f_heat(50, p), 0);
  EXPECT_EQ(f_heat(45, p), 0);
  EXPECT_EQ(f_heat(-10, p), 1);
}

TEST(FCo2, LinearThenSaturating) {
  CropParameters p = sample_crop();
  p.s_co2 = 0.0008;
  EXPECT_DOUBLE_EQ(f_co2(350, p), 1.0);
  EXPECT_DOUBLE_EQ(f_co2(700, p), 1.28);
  EXPECT_DOUBLE_EQ(f_co2(1000, p), 1.28);
  EXPECT_EQ(f_co2(200, p), 1.0);
  EXPECT_EQ(f_co2(0, p), 1.0);
}

TEST(FWater, LinearInArid) {
  CropParameters p = sample_crop();
  p.s_water = 0.4;
  EXPECT_EQ(f_water(0, p), 1);
  EXPECT_DOUBLE_EQ(f_water(0.5, p), 0.8);
  p.s_water = 1.0;
  EXPECT_EQ(f_water(1, p), 0);
  p.s_water = 3.0;
  EXPECT_EQ(f_water(0.9, p), 0);  // clamped
}

TEST(FSolar, LogisticMidpoints) {
  // growth midpoint, senescence far away
  EXPECT_NEAR(f_solar(450, 450, 200, 10000, 0.95), 0.475, 1e-12);
  // senescence midpoint, growth long saturated
  EXPECT_NEAR(f_solar(2300, 10, 200, 2500, 0.95), 0.475, 1e-12);
}

TEST(FSolar, MatchesDeskValue) {
  EXPECT_NEAR(f_solar(600, 450, 200, 2500, 0.95), croprl::testing::kFSolarDesk, 1e-15);
}

TEST(FSolar, StaysBelowMaximum) {
  for (double tt = 0; tt <= 3000; tt += 25) {
    const double f = f_solar(tt, 490, 50, 2300, 0.95);
    EXPECT_GT(f, 0.0);
    EXPECT_LE(f, 0.95);
  }
}

TEST(UpdateSenescence, AddsStressIncrements) {
  CropParameters p = sample_crop();
  p.i50max_h = 100;
  p.i50max_w = 5;
  EXPECT_EQ(update_senescence(200, 1, 1, p), 200);
  EXPECT_DOUBLE_EQ(update_senescence(200, 0, 1, p), 300);
  EXPECT_DOUBLE_EQ(update_senescence(200, 0.5, 0.8, p), 251);
}

TEST(BiomassRate, Products) {
  DailyStressFactors f{1.0, 1.0, 1.0, 1.0, 0.475};
  EXPECT_EQ(daily_biomass_rate(0, f, 1.3), 0);
  EXPECT_NEAR(daily_biomass_rate(20, f, 1.3), 12.35, 1e-12);
  f.f_temp = 0;
  EXPECT_EQ(daily_biomass_rate(20, f, 1.3), 0);
  // the weaker of heat and water limits growth
  DailyStressFactors g{1.0, 0.3, 1.0, 0.6, 0.5};
  EXPECT_DOUBLE_EQ(daily_biomass_rate(10, g, 2.0), 10 * 0.5 * 2.0 * 0.3);
}

TEST(StepCrop, MaturesWhenThermalTimeReachesSum) {
  const CropParameters p = sample_crop();
  CropState s = CropState::initial(p);
  s.cumulative_tt = p.t_sum - 1e-6;
  const auto [next, f] = step_crop(s, 20, 25, 20, 370, 0, p);
  EXPECT_TRUE(next.matured);
  EXPECT_THROW(step_crop(next, 20, 25, 20, 370, 0, p), ContractViolation);
}

TEST(StepCrop, InertDayOnlyAdvancesTheCalendar) {
  const CropParameters p = sample_crop();
  CropState s = CropState::initial(p);
  s.cumulative_biomass = 123;
  s.cumulative_tt = 456;
  const auto [next, f] = step_crop(s, p.t_base - 1, 10, 0, 370, 0, p);
  EXPECT_EQ(next.cumulative_biomass, 123);
  EXPECT_EQ(next.cumulative_tt, 456);
  EXPECT_EQ(next.days_elapsed, 1);
  EXPECT_FALSE(next.matured);
}

TEST(StepCrop, EqualsHandComposition) {
  const CropParameters p = sample_crop();
  const CropState s = CropState::initial(p);
  const auto [a, fa] = step_crop(s, 18.5, 27.0, 22.0, 371.0, 0.35, p);
  const auto [b, fb] = croprl::testing::compose_step(s, 18.5, 27.0, 22.0, 371.0, 0.35, p);
  EXPECT_EQ(a.cumulative_biomass, b.cumulative_biomass);
  EXPECT_EQ(a.cumulative_tt, b.cumulative_tt);
  EXPECT_EQ(a.i50b_effective, b.i50b_effective);
  EXPECT_EQ(fa.f_solar, fb.f_solar);
  // canopy is evaluated on the advanced thermal time
  EXPECT_EQ(fa.f_solar, f_solar(14.5, p.i50a, a.i50b_effective, p.t_sum, p.f_solar_max));
}

TEST(StepCrop, StateIsMonotoneOverASeason) {
  const CropParameters p = sample_crop();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0, 1);
  CropState s = CropState::initial(p);
  int day = 0;
  while (!s.matured && day++ < 400) {
    const double tavg = 5 + 25 * u(rng);
    const auto [n, f] = step_crop(s, tavg, tavg + 12 * u(rng), 30 * u(rng), 360, u(rng), p);
    EXPECT_GE(n.cumulative_biomass, s.cumulative_biomass);
    EXPECT_GE(n.cumulative_tt, s.cumulative_tt);
    EXPECT_GE(n.i50b_effective, s.i50b_effective);
    EXPECT_GE(n.i50b_effective, p.i50b);
    s = n;
  }
  EXPECT_TRUE(s.matured);
}

TEST(StepCrop, WaterStressNeverHelps) {
  const CropParameters p = sample_crop();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  CropState wet = CropState::initial(p);
  CropState dry = wet;
  while (!wet.matured && !dry.matured) {
    const double tavg = 8 + 18 * u(rng);
    const double tmax = tavg + 10;
    const double srad = 10 + 20 * u(rng);
    const double arid = u(rng) < 0.3 ? u(rng) : 0.0;
    wet = step_crop(wet, tavg, tmax, srad, 370, 0.0, p).first;
    dry = step_crop(dry, tavg, tmax, srad, 370, arid, p).first;
    EXPECT_GE(wet.cumulative_biomass, dry.cumulative_biomass);
  }
}

TEST(Yield, UnitConversion) {
  CropParameters p = sample_crop();
  CropState s = CropState::initial(p);
  s.matured = true;
  p.harvest_index = 0.8;
  s.cumulative_biomass = 1000;
  EXPECT_DOUBLE_EQ(yield_at_maturity(s, p), 8.0);
  s.cumulative_biomass = 0;
  EXPECT_EQ(yield_at_maturity(s, p), 0);
  p.harvest_index = 0.85;
  s.cumulative_biomass = 2537.4;
  EXPECT_NEAR(yield_at_maturity(s, p), 21.5679, 1e-12);
}

TEST(Yield, RejectedBeforeMaturity) {
  const CropParameters p = sample_crop();
  CropState s = CropState::initial(p);
  s.cumulative_biomass = 500;
  EXPECT_THROW(yield_at_maturity(s, p), ContractViolation);
  EXPECT_DOUBLE_EQ(harvestable_yield(s, p), 500 * p.harvest_index * 0.01);
}

TEST(CropParameters, LoaderRequiresEveryKey) {
  const std::string full =
      "t_sum = 2300\nharvest_index = 0.9\ni50a = 490\ni50b = 50\nt_base = 4\nt_opt = 22\n"
      "rue = 1.3\ni50max_h = 50\ni50max_w = 30\nt_heat = 34\nt_extreme = 45\n"
      "s_co2 = 0.001\ns_water = 0.4\nf_solar_max = 0.95\n";
  const CropParameters p = CropParameters::from_keyvalue(KeyValueFile::parse(full, "crop.params"));
  EXPECT_EQ(p.t_sum, 2300);
  EXPECT_EQ(p.s_water, 0.4);

  std::string missing = full;
  missing.erase(missing.find("rue"), std::string("rue = 1.3\n").size());
  try {
    CropParameters::from_keyvalue(KeyValueFile::parse(missing, "crop.params"));
    FAIL() << "missing key accepted";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("rue"), std::string::npos) << e.what();
  }
}

TEST(CropParameters, InvariantViolationsNameTheKey) {
  const auto expect_key = [](CropParameters p, const std::string& key) {
    try {
      p.validate();
      FAIL() << key << " violation accepted";
    } catch (const ConfigError& e) {
      EXPECT_NE(std::string(e.what()).find(key), std::string::npos) << e.what();
    }
  };
  CropParameters p = sample_crop();
  p.t_opt = p.t_base;
  expect_key(p, "t_opt");
  p = sample_crop();
  p.t_extreme = p.t_heat - 1;
  expect_key(p, "t_extreme");
  p = sample_crop();
  p.harvest_index = 1.5;
  expect_key(p, "harvest_index");
  p = sample_crop();
  p.rue = -1;
  expect_key(p, "rue");
  p = sample_crop();
  p.t_sum = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(CropParameters, ShippedPotatoFileLoads) {
  const CropParameters p =
      CropParameters::load(croprl::testing::data_dir() / "crop/potato_russet.params");
  EXPECT_NO_THROW(p.validate());
  EXPECT_GT(p.t_sum, p.i50a);
}
