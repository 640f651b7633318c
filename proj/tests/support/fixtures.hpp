#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "croprl/crop_model.hpp"
#include "croprl/environment.hpp"
#include "croprl/rl/gae.hpp"
#include "croprl/rl/policy.hpp"
#include "croprl/rl/ppo.hpp"
#include "croprl/water_balance.hpp"
#include "croprl/weather.hpp"

namespace croprl::testing {

// Shipped data directory (set by the build).
std::filesystem::path data_dir();
std::filesystem::path scenario_path();            // noisy default scenario
std::filesystem::path noiseless_scenario_path();  // same with all stds zero

// Fresh, empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

CropParameters sample_crop();
SoilParameters sample_soil();

// Smooth synthetic season starting 2001-04-01: warm, sunny, occasional rain.
std::shared_ptr<WeatherSeries> synthetic_weather(int days, std::uint64_t seed = 1);

EnvConfig sample_config(int days = 260, std::uint64_t weather_seed = 1);

// Independent references -------------------------------------------------

// GAE from its definition: A_t = sum_l (gamma*lambda)^l * delta_{t+l},
// truncated at the end of t's episode.
std::vector<double> gae_bruteforce(const std::vector<double>& rewards,
                                   const std::vector<double>& values,
                                   const std::vector<std::uint8_t>& dones, double last_value,
                                   double gamma, double lambda);

// step_crop rebuilt from the individual operations.
std::pair<CropState, DailyStressFactors> compose_step(const CropState& s, double tavg, double tmax,
                                                      double srad, double co2, double arid,
                                                      const CropParameters& p);

// Central-difference gradient of the total PPO loss.
Eigen::VectorXd fd_loss_gradient(const rl::PolicyNetwork& network, const rl::Minibatch& batch,
                                 const rl::PpoConfig& cfg, double h);

struct GradientCheck {
  double norm_relative_error = 0.0;  // |a - n| / (|a| + |n|) over the whole vector
  double max_entry_error = 0.0;      // max_i |a_i - n_i| / max(|a_i| + |n_i|, floor)
};
GradientCheck compare_gradients(const Eigen::VectorXd& analytic, const Eigen::VectorXd& numeric,
                                double floor = 1e-6);

// Tiny minibatch whose ratios sit away from the clip kinks.
rl::Minibatch random_minibatch(const rl::PolicyNetwork& network, int size, std::mt19937_64& rng);

// Desk values (tests/oracles/desk_oracles.py) -----------------------------

struct Et0Case {
  const char* name;
  double tmax, tmin, srad, vap_hpa, wind, latitude, elevation;
  int year, month, day;
  double expected;
};
inline constexpr Et0Case kEt0Cases[] = {
    // FAO-56 Example 18 inputs (Brussels, 6 July), ea 1.409 kPa
    {"brussels_jul6", 21.5, 12.3, 22.07, 14.09, 2.078, 50.80, 100.0, 2001, 7, 6,
     3.879506166923254},
    {"semiarid_hot_windy", 36.0, 18.0, 29.0, 10.0, 4.0, 46.3, 200.0, 2001, 7, 19,
     9.960300723479108},
    {"semiarid_cool_spring", 14.0, 2.0, 15.0, 7.0, 2.5, 46.3, 200.0, 2001, 4, 5,
     2.4237104392910402},
    {"tropical_highland", 30.0, 19.0, 24.0, 20.0, 1.0, -22.9, 1500.0, 2001, 1, 30,
     5.1147696097080395},
};

inline constexpr double kFSolarDesk = 0.7766957523839614;  // (600, 450, 200, 2500, 0.95)
inline constexpr double kRunoff50mm = 3.2170564043175496;  // rain 50, CN 65

// 100 mm onto a saturated profile (awc .13, rzd 400, ddc .55, et0 5)
inline constexpr double kFloodUptake = 5.0;
inline constexpr double kFloodDrainage = 52.25000000000001;
inline constexpr double kFloodWaterContent = 0.23687499999999997;

}  // namespace croprl::testing
