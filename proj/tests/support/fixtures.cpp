#include "fixtures.hpp"

#include <chrono>
#include <cmath>
#include <numbers>

#include "croprl/rl/trainer.hpp"

#ifndef CROPRL_TEST_DATA_DIR
#error "CROPRL_TEST_DATA_DIR must point at the shipped data directory"
#endif

namespace croprl::testing {

std::filesystem::path data_dir() { return CROPRL_TEST_DATA_DIR; }
std::filesystem::path scenario_path() { return data_dir() / "scenarios/semiarid_potato.scenario"; }
std::filesystem::path noiseless_scenario_path() {
  return data_dir() / "scenarios/semiarid_potato_noiseless.scenario";
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("croprl_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

CropParameters sample_crop() {
  CropParameters p;
  p.t_sum = 2300;
  p.harvest_index = 0.9;
  p.i50a = 490;
  p.i50b = 50;
  p.t_base = 4;
  p.t_opt = 22;
  p.rue = 1.3;
  p.i50max_h = 50;
  p.i50max_w = 30;
  p.t_heat = 34;
  p.t_extreme = 45;
  p.s_co2 = 0.001;
  p.s_water = 0.4;
  p.f_solar_max = 0.95;
  return p;
}

SoilParameters sample_soil() {
  SoilParameters s;
  s.awc = 0.13;
  s.rcn = 65;
  s.ddc = 0.55;
  s.rzd = 800;
  s.wuc = 0.096;
  s.latitude = 46.3;
  s.elevation = 200;
  return s;
}

std::shared_ptr<WeatherSeries> synthetic_weather(int days, std::uint64_t seed) {
  using namespace std::chrono;
  auto series = std::make_shared<WeatherSeries>();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> jitter(0.0, 1.5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  sys_days day = sys_days{year{2001} / April / 1};
  for (int i = 0; i < days; ++i, day += std::chrono::days{1}) {
    WeatherRecord w;
    w.date = year_month_day{day};
    const double season = std::sin(std::numbers::pi * i / 200.0);
    w.tmax = 18.0 + 14.0 * season + jitter(rng);
    w.tmin = w.tmax - 12.0 - std::abs(jitter(rng));
    w.tavg = 0.5 * (w.tmax + w.tmin);
    w.rain = u(rng) < 0.15 ? 20.0 * u(rng) : 0.0;
    w.srad = 14.0 + 12.0 * season * (w.rain > 0 ? 0.5 : 1.0);
    w.co2 = 370.0 + jitter(rng);
    w.vap = 8.0 + 4.0 * season;
    w.wind = 1.0 + 3.0 * u(rng);
    series->records.push_back(w);
  }
  return series;
}

EnvConfig sample_config(int days, std::uint64_t weather_seed) {
  EnvConfig c;
  c.crop = sample_crop();
  c.soil = sample_soil();
  c.weather = synthetic_weather(days, weather_seed);
  c.sowing_date = c.weather->records.front().date;
  c.max_season_days = days - 1;
  return c;
}

std::vector<double> gae_bruteforce(const std::vector<double>& rewards,
                                   const std::vector<double>& values,
                                   const std::vector<std::uint8_t>& dones, double last_value,
                                   double gamma, double lambda) {
  const std::size_t n = rewards.size();
  std::vector<double> adv(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    double weight = 1.0;
    for (std::size_t k = t; k < n; ++k) {
      double next_value = 0.0;
      if (!dones[k]) next_value = k + 1 < n ? values[k + 1] : last_value;
      const double delta = rewards[k] + gamma * next_value - values[k];
      adv[t] += weight * delta;
      if (dones[k]) break;
      weight *= gamma * lambda;
    }
  }
  return adv;
}

std::pair<CropState, DailyStressFactors> compose_step(const CropState& s, double tavg, double tmax,
                                                      double srad, double co2, double arid,
                                                      const CropParameters& p) {
  DailyStressFactors f;
  f.f_temp = f_temp(tavg, p);
  f.f_heat = f_heat(tmax, p);
  f.f_co2 = f_co2(co2, p);
  f.f_water = f_water(arid, p);
  CropState n = s;
  n.cumulative_tt = s.cumulative_tt + thermal_time_delta(tavg, p.t_base);
  n.i50b_effective = update_senescence(s.i50b_effective, f.f_heat, f.f_water, p);
  f.f_solar = f_solar(n.cumulative_tt, p.i50a, n.i50b_effective, p.t_sum, p.f_solar_max);
  n.cumulative_biomass = s.cumulative_biomass + daily_biomass_rate(srad, f, p.rue);
  n.days_elapsed = s.days_elapsed + 1;
  n.matured = n.cumulative_tt >= p.t_sum;
  return {n, f};
}

Eigen::VectorXd fd_loss_gradient(const rl::PolicyNetwork& network, const rl::Minibatch& batch,
                                 const rl::PpoConfig& cfg, double h) {
  rl::PolicyNetwork probe = network;
  Eigen::VectorXd& theta = probe.parameters();
  Eigen::VectorXd grad(theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    const double saved = theta[i];
    theta[i] = saved + h;
    const double up = rl::ppo_loss(probe, batch, cfg).loss.total;
    theta[i] = saved - h;
    const double down = rl::ppo_loss(probe, batch, cfg).loss.total;
    theta[i] = saved;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

GradientCheck compare_gradients(const Eigen::VectorXd& analytic, const Eigen::VectorXd& numeric,
                                double floor) {
  GradientCheck out;
  const double denom = analytic.norm() + numeric.norm();
  out.norm_relative_error = denom > 0.0 ? (analytic - numeric).norm() / denom : 0.0;
  for (Eigen::Index i = 0; i < analytic.size(); ++i) {
    const double scale = std::max(std::abs(analytic[i]) + std::abs(numeric[i]), floor);
    out.max_entry_error = std::max(out.max_entry_error, std::abs(analytic[i] - numeric[i]) / scale);
  }
  return out;
}

rl::Minibatch random_minibatch(const rl::PolicyNetwork& network, int size, std::mt19937_64& rng) {
  const int input = network.layout().input;
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_real_distribution<double> shift(-0.45, 0.45);

  rl::Minibatch b;
  b.observations.resize(input, size);
  b.raw_actions.resize(size);
  b.old_log_probs.resize(size);
  b.advantages.resize(size);
  b.returns.resize(size);
  for (int j = 0; j < size; ++j) {
    for (int i = 0; i < input; ++i) b.observations(i, j) = z(rng);
    const rl::PolicyOutput out = network.forward(
        std::span<const double>(b.observations.col(j).data(), static_cast<std::size_t>(input)));
    b.raw_actions[j] = out.mean + std::exp(out.log_std) * z(rng);
    const double log_prob = rl::gaussian_log_prob(b.raw_actions[j], out.mean, out.log_std);
    // keep each ratio clear of the clip boundaries so the loss is smooth there
    double s = 0.0;
    do {
      s = shift(rng);
    } while (std::abs(std::exp(s) - 0.8) < 0.03 || std::abs(std::exp(s) - 1.2) < 0.03);
    b.old_log_probs[j] = log_prob - s;
    b.advantages[j] = z(rng);
    b.returns[j] = z(rng);
  }
  return b;
}

}  // namespace croprl::testing
