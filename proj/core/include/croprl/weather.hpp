#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace croprl {

/// One day of weather. Column names in files follow the variable names
/// (DATE, TMAX, TMIN, TAVG, RAIN, SRAD, CO2, VAP, WIND).
struct WeatherRecord {
  std::chrono::year_month_day date{};
  double tmax = 0.0;  // °C
  double tmin = 0.0;  // °C
  double tavg = 0.0;  // °C
  double rain = 0.0;  // mm
  double srad = 0.0;  // MJ/m²/day
  double co2 = 0.0;   // ppm
  double vap = 0.0;   // hPa
  double wind = 0.0;  // m/s at 2 m

  int day_of_year() const;
};

inline constexpr std::size_t kWeatherFieldCount = 8;

/// The numeric fields in canonical order: tmax, tmin, tavg, rain, srad, co2, vap, wind.
std::array<double, kWeatherFieldCount> weather_fields(const WeatherRecord& w);

struct WeatherSeries {
  std::vector<WeatherRecord> records;
  bool tavg_from_midpoint = false;  // true when the file had no TAVG column

  std::size_t size() const { return records.size(); }
  const WeatherRecord& operator[](std::size_t i) const { return records[i]; }

  /// Index of `date`, or throws ConfigError if the series does not contain it.
  std::size_t index_of(std::chrono::year_month_day date) const;
};

/// Per-variable observation noise (standard deviations).
struct NoiseSpec {
  double biomass = 1.0;  // g/m²
  double paw = 1.0;      // mm
  double tmax = 3.0;
  double tmin = 2.0;
  double tavg = 2.0;
  double rain = 3.0;
  double srad = 1.0;
  double co2 = 1.0;
  double vap = 1.0;
  double wind = 6.0;

  static NoiseSpec zero();
  void validate() const;
};

/// Random stream owned by one environment instance.
using NoiseRng = std::mt19937_64;

std::chrono::year_month_day parse_iso_date(std::string_view text);
std::string format_iso_date(std::chrono::year_month_day date);

/// Reads and validates a weather CSV; errors name the row and column.
WeatherSeries load_weather_csv(const std::filesystem::path& path);
WeatherSeries parse_weather_csv(std::string_view text, const std::string& source = "<memory>");

/// value + std * z with z ~ N(0, 1) drawn from `rng`. A draw is consumed even
/// when std = 0, so zeroing one variable's noise leaves the others' draws
/// unchanged; the returned value is then exactly `value`.
double noisy_reading(double value, double std, NoiseRng& rng);

/// Noisy copy of `tomorrow`. Non-negative quantities are floored at zero;
/// temperature ordering is not restored.
WeatherRecord forecast(const WeatherRecord& tomorrow, const NoiseSpec& spec, NoiseRng& rng);

}  // namespace croprl
