#include "croprl/weather.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include <fmt/format.h>

#include "croprl/error.hpp"

namespace croprl {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t pos = 0;
  while (true) {
    const auto comma = line.find(',', pos);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(pos)));
      break;
    }
    cells.push_back(trim(line.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return cells;
}

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

}  // namespace

int WeatherRecord::day_of_year() const {
  using namespace std::chrono;
  const sys_days jan1{date.year() / January / 1};
  return static_cast<int>((sys_days{date} - jan1).count()) + 1;
}

std::array<double, kWeatherFieldCount> weather_fields(const WeatherRecord& w) {
  return {w.tmax, w.tmin, w.tavg, w.rain, w.srad, w.co2, w.vap, w.wind};
}

std::size_t WeatherSeries::index_of(std::chrono::year_month_day date) const {
  if (records.empty()) throw ConfigError("weather series is empty");
  using std::chrono::sys_days;
  const auto offset = (sys_days{date} - sys_days{records.front().date}).count();
  if (offset < 0 || static_cast<std::size_t>(offset) >= records.size()) {
    throw ConfigError(fmt::format("date {} is outside the weather series ({} .. {})",
                                  format_iso_date(date), format_iso_date(records.front().date),
                                  format_iso_date(records.back().date)));
  }
  return static_cast<std::size_t>(offset);
}

NoiseSpec NoiseSpec::zero() {
  return NoiseSpec{0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
}

void NoiseSpec::validate() const {
  for (auto [name, value] :
       {std::pair{"biomass", biomass}, {"paw", paw}, {"tmax", tmax}, {"tmin", tmin},
        {"tavg", tavg}, {"rain", rain}, {"srad", srad}, {"co2", co2}, {"vap", vap},
        {"wind", wind}}) {
    if (!(value >= 0.0) || !std::isfinite(value)) {
      throw ConfigError(fmt::format("noise std '{}' must be finite and >= 0, got {}", name, value));
    }
  }
}

std::chrono::year_month_day parse_iso_date(std::string_view text) {
  text = trim(text);
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  const auto bad = [&] { return DataError(fmt::format("invalid ISO-8601 date '{}'", text)); };
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') throw bad();
  const auto parse = [&](std::string_view part, auto& out) {
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
    if (ec != std::errc() || ptr != part.data() + part.size()) throw bad();
  };
  parse(text.substr(0, 4), y);
  parse(text.substr(5, 2), m);
  parse(text.substr(8, 2), d);
  const std::chrono::year_month_day date{std::chrono::year{y}, std::chrono::month{m},
                                         std::chrono::day{d}};
  if (!date.ok()) throw bad();
  return date;
}

std::string format_iso_date(std::chrono::year_month_day date) {
  return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(date.year()),
                     static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
}

WeatherSeries parse_weather_csv(std::string_view text, const std::string& source) {
  WeatherSeries series;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;

  // header
  std::map<std::string, std::size_t> column;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (!column.emplace(upper(cells[i]), i).second) {
        throw DataError(fmt::format("{}: duplicate column '{}'", source, cells[i]));
      }
    }
    break;
  }
  if (column.empty()) throw DataError(fmt::format("{}: missing header row", source));
  for (const char* required : {"DATE", "TMAX", "TMIN", "RAIN", "SRAD", "CO2", "VAP", "WIND"}) {
    if (!column.contains(required)) {
      throw DataError(fmt::format("{}: missing column '{}'", source, required));
    }
  }
  const std::optional<std::size_t> tavg_col =
      column.contains("TAVG") ? std::optional{column.at("TAVG")} : std::nullopt;
  series.tavg_from_midpoint = !tavg_col.has_value();

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != column.size()) {
      throw DataError(fmt::format("{}: row {}: expected {} columns, found {}", source, line_no,
                                  column.size(), cells.size()));
    }
    const auto number = [&](const char* name) {
      const auto cell = cells[column.at(name)];
      double value = 0.0;
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(value)) {
        throw DataError(fmt::format("{}: row {}: column {}: not a finite number '{}'", source,
                                    line_no, name, cell));
      }
      return value;
    };

    WeatherRecord w;
    try {
      w.date = parse_iso_date(cells[column.at("DATE")]);
    } catch (const DataError& e) {
      throw DataError(fmt::format("{}: row {}: column DATE: {}", source, line_no, e.what()));
    }
    w.tmax = number("TMAX");
    w.tmin = number("TMIN");
    w.tavg = tavg_col ? number("TAVG") : 0.5 * (w.tmax + w.tmin);
    w.rain = number("RAIN");
    w.srad = number("SRAD");
    w.co2 = number("CO2");
    w.vap = number("VAP");
    w.wind = number("WIND");

    const auto reject = [&](const char* col, const char* rule) {
      throw DataError(fmt::format("{}: row {}: column {}: {}", source, line_no, col, rule));
    };
    if (w.tmin > w.tmax) reject("TMIN", "TMIN exceeds TMAX");
    if (w.tavg < w.tmin || w.tavg > w.tmax) reject("TAVG", "TAVG outside [TMIN, TMAX]");
    if (w.rain < 0.0) reject("RAIN", "must be >= 0");
    if (w.srad < 0.0) reject("SRAD", "must be >= 0");
    if (w.co2 <= 0.0) reject("CO2", "must be > 0");
    if (w.vap < 0.0) reject("VAP", "must be >= 0");
    if (w.wind < 0.0) reject("WIND", "must be >= 0");

    if (!series.records.empty()) {
      using std::chrono::sys_days;
      const auto step = (sys_days{w.date} - sys_days{series.records.back().date}).count();
      if (step <= 0) reject("DATE", "dates must be strictly increasing");
      if (step > 1) {
        throw DataError(fmt::format("{}: row {}: column DATE: gap of {} days after {}", source,
                                    line_no, step - 1,
                                    format_iso_date(series.records.back().date)));
      }
    }
    series.records.push_back(w);
  }
  return series;
}

WeatherSeries load_weather_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open weather file '{}'", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_weather_csv(buffer.str(), path.string());
}

double noisy_reading(double value, double std, NoiseRng& rng) {
  std::normal_distribution<double> standard_normal(0.0, 1.0);
  const double z = standard_normal(rng);
  return value + std * z;
}

WeatherRecord forecast(const WeatherRecord& tomorrow, const NoiseSpec& spec, NoiseRng& rng) {
  WeatherRecord out = tomorrow;
  out.tmax = noisy_reading(tomorrow.tmax, spec.tmax, rng);
  out.tmin = noisy_reading(tomorrow.tmin, spec.tmin, rng);
  out.tavg = noisy_reading(tomorrow.tavg, spec.tavg, rng);
  out.rain = std::max(noisy_reading(tomorrow.rain, spec.rain, rng), 0.0);
  out.srad = std::max(noisy_reading(tomorrow.srad, spec.srad, rng), 0.0);
  out.co2 = std::max(noisy_reading(tomorrow.co2, spec.co2, rng), 0.0);
  out.vap = std::max(noisy_reading(tomorrow.vap, spec.vap, rng), 0.0);
  out.wind = std::max(noisy_reading(tomorrow.wind, spec.wind, rng), 0.0);
  return out;
}

}  // namespace croprl
