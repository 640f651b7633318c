#include "croprl/keyvalue.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
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

}  // namespace

KeyValueFile KeyValueFile::parse(std::string_view text, std::string source) {
  KeyValueFile file;
  file.source_ = std::move(source);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;

    if (auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(fmt::format("{}:{}: expected 'key = value', got '{}'", file.source_,
                                    line_no, line));
    }
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) {
      throw ConfigError(fmt::format("{}:{}: empty key", file.source_, line_no));
    }
    if (!file.entries_.emplace(key, value).second) {
      throw ConfigError(fmt::format("{}:{}: duplicate key '{}'", file.source_, line_no, key));
    }
    if (end == text.size()) break;
  }
  return file;
}

KeyValueFile KeyValueFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError(fmt::format("cannot open '{}'", path.string()));
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), path.string());
}

bool KeyValueFile::contains(const std::string& key) const { return entries_.contains(key); }

const std::string& KeyValueFile::raw(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) {
    throw ConfigError(fmt::format("{}: missing required key '{}'", source_, key));
  }
  return it->second;
}

double KeyValueFile::number(const std::string& key) const {
  const auto& text = raw(key);
  double value = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw ConfigError(
        fmt::format("{}: key '{}' is not a finite number: '{}'", source_, key, text));
  }
  return value;
}

std::optional<double> KeyValueFile::optional_number(const std::string& key) const {
  if (!contains(key)) return std::nullopt;
  return number(key);
}

long long KeyValueFile::integer(const std::string& key) const {
  const auto& text = raw(key);
  long long value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(fmt::format("{}: key '{}' is not an integer: '{}'", source_, key, text));
  }
  return value;
}

std::string KeyValueFile::string(const std::string& key) const { return raw(key); }

void KeyValueFile::reject_unknown(const std::set<std::string>& allowed) const {
  for (const auto& [key, value] : entries_) {
    if (!allowed.contains(key)) {
      throw ConfigError(fmt::format("{}: unknown key '{}'", source_, key));
    }
  }
}

}  // namespace croprl
