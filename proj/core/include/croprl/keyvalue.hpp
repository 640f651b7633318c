#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>

namespace croprl {

/// Flat `key = value` document used for crop, soil and scenario files.
///
/// Blank lines and lines starting with `#` are ignored; trailing `# ...`
/// comments are stripped. Keys are unique. Every accessor that fails throws
/// ConfigError with a message naming the key and the source file.
class KeyValueFile {
 public:
  static KeyValueFile parse(std::string_view text, std::string source = "<memory>");
  static KeyValueFile load(const std::filesystem::path& path);

  bool contains(const std::string& key) const;
  const std::string& raw(const std::string& key) const;
  double number(const std::string& key) const;
  std::optional<double> optional_number(const std::string& key) const;
  long long integer(const std::string& key) const;
  std::string string(const std::string& key) const;

  /// Rejects keys outside `allowed` (catches typos in hand-edited files).
  void reject_unknown(const std::set<std::string>& allowed) const;

  const std::string& source() const { return source_; }
  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::string source_;
  std::map<std::string, std::string> entries_;
};

}  // namespace croprl
