#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>

#include "oramlab/common.hpp"

namespace oramlab {

/// Flat `key = value` file with dotted keys and '#' comments. Keys are checked
/// against a schema of patterns in which a `#` segment matches any decimal
/// index (e.g. `thread.#.arrival_rate`).
class ConfigFile {
 public:
  static ConfigFile parse(std::istream& in, const std::vector<std::string>& schema);
  static ConfigFile load(const std::filesystem::path& path, const std::vector<std::string>& schema);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::string get(const std::string& key, const std::string& fallback) const;
  std::string require(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<std::uint64_t> get_u64_list(const std::string& key, std::vector<std::uint64_t> fallback) const;

  /// Distinct indices used under `prefix.#.`, ascending.
  std::vector<unsigned> indices(const std::string& prefix) const;
  const std::map<std::string, std::pair<std::string, std::size_t>>& values() const noexcept { return values_; }

 private:
  [[noreturn]] void bad(const std::string& key, const std::string& what) const;
  std::map<std::string, std::pair<std::string, std::size_t>> values_;  // key -> (value, line)
};

bool key_matches(std::string_view pattern, std::string_view key);

}  // namespace oramlab
