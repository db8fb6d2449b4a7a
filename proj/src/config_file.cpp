#include "oramlab/config_file.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>

namespace oramlab {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto p = s.find(sep, start);
    out.push_back(s.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

bool key_matches(std::string_view pattern, std::string_view key) {
  const auto p = split(pattern, '.');
  const auto k = split(key, '.');
  if (p.size() != k.size()) return false;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == "#") {
      if (!all_digits(k[i])) return false;
    } else if (p[i] != k[i]) {
      return false;
    }
  }
  return true;
}

ConfigFile ConfigFile::parse(std::istream& in, const std::vector<std::string>& schema) {
  ConfigFile cfg;
  std::string line;
  std::size_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string_view::npos) throw ParseError(no, "expected key = value");
    const std::string key(trim(t.substr(0, eq)));
    const std::string value(trim(t.substr(eq + 1)));
    if (key.empty()) throw ParseError(no, "empty key");
    if (std::none_of(schema.begin(), schema.end(), [&](const std::string& p) { return key_matches(p, key); }))
      throw ParseError(no, "unknown key '" + key + "'");
    if (cfg.values_.count(key)) throw ParseError(no, "duplicate key '" + key + "'");
    cfg.values_[key] = {value, no};
  }
  return cfg;
}

ConfigFile ConfigFile::load(const std::filesystem::path& path, const std::vector<std::string>& schema) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse(in, schema);
}

void ConfigFile::bad(const std::string& key, const std::string& what) const {
  const auto it = values_.find(key);
  const std::string where = it == values_.end() ? "" : "line " + std::to_string(it->second.second) + ": ";
  throw ConfigError(where + key + ": " + what);
}

std::string ConfigFile::get(const std::string& key, const std::string& fallback) const {
  const auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second.first;
}

std::string ConfigFile::require(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing required key " + key);
  return it->second.first;
}

std::uint64_t ConfigFile::get_u64(const std::string& key, std::uint64_t fallback) const {
  if (!has(key)) return fallback;
  const auto s = get(key, "");
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size()) bad(key, "expected a nonnegative integer, got '" + s + "'");
  return v;
}

double ConfigFile::get_double(const std::string& key, double fallback) const {
  if (!has(key)) return fallback;
  const auto s = get(key, "");
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::logic_error&) {
    bad(key, "expected a number, got '" + s + "'");
  }
}

bool ConfigFile::get_bool(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const auto s = get(key, "");
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  bad(key, "expected true or false, got '" + s + "'");
}

std::vector<std::uint64_t> ConfigFile::get_u64_list(const std::string& key, std::vector<std::uint64_t> fallback) const {
  if (!has(key)) return fallback;
  std::vector<std::uint64_t> out;
  const auto s = get(key, "");
  for (auto part : split(s, ',')) {
    part = trim(part);
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc{} || p != part.data() + part.size() || part.empty())
      bad(key, "expected a comma-separated integer list, got '" + s + "'");
    out.push_back(v);
  }
  return out;
}

std::vector<unsigned> ConfigFile::indices(const std::string& prefix) const {
  std::set<unsigned> out;
  const std::string head = prefix + ".";
  for (const auto& [k, v] : values_) {
    if (k.rfind(head, 0) != 0) continue;
    const auto rest = std::string_view(k).substr(head.size());
    const auto dot = rest.find('.');
    const auto idx = rest.substr(0, dot);
    if (all_digits(idx)) out.insert(static_cast<unsigned>(std::stoul(std::string(idx))));
  }
  return {out.begin(), out.end()};
}

}  // namespace oramlab
