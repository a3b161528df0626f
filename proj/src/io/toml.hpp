#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace nullfol::io {

// The TOML subset used by run configs: [tables] (dotted names allowed),
// key = value with booleans, integers, floats (inf/nan included), basic and
// literal strings, and arrays (nested, possibly spanning lines). Keys are
// stored flat as "table.key".
struct TomlValue;
using TomlArray = std::vector<TomlValue>;
struct TomlValue {
  std::variant<bool, std::int64_t, double, std::string, TomlArray> v;
};

class Config {
 public:
  static Config parse(const std::string& text);
  static Config load(const std::filesystem::path& path);
  std::string to_toml() const;
  void save(const std::filesystem::path& path) const;

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  void set(const std::string& key, TomlValue v) { values_[key] = std::move(v); }
  // parses a command-line override "a.b=value" with TOML value syntax; bare words become strings
  void set_from_string(const std::string& key, const std::string& value);
  void erase(const std::string& key) { values_.erase(key); }

  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::vector<double> get_doubles(const std::string& key) const;
  std::vector<std::vector<double>> get_matrix(const std::string& key) const;

  const std::map<std::string, TomlValue>& values() const { return values_; }
  std::vector<std::string> keys() const;

 private:
  const TomlValue* find(const std::string& key) const;
  std::map<std::string, TomlValue> values_;
};

std::string toml_format(const TomlValue& v);

}  // namespace nullfol::io
