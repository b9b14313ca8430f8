#pragma once

#include <map>
#include <string>

namespace shoeprint {

// Flat "section.key = value" configuration, kept sorted for stable
// serialization.
struct ConfigMap {
  std::map<std::string, std::string> values;

  bool has(const std::string& key) const { return values.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { values[key] = value; }
  void set_int(const std::string& key, long long value);
  void set_double(const std::string& key, double value);

  // Getters throw ConfigError on missing keys or unparsable values.
  std::string get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  long long get_int(const std::string& key) const;
  long long get_int_or(const std::string& key, long long fallback) const;
  double get_double(const std::string& key) const;
  double get_double_or(const std::string& key, double fallback) const;
};

// Parses "key = value" lines; '#' starts a comment, blank lines are skipped.
ConfigMap parse_config(const std::string& text);
ConfigMap read_config_file(const std::string& path);

std::string serialize_config(const ConfigMap& config);
void write_config_file(const ConfigMap& config, const std::string& path);

}  // namespace shoeprint
