#include "shoeprint/config.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "shoeprint/error.hpp"

namespace shoeprint {

namespace {

std::string trim(const std::string& text) {
  size_t begin = text.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  size_t end = text.find_last_not_of(" \t\r");
  return text.substr(begin, end - begin + 1);
}

}  // namespace

void ConfigMap::set_int(const std::string& key, long long value) {
  values[key] = std::to_string(value);
}

void ConfigMap::set_double(const std::string& key, double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  values[key] = buffer;
}

std::string ConfigMap::get(const std::string& key) const {
  auto it = values.find(key);
  if (it == values.end()) throw ConfigError("missing config key '" + key + "'");
  return it->second;
}

std::string ConfigMap::get_or(const std::string& key, const std::string& fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

long long ConfigMap::get_int(const std::string& key) const {
  const std::string text = get(key);
  errno = 0;
  char* end = nullptr;
  const long long value = std::strtoll(text.c_str(), &end, 10);
  if (errno != 0 || end == text.c_str() || *end != '\0') {
    throw ConfigError("config key '" + key + "' is not an integer: '" + text + "'");
  }
  return value;
}

long long ConfigMap::get_int_or(const std::string& key, long long fallback) const {
  return has(key) ? get_int(key) : fallback;
}

double ConfigMap::get_double(const std::string& key) const {
  const std::string text = get(key);
  errno = 0;
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (errno != 0 || end == text.c_str() || *end != '\0') {
    throw ConfigError("config key '" + key + "' is not a number: '" + text + "'");
  }
  return value;
}

double ConfigMap::get_double_or(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

ConfigMap parse_config(const std::string& text) {
  ConfigMap config;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string trimmed = trim(line);
    if (trimmed.empty()) continue;
    const size_t eq = trimmed.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + " has no '=': '" + trimmed +
                        "'");
    }
    const std::string key = trim(trimmed.substr(0, eq));
    const std::string value = trim(trimmed.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(line_no) + " has an empty key");
    }
    config.values[key] = value;
  }
  return config;
}

ConfigMap read_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string serialize_config(const ConfigMap& config) {
  std::ostringstream out;
  for (const auto& [key, value] : config.values) {
    out << key << " = " << value << '\n';
  }
  return out.str();
}

void write_config_file(const ConfigMap& config, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << serialize_config(config);
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace shoeprint
