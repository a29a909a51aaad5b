#pragma once

// key = value configuration files with '#' comments.

#include <map>
#include <stdexcept>
#include <string>

namespace dupin {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Config {
 public:
  static Config parse(const std::string& text, const std::string& origin = "<string>");
  // Throws ConfigError if the file cannot be read or parsed.
  static Config load(const std::string& path);
  // DUPIN_CONFIG if set, else the checked-in defaults.
  static std::string default_path();

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::string get(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

// Output directory: explicit value, else $DUPIN_OUTPUT_DIR, else the
// config's output_dir, else ".".
std::string resolve_output_dir(const std::string& explicit_dir, const Config& cfg);

}  // namespace dupin
