#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hilsim::config {

/// Malformed or out-of-schema configuration. The message carries source:line.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kSchemaVersion = 1;

struct Entry {
  std::string value;
  std::string source;
  int line = 0;
};

/// Sectioned key=value text:
///
///   # comment
///   schema_version = 1
///   [coil]
///   side_mm = 840.4
///
/// Every key must appear in the schema of its section. Later layers override earlier ones.
class Config {
 public:
  static Config parse(const std::string& text, const std::string& source);
  static Config load(const std::string& path);

  /// Overlays `other` on top of this config.
  void merge(const Config& other);
  void set(const std::string& section, const std::string& key, const std::string& value);

  bool has(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const;

  double get_double(const std::string& section, const std::string& key, double fallback) const;
  long get_long(const std::string& section, const std::string& key, long fallback) const;
  std::uint64_t get_u64(const std::string& section, const std::string& key, std::uint64_t fallback) const;
  std::string get_string(const std::string& section, const std::string& key, const std::string& fallback) const;
  std::vector<double> get_doubles(const std::string& section, const std::string& key,
                                  const std::vector<double>& fallback) const;
  std::vector<std::string> get_strings(const std::string& section, const std::string& key,
                                       const std::vector<std::string>& fallback) const;

  int schema_version() const { return schemaVersion_; }

 private:
  const Entry* find(const std::string& section, const std::string& key) const;
  [[noreturn]] void fail(const Entry& e, const std::string& key, const std::string& what) const;

  int schemaVersion_ = kSchemaVersion;
  std::map<std::string, std::map<std::string, Entry>> sections_;
};

/// Names of the shipped presets.
std::vector<std::string> preset_names();

/// Text of a shipped preset, or nullopt.
std::optional<std::string> preset_text(const std::string& name);

Config load_preset(const std::string& name);

}  // namespace hilsim::config
