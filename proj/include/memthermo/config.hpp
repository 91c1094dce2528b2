#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "memthermo/experiments.hpp"
#include "memthermo/homeostasis.hpp"

namespace memthermo {

inline constexpr std::string_view kVersion = "0.1.0";

struct ConfigKey {
  std::string_view key;
  std::string_view default_value;
  std::string_view doc;
};

// Every accepted key, its default and a one-line description.
std::span<const ConfigKey> config_keys();

// Flat `section.key = value` configuration. Resolution order: defaults,
// config file, MEMTHERMO_<SECTION>_<KEY> environment variables, CLI flags.
class RunConfig {
 public:
  RunConfig();  // all defaults

  // `#` starts a comment; blank lines are ignored. Throws ConfigError on an
  // unknown key or a malformed line.
  void merge_text(std::string_view text, std::string_view origin = "config");
  void merge_file(const std::filesystem::path& path);  // IoError if unreadable
  // Reads MEMTHERMO_* from the process environment (or `envp` when given).
  void merge_environment(char** envp = nullptr);
  void set(std::string_view key, std::string_view value);

  // Fills values that depend on other keys (plant time constants from the
  // plant preset) unless they were given explicitly.
  void resolve();

  const std::string& get(std::string_view key) const;
  double get_double(std::string_view key) const;
  std::uint64_t get_u64(std::string_view key) const;
  bool get_bool(std::string_view key) const;
  std::vector<double> get_doubles(std::string_view key) const;  // comma-separated
  std::vector<std::string> get_strings(std::string_view key) const;
  bool is_explicit(std::string_view key) const { return explicit_.count(std::string(key)) > 0; }

  // All keys sorted, one `key = value` per line; re-readable as a config.
  std::string manifest() const;

  // Typed views. Throw ConfigError on invalid values.
  std::uint64_t seed() const { return get_u64("run.seed"); }
  ExperimentConfig experiment() const;
  SwitchingParams switching() const;
  ThermalPlant plant() const;
  TemperatureSchedule schedule() const;
  NeuronConfig neuron() const;
  GainSearch gain_search() const;
  InputPattern pattern() const;  // homeostasis.pattern_csv or homeostasis.segments

 private:
  std::map<std::string, std::string, std::less<>> values_;
  std::set<std::string, std::less<>> explicit_;
};

// Environment variable name for a key: run.seed -> MEMTHERMO_RUN_SEED.
std::string env_name(std::string_view key);

}  // namespace memthermo
