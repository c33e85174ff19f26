#pragma once

// Flat key=value run configuration shared by all subcommands.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sqcat/errors.hpp"
#include "sqcat/model.hpp"

namespace sqcat::cli {

/// Malformed config text, unknown key or unparsable value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

enum class Scenario { derive, simulate, steady, wigner, qfi, optimize, fit };

Scenario parse_scenario(const std::string& name);
std::string to_string(Scenario s);
const std::vector<std::string>& scenario_names();

/// key=value lines; '#' starts a comment; blank lines ignored. Duplicate keys
/// are an error.
std::map<std::string, std::string> parse_config_text(const std::string& text, const std::string& origin = "<config>");
std::map<std::string, std::string> load_config_file(const std::string& path);
/// "key=value" -> {key, value}.
std::pair<std::string, std::string> parse_assignment(const std::string& text);

/// "20,4,3" -> Dims.
Dims parse_dims(const std::string& text);
std::string format_dims(const Dims& dims);

class RunConfig {
 public:
  RunConfig(Scenario scenario, std::map<std::string, std::string> values, std::string out_dir);

  Scenario scenario() const noexcept { return scenario_; }
  const std::string& out_dir() const noexcept { return out_dir_; }
  /// Defaults merged with the given values, sorted by key.
  const std::map<std::string, std::string>& values() const noexcept { return values_; }

  const std::string& text(const std::string& key) const;
  double number(const std::string& key) const;
  /// Non-negative integer value.
  std::size_t count(const std::string& key) const;
  bool flag(const std::string& key) const;
  /// Empty value means "unset".
  std::optional<double> optional_number(const std::string& key) const;
  std::vector<double> number_list(const std::string& key) const;

  /// Keys accepted by the scenario, with their defaults.
  static const std::map<std::string, std::string>& defaults(Scenario scenario);

 private:
  Scenario scenario_;
  std::map<std::string, std::string> values_;
  std::string out_dir_;
};

/// Laboratory parameters from the physics keys: preset/target inversion when
/// params=target, the raw SystemParams fields when params=explicit.
SystemParams system_params(const RunConfig& config);

std::string format_number(double v);

}  // namespace sqcat::cli
