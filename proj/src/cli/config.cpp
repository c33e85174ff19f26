#include "sqcat/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <span>
#include <sstream>

namespace sqcat::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

double to_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
    throw ConfigError("config: '" + key + "' expects a number, got '" + text + "'");
  return v;
}

using Table = std::map<std::string, std::string>;

Table physics_keys() {
  return {{"params", "target"}, {"preset", "fig2"},    {"alpha", "2"},      {"r", "1.1"},
          {"G", "0.1"},         {"Delta_a", ""},       {"g", "1e-3"},       {"kappa_a", "0"},
          {"kappa_b", "1"},     {"kappa_c", "1"},      {"detuning_ratio_c", "11"},
          {"r_env", ""},        {"phi_env", ""},       {"Delta_b", ""},     {"Delta_c", ""},
          {"Omega_1", ""},      {"Omega_2", ""},       {"Omega_3", ""},     {"phi_1", ""},
          {"phi_2", ""},        {"phi_3", ""},         {"drive_detuning_b", ""}};
}

const char* const kExplicitOnly[] = {"Delta_b", "Delta_c", "Omega_1", "Omega_2", "Omega_3",
                                     "phi_1",   "phi_2",   "phi_3",   "drive_detuning_b"};
const char* const kTargetOnly[] = {"preset", "alpha", "r", "G", "detuning_ratio_c"};

Table merged(Table base, const Table& extra) {
  for (const auto& [k, v] : extra) base[k] = v;
  return base;
}

}  // namespace

Scenario parse_scenario(const std::string& name) {
  const auto& names = scenario_names();
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw ConfigError("unknown scenario '" + name + "'");
  return static_cast<Scenario>(it - names.begin());
}

std::string to_string(Scenario s) { return scenario_names().at(static_cast<std::size_t>(s)); }

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {"derive", "simulate", "steady", "wigner", "qfi", "optimize", "fit"};
  return names;
}

std::pair<std::string, std::string> parse_assignment(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + text + "'");
  std::string key = trim(text.substr(0, eq));
  if (key.empty()) throw ConfigError("empty key in '" + text + "'");
  return {key, trim(text.substr(eq + 1))};
}

std::map<std::string, std::string> parse_config_text(const std::string& text, const std::string& origin) {
  std::map<std::string, std::string> out;
  std::stringstream ss(text);
  std::string line;
  for (int lineno = 1; std::getline(ss, line); ++lineno) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    std::pair<std::string, std::string> kv;
    try {
      kv = parse_assignment(line);
    } catch (const ConfigError& e) {
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (!out.emplace(kv).second)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + kv.first + "'");
  }
  return out;
}

std::map<std::string, std::string> load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path);
}

Dims parse_dims(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 3) throw ConfigError("dims: expected n_a,n_b,n_c, got '" + text + "'");
  std::size_t v[3];
  for (int i = 0; i < 3; ++i) {
    const auto& p = parts[static_cast<std::size_t>(i)];
    const auto [ptr, ec] = std::from_chars(p.data(), p.data() + p.size(), v[i]);
    if (p.empty() || ec != std::errc() || ptr != p.data() + p.size() || v[i] < 1)
      throw ConfigError("dims: '" + p + "' is not a positive integer");
  }
  return {v[0], v[1], v[2]};
}

std::string format_dims(const Dims& dims) {
  return std::to_string(dims.a) + "," + std::to_string(dims.b) + "," + std::to_string(dims.c);
}

const std::map<std::string, std::string>& RunConfig::defaults(Scenario scenario) {
  static const Table tier_keys = {{"tier", "reduced"}, {"dims", "20,4,3"}, {"strict_rwa", "0"}};
  static const std::map<Scenario, Table> all = {
      {Scenario::derive, merged(physics_keys(), {{"strict_rwa", "0"}})},
      {Scenario::simulate, merged(merged(physics_keys(), tier_keys),
                                  {{"t_final", "200"}, {"dt", ""}, {"samples", "201"}, {"initial", "0"}, {"nonrotating", "1"}})},
      {Scenario::steady, merged(merged(physics_keys(), tier_keys), {{"hint", "even"}})},
      {Scenario::wigner, {{"state", "secs"}, {"alpha", "2"}, {"r", "1.1"}, {"kappa_a", "1e-3"}, {"t", "0"},
                          {"n", "101"}, {"grid", "covering"}, {"half_width", "8"}, {"dim", ""}}},
      {Scenario::qfi, {{"family", "SECS"}, {"alpha", "2"}, {"r", "1.1"}, {"dim", ""}}},
      {Scenario::optimize, {{"family", "SECS"}, {"N", "10"}}},
      {Scenario::fit, {{"family", "SECS"}, {"N_min", "4"}, {"N_max", "100"}, {"N_step", "2"}}},
  };
  return all.at(scenario);
}

RunConfig::RunConfig(Scenario scenario, std::map<std::string, std::string> values, std::string out_dir)
    : scenario_(scenario), values_(defaults(scenario)), out_dir_(std::move(out_dir)) {
  for (auto& [k, v] : values) {
    auto it = values_.find(k);
    if (it == values_.end()) throw ConfigError("unknown key '" + k + "' for scenario " + to_string(scenario));
    it->second = v;
  }
  if (values_.count("params")) {
    const std::string& mode = values_.at("params");
    if (mode != "target" && mode != "explicit") throw ConfigError("params: expected target or explicit, got '" + mode + "'");
    const std::span<const char* const> misplaced =
        mode == "target" ? std::span<const char* const>(kExplicitOnly) : std::span<const char* const>(kTargetOnly);
    for (const char* k : misplaced)
      if (values.count(k)) throw ConfigError("key '" + std::string(k) + "' is not used with params=" + mode);
    const std::string& preset = values_.at("preset");
    if (preset != "fig2" && preset != "scaled") throw ConfigError("preset: expected fig2 or scaled, got '" + preset + "'");
  }
  if (values_.count("tier")) {
    const std::string& tier = values_.at("tier");
    if (tier != "reduced" && tier != "approx" && tier != "exact")
      throw ConfigError("tier: expected reduced, approx or exact, got '" + tier + "'");
    parse_dims(values_.at("dims"));
  }
  // Type-check everything up front so that bad values fail as parse errors.
  for (const auto& [k, v] : values_) {
    if (k == "params" || k == "preset" || k == "tier" || k == "dims" || k == "state" || k == "grid" ||
        k == "family" || k == "hint" || v.empty())
      continue;
    if (k == "N") {
      number_list(k);
    } else if (k == "strict_rwa" || k == "nonrotating") {
      flag(k);
    } else if (k == "samples" || k == "n" || k == "dim" || k == "initial") {
      count(k);
    } else {
      number(k);
    }
  }
}

const std::string& RunConfig::text(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("internal: key '" + key + "' not defined for " + to_string(scenario_));
  return it->second;
}

double RunConfig::number(const std::string& key) const { return to_double(key, text(key)); }

std::size_t RunConfig::count(const std::string& key) const {
  const std::string& t = text(key);
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size())
    throw ConfigError("config: '" + key + "' expects a non-negative integer, got '" + t + "'");
  return v;
}

bool RunConfig::flag(const std::string& key) const {
  const std::string& t = text(key);
  if (t == "1" || t == "true" || t == "yes") return true;
  if (t == "0" || t == "false" || t == "no") return false;
  throw ConfigError("config: '" + key + "' expects 0 or 1, got '" + t + "'");
}

std::optional<double> RunConfig::optional_number(const std::string& key) const {
  if (text(key).empty()) return std::nullopt;
  return number(key);
}

std::vector<double> RunConfig::number_list(const std::string& key) const {
  std::vector<double> out;
  for (const auto& part : split(text(key), ',')) out.push_back(to_double(key, part));
  if (out.empty()) throw ConfigError("config: '" + key + "' is empty");
  return out;
}

SystemParams system_params(const RunConfig& c) {
  const bool scaled = c.text("preset") == "scaled";
  const double delta_a = c.optional_number("Delta_a").value_or(scaled ? 20.0 : 100.0);
  if (c.text("params") == "target") {
    TargetBase base;
    base.Delta_a = delta_a;
    base.g = c.number("g");
    base.kappa_a = c.number("kappa_a");
    base.kappa_b = c.number("kappa_b");
    base.kappa_c = c.number("kappa_c");
    base.detuning_ratio_c = c.number("detuning_ratio_c");
    base.r_env = c.optional_number("r_env");
    base.phi_env = c.optional_number("phi_env");
    return params_for_target(c.number("alpha"), c.number("r"), c.number("G"), base);
  }
  SystemParams p;
  auto get = [&](const char* k) { return c.optional_number(k).value_or(0.0); };
  p.Delta_a = delta_a;
  p.Delta_b = get("Delta_b");
  p.Delta_c = get("Delta_c");
  p.g = c.number("g");
  p.Omega_1 = get("Omega_1");
  p.Omega_2 = get("Omega_2");
  p.Omega_3 = get("Omega_3");
  p.phi_1 = get("phi_1");
  p.phi_2 = get("phi_2");
  p.phi_3 = get("phi_3");
  p.kappa_a = c.number("kappa_a");
  p.kappa_b = c.number("kappa_b");
  p.kappa_c = c.number("kappa_c");
  p.r_env = get("r_env");
  p.phi_env = get("phi_env");
  p.drive_detuning_b = get("drive_detuning_b");
  p.validate();
  return p;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.11e", v);
  return buf;
}

}  // namespace sqcat::cli
