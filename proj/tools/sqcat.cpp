#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "sqcat/cli/run.hpp"

using namespace sqcat::cli;

namespace {

struct Options {
  std::string config;
  std::string out = ".";
  std::string tier;
  std::string dims;
  bool strict_rwa = false;
  std::vector<std::string> assignments;
};

const char* describe(Scenario s) {
  switch (s) {
    case Scenario::derive: return "Derived couplings, rates and RWA validity report";
    case Scenario::simulate: return "Time evolution with fidelity to the target cat";
    case Scenario::steady: return "Steady state of the reduced or approximate tier";
    case Scenario::wigner: return "Wigner function on a phase-space grid";
    case Scenario::qfi: return "Quantum Fisher information of a cat family";
    case Scenario::optimize: return "Maximal QFI at fixed mean photon number";
    case Scenario::fit: return "Polynomial scaling fit of the optimal QFI";
  }
  return "";
}

bool takes_tier(Scenario s) { return s == Scenario::simulate || s == Scenario::steady; }

int dispatch(Scenario scenario, const Options& o) {
  std::map<std::string, std::string> values;
  if (!o.config.empty()) values = load_config_file(o.config);
  for (const auto& a : o.assignments) {
    auto [k, v] = parse_assignment(a);
    values[k] = v;
  }
  if (!o.tier.empty()) values["tier"] = o.tier;
  if (!o.dims.empty()) values["dims"] = o.dims;
  if (o.strict_rwa) values["strict_rwa"] = "1";
  const RunConfig config(scenario, values, o.out);
  execute(config, std::cout);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Squeezed cat states from two-photon loss: simulations and metrology"};
  app.require_subcommand(1);
  Options opts;
  std::map<CLI::App*, Scenario> subs;
  for (const auto& name : scenario_names()) {
    const Scenario s = parse_scenario(name);
    CLI::App* sub = app.add_subcommand(name, describe(s));
    sub->add_option("--config", opts.config, "key=value config file");
    sub->add_option("--out", opts.out, "output directory")->capture_default_str();
    if (takes_tier(s)) sub->add_option("--tier", opts.tier, "reduced | approx | exact");
    if (s == Scenario::derive || takes_tier(s)) {
      sub->add_flag("--strict-rwa", opts.strict_rwa, "fail when the RWA validity report fails");
    }
    if (takes_tier(s)) sub->add_option("--dims", opts.dims, "n_a,n_b,n_c");
    sub->add_option("assignments", opts.assignments, "key=value overrides");
    subs[sub] = s;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kParseError;
  }

  for (const auto& [sub, scenario] : subs) {
    if (!sub->parsed()) continue;
    try {
      return dispatch(scenario, opts);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return exit_code_for(e);
    }
  }
  return kFailure;
}
