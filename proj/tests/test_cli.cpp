#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <unistd.h>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"
#include "sqcat/cli/run.hpp"

using namespace sqcat;
using namespace sqcat::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("sqcat_cli_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  return p;
}

int tool(const std::string& args) {
  const std::string cmd = std::string(SQCAT_TOOL) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

nlohmann::json summary(const fs::path& dir) { return nlohmann::json::parse(slurp(dir / "summary.json")); }

}  // namespace

TEST_CASE("config text parsing") {
  const auto kv = parse_config_text("# header\nalpha = 2.5  # trailing\n\n  r=0.3\n");
  CHECK(kv.size() == 2);
  CHECK(kv.at("alpha") == "2.5");
  CHECK(kv.at("r") == "0.3");
  CHECK_THROWS_AS(parse_config_text("alpha 2"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("a=1\na=2"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("=1"), ConfigError);
  CHECK_THROWS_AS(load_config_file("/nonexistent/sqcat.cfg"), ConfigError);
  CHECK(parse_assignment("tier=exact").second == "exact");
  const Dims d = parse_dims("12,3,2");
  CHECK(d.a == 12);
  CHECK(d.c == 2);
  CHECK(format_dims(d) == "12,3,2");
  CHECK_THROWS_AS(parse_dims("12,3"), ConfigError);
  CHECK_THROWS_AS(parse_dims("12,x,2"), ConfigError);
  CHECK(format_number(0.04) == "4.00000000000e-02");
}

TEST_CASE("run configuration resolution") {
  const RunConfig c(Scenario::simulate, {{"alpha", "1.5"}}, "out");
  CHECK(c.number("alpha") == 1.5);
  CHECK(c.number("r") == 1.1);
  CHECK(c.text("tier") == "reduced");
  CHECK_FALSE(c.optional_number("dt").has_value());
  CHECK_THROWS_AS(RunConfig(Scenario::derive, {{"bogus", "1"}}, "o"), ConfigError);
  CHECK_THROWS_AS(RunConfig(Scenario::derive, {{"alpha", "two"}}, "o"), ConfigError);
  CHECK_THROWS_AS(RunConfig(Scenario::simulate, {{"tier", "fast"}}, "o"), ConfigError);
  CHECK_THROWS_AS(RunConfig(Scenario::derive, {{"Omega_1", "3"}}, "o"), ConfigError);
  CHECK_THROWS_AS(RunConfig(Scenario::qfi, {{"tier", "exact"}}, "o"), ConfigError);
  CHECK(parse_scenario("fit") == Scenario::fit);
  CHECK_THROWS_AS(parse_scenario("plot"), ConfigError);

  const SystemParams p = system_params(RunConfig(Scenario::derive, {}, "o"));
  CHECK(p.Delta_a == 100.0);
  CHECK(system_params(RunConfig(Scenario::derive, {{"preset", "scaled"}}, "o")).Delta_a == 20.0);
  const RunConfig expl(Scenario::derive, {{"params", "explicit"}, {"Omega_1", "60"}}, "o");
  CHECK_THROWS_AS(system_params(expl), ValidationError);
}

TEST_CASE("derive reports the two-photon rate") {
  const fs::path out = scratch("derive");
  REQUIRE(tool("derive --out " + out.string()) == kOk);
  CHECK(slurp(out / "derived.csv").find("Gamma_a,4.00000000000e-02") != std::string::npos);
  const auto s = summary(out);
  CHECK(s["results"]["Gamma_a"].get<double>() == doctest::Approx(0.04).epsilon(1e-12));
  CHECK(s["results"]["rwa"]["pass"].get<bool>());
  CHECK(s["system"].contains("Omega_1"));
  CHECK(s["derived"].contains("eta_s_re"));
  CHECK(slurp(out / "rwa.csv").find("# config.preset=fig2") != std::string::npos);
}

TEST_CASE("qfi of a Yurke-Stoler state reduces to N") {
  const fs::path out = scratch("qfi");
  REQUIRE(tool("qfi --out " + out.string() + " family=YSCS alpha=1 r=0") == kOk);
  const auto s = summary(out);
  CHECK(s["results"]["analytic"]["F"].get<double>() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(s["results"]["numeric"]["F"].get<double>() == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("reduced-tier simulation converges to the cat") {
  const fs::path out = scratch("simulate");
  REQUIRE(tool("simulate --tier reduced --out " + out.string() + " alpha=2 r=1.1 kappa_a=0 samples=11") == kOk);
  const auto s = summary(out);
  CHECK(s["results"]["final_fidelity"].get<double>() >= 0.99);
  const std::string csv = slurp(out / "trajectory.csv");
  CHECK(csv.find("t,fidelity,n_a,parity_a,trace,purity\n") != std::string::npos);
  std::istringstream lines(csv);
  std::string line;
  int data = 0;
  while (std::getline(lines, line))
    if (!line.empty() && line[0] != '#' && line[0] != 't') ++data;
  CHECK(data == 11);
}

TEST_CASE("identical configurations give byte-identical files") {
  const fs::path cfg = scratch("cfg") / "run.cfg";
  fs::create_directories(cfg.parent_path());
  std::ofstream(cfg) << "# steady cat\nalpha = 1.5\nhint = odd\n";
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  REQUIRE(tool("steady --config " + cfg.string() + " --dims 16,4,3 --out " + a.string()) == kOk);
  REQUIRE(tool("steady --config " + cfg.string() + " --dims 16,4,3 --out " + b.string()) == kOk);
  for (const char* f : {"steady_populations.csv", "summary.json"}) CHECK(slurp(a / f) == slurp(b / f));
  CHECK(summary(a)["config"]["hint"] == "odd");
  CHECK(summary(a)["results"]["fidelity"].get<double>() >= 0.999);
  CHECK(fs::exists(a / "run_timing.json"));

  const fs::path w1 = scratch("w1"), w2 = scratch("w2");
  REQUIRE(tool("wigner --out " + w1.string() + " n=21 r=0.5") == kOk);
  REQUIRE(tool("wigner --out " + w2.string() + " n=21 r=0.5") == kOk);
  CHECK(slurp(w1 / "wigner.csv") == slurp(w2 / "wigner.csv"));
  const std::string grid = slurp(w1 / "wigner.csv");
  CHECK(grid.find("\nq_values,") != std::string::npos);
  CHECK(grid.find("\np_values,") != std::string::npos);
  CHECK(summary(w1)["results"]["max_abs_vs_analytic"].get<double>() < 1e-6);
}

TEST_CASE("exit codes distinguish failure classes") {
  const fs::path out = scratch("codes");
  CHECK(tool("derive --out " + out.string() + " bogus=1") == kParseError);
  CHECK(tool("derive --out " + out.string() + " alpha") == kParseError);
  CHECK(tool("derive --config /nonexistent.cfg --out " + out.string()) == kParseError);
  CHECK(tool("frobnicate") == kParseError);
  CHECK(tool("derive --out " + out.string() + " params=explicit Omega_1=60") == kValidationError);
  CHECK(tool("derive --strict-rwa --out " + out.string() + " Delta_a=2") == kValidationError);
  CHECK(tool("derive --strict-rwa --out " + out.string()) == kOk);
  CHECK(tool("steady --tier exact --out " + out.string()) == kValidationError);
  CHECK(tool("wigner --out " + out.string() + " dim=30") == kTruncationError);
  CHECK(tool("simulate --dims 10,4,3 --out " + out.string()) == kTruncationError);
  CHECK(tool("steady --out " + out.string() + " hint=none") == kContractError);
  CHECK(tool("simulate --out " + out.string() + " t_final=1 dt=5") == kContractError);
  CHECK(tool("fit --out " + out.string() + " family=SYSCS N_min=10 N_max=4") == kValidationError);
}

TEST_CASE("optimize and fit scenarios") {
  const fs::path o = scratch("optimize"), f = scratch("fit");
  REQUIRE(tool("optimize --out " + o.string() + " family=SYSCS N=4,10") == kOk);
  const auto opt = summary(o)["results"]["optima"];
  REQUIRE(opt.size() == 2);
  CHECK(opt[1]["F"].get<double>() >= 120.0 - 1e-6);
  REQUIRE(tool("fit --out " + f.string() + " family=SYSCS N_min=4 N_max=20") == kOk);
  const auto c = summary(f)["results"]["coefficients"];
  CHECK(c["N"].get<double>() == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(c["N^2"].get<double>() == doctest::Approx(1.0).epsilon(1e-6));
}
