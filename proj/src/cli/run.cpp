#include "sqcat/cli/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "sqcat/metrology.hpp"
#include "sqcat/wigner.hpp"

namespace sqcat::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Named = std::vector<std::pair<std::string, double>>;

double round12(double v) {
  if (!std::isfinite(v)) return v;
  return std::stod(format_number(v));
}

json number_json(double v) { return std::isfinite(v) ? json(round12(v)) : json(nullptr); }

Named system_fields(const SystemParams& p) {
  return {{"Delta_a", p.Delta_a}, {"Delta_b", p.Delta_b}, {"Delta_c", p.Delta_c},
          {"g", p.g},             {"Omega_1", p.Omega_1}, {"Omega_2", p.Omega_2},
          {"Omega_3", p.Omega_3}, {"phi_1", p.phi_1},     {"phi_2", p.phi_2},
          {"phi_3", p.phi_3},     {"kappa_a", p.kappa_a}, {"kappa_b", p.kappa_b},
          {"kappa_c", p.kappa_c}, {"r_env", p.r_env},     {"phi_env", p.phi_env},
          {"drive_detuning_b", p.drive_detuning_b}};
}

Named derived_fields(const DerivedParams& d) {
  return {{"eta_s_re", d.eta_s.real()},   {"eta_s_im", d.eta_s.imag()}, {"r", d.r},
          {"omega_sa", d.omega_sa},       {"g_s", d.g_s},               {"g_p", d.g_p},
          {"G", d.G},                     {"Gamma_a", d.Gamma_a},       {"J_eff_re", d.J_eff.real()},
          {"J_eff_im", d.J_eff.imag()},   {"alpha_re", d.alpha.real()}, {"alpha_im", d.alpha.imag()},
          {"N_eff", d.N_eff},             {"M_eff_re", d.M_eff.real()}, {"M_eff_im", d.M_eff.imag()},
          {"M_eff_abs", std::abs(d.M_eff)}, {"resonant", d.resonant() ? 1.0 : 0.0}};
}

json to_json(const Named& fields) {
  json j = json::object();
  for (const auto& [k, v] : fields) j[k] = number_json(v);
  return j;
}

// Collects everything a run emits so that every file carries the same echo.
class Emitter {
 public:
  Emitter(const RunConfig& config, std::ostream& log) : config_(config), log_(log), dir_(config.out_dir()) {
    fs::create_directories(dir_);
    summary_["scenario"] = to_string(config.scenario());
    summary_["config"] = config.values();
    summary_["results"] = json::object();
  }

  void set_physics(const SystemParams& p, const DerivedParams& d) {
    system_ = system_fields(p);
    derived_ = derived_fields(d);
    summary_["system"] = to_json(system_);
    summary_["derived"] = to_json(derived_);
  }

  json& results() { return summary_["results"]; }
  json& summary() { return summary_; }

  void csv(const std::string& name, const std::string& header, const std::vector<std::string>& rows) {
    std::ofstream out = open(name);
    out << "# sqcat " << to_string(config_.scenario()) << "\n";
    for (const auto& [k, v] : config_.values()) out << "# config." << k << "=" << v << "\n";
    for (const auto& [k, v] : system_) out << "# system." << k << "=" << format_number(v) << "\n";
    for (const auto& [k, v] : derived_) out << "# derived." << k << "=" << format_number(v) << "\n";
    if (!header.empty()) out << header << "\n";
    for (const auto& row : rows) out << row << "\n";
  }

  void finish(double seconds) {
    open("summary.json") << summary_.dump(2) << "\n";
    json timing = {{"scenario", to_string(config_.scenario())}, {"wall_clock_seconds", seconds}};
    open("run_timing.json") << timing.dump(2) << "\n";
  }

 private:
  std::ofstream open(const std::string& name) {
    const fs::path path = dir_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    log_ << "wrote " << path.string() << "\n";
    return out;
  }

  const RunConfig& config_;
  std::ostream& log_;
  fs::path dir_;
  json summary_;
  Named system_;
  Named derived_;
};

std::string row(std::initializer_list<double> values) {
  std::string s;
  for (double v : values) {
    if (!s.empty()) s += ',';
    s += format_number(v);
  }
  return s;
}

json rwa_json(const RwaReport& report) {
  json ratios = json::array();
  for (const auto& r : report.ratios)
    ratios.push_back({{"name", r.name}, {"large", number_json(r.large)}, {"small", number_json(r.small)},
                      {"ratio", number_json(r.ratio)}, {"pass", r.pass}});
  return {{"threshold", RwaReport::kThreshold}, {"pass", report.pass}, {"ratios", ratios},
          {"n_a", number_json(report.n_a)}, {"n_b", number_json(report.n_b)}, {"n_c", number_json(report.n_c)}};
}

std::vector<std::string> rwa_rows(const RwaReport& report) {
  std::vector<std::string> rows;
  for (const auto& r : report.ratios)
    rows.push_back(r.name + "," + format_number(r.large) + "," + format_number(r.small) + "," +
                   format_number(r.ratio) + "," + (r.pass ? "1" : "0"));
  return rows;
}

void enforce_rwa(const RunConfig& c, const RwaReport& report) {
  if (!c.flag("strict_rwa") || report.pass) return;
  std::ostringstream os;
  os << "RWA validity report fails (threshold " << RwaReport::kThreshold << "):";
  for (const auto& r : report.ratios)
    if (!r.pass) os << " " << r.name << " ratio " << r.ratio;
  throw ValidationError(os.str());
}

DerivedParams physics(const RunConfig& c, Emitter& out) {
  const SystemParams p = system_params(c);
  const DerivedParams d = derive_params(p);
  out.set_physics(p, d);
  return d;
}

cplx target_alpha(const DerivedParams& d) {
  if (!std::isfinite(d.alpha.real()) || !std::isfinite(d.alpha.imag()))
    throw ValidationError("cat amplitude undefined: G = 0");
  return d.alpha;
}

// ---------------------------------------------------------------- scenarios

void run_derive(const RunConfig& c, Emitter& out) {
  const DerivedParams d = physics(c, out);
  const RwaReport report = rwa_validity(d);
  enforce_rwa(c, report);
  std::vector<std::string> rows;
  for (const auto& [k, v] : derived_fields(d)) rows.push_back(k + "," + format_number(v));
  out.csv("derived.csv", "quantity,value", rows);
  out.csv("rwa.csv", "name,large,small,ratio,pass", rwa_rows(report));
  auto& r = out.results();
  r["Gamma_a"] = number_json(d.Gamma_a);
  r["G"] = number_json(d.G);
  r["r"] = number_json(d.r);
  r["N_eff"] = number_json(d.N_eff);
  r["M_eff_abs"] = number_json(std::abs(d.M_eff));
  r["rwa"] = rwa_json(report);
}

struct TierModel {
  LindbladModel model;
  DensityMatrix rho0;
  Operator target_projector;
  Operator n_a;
  Operator parity_a;
};

TierModel build_tier(const RunConfig& c, const DerivedParams& d, std::size_t initial, CatKind kind) {
  const std::string& tier = c.text("tier");
  const Dims dims = parse_dims(c.text("dims"));
  if (initial >= dims.a) throw ValidationError("initial Fock level must be below dim_a");
  const ModeSpace ma(dims.a);
  const PureState target = cat_state(ma, target_alpha(d), kind);
  const Operator proj(CompositeSpace(ma), Matrix(target.amplitudes() * target.amplitudes().adjoint()));
  const Operator na = ladder(ma, Ladder::number);
  const Operator par = parity(ma);
  PureState psi0 = fock_state(ma, initial);
  if (tier == "reduced") {
    return {build_reduced_model(d, d.source.kappa_a, dims.a), DensityMatrix::from_pure(psi0), proj, na, par};
  }
  LindbladModel model = tier == "approx" ? build_approx_model(d, dims)
                                         : build_exact_model(d, dims, ExactOptions{c.flag("nonrotating")});
  for (std::size_t m = 1; m < model.space().mode_count(); ++m)
    psi0 = tensor(psi0, fock_state(model.space().mode(m), 0));
  const CompositeSpace& space = model.space();
  return {std::move(model), DensityMatrix::from_pure(psi0), embed(proj, space, 0), embed(na, space, 0),
          embed(par, space, 0)};
}

double root_fidelity(cplx overlap) { return std::sqrt(std::max(0.0, overlap.real())); }

void run_simulate(const RunConfig& c, Emitter& out) {
  const DerivedParams d = physics(c, out);
  const std::string& tier = c.text("tier");
  const RwaReport report = rwa_validity(d);
  enforce_rwa(c, report);
  const std::size_t initial = c.count("initial");
  const CatKind kind = initial % 2 == 0 ? CatKind::even : CatKind::odd;
  TierModel tm = build_tier(c, d, initial, kind);

  EvolveOptions eo;
  eo.t_final = c.number("t_final");
  if (!(eo.t_final > 0.0)) throw ValidationError("t_final must be > 0");
  eo.dt = c.optional_number("dt").value_or(max_step(tm.model));
  const std::size_t samples = c.count("samples");
  if (samples < 2) throw ValidationError("samples must be >= 2");
  eo.sample_times = uniform_times(eo.t_final, samples);
  eo.observables = {{"target", tm.target_projector}, {"n_a", tm.n_a}, {"parity_a", tm.parity_a}};
  const Trajectory tr = evolve(tm.model, tm.rho0, eo);

  std::vector<std::string> rows;
  double peak = -1.0, peak_t = 0.0;
  const auto& target = tr["target"];
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    const double f = root_fidelity(target[k]);
    if (f > peak) {
      peak = f;
      peak_t = tr.times[k];
    }
    rows.push_back(row({tr.times[k], f, tr["n_a"][k].real(), tr["parity_a"][k].real(), tr["trace"][k].real(),
                        tr["purity"][k].real()}));
  }
  out.csv("trajectory.csv", "t,fidelity,n_a,parity_a,trace,purity", rows);
  auto& r = out.results();
  r["tier"] = tier;
  r["target"] = kind == CatKind::even ? "even" : "odd";
  r["dt"] = number_json(tr.dt);
  r["final_fidelity"] = number_json(root_fidelity(target.back()));
  r["peak_fidelity"] = number_json(peak);
  r["peak_time"] = number_json(peak_t);
  r["final_n_a"] = number_json(tr["n_a"].back().real());
  r["final_purity"] = number_json(tr["purity"].back().real());
  r["rwa"] = rwa_json(report);
}

void run_steady(const RunConfig& c, Emitter& out) {
  const DerivedParams d = physics(c, out);
  const std::string& tier = c.text("tier");
  if (tier == "exact") throw ValidationError("steady: the exact tier is time dependent; use simulate");
  const RwaReport report = rwa_validity(d);
  enforce_rwa(c, report);
  const std::string& hint_name = c.text("hint");
  std::optional<ParityHint> hint;
  if (hint_name == "even")
    hint = ParityHint::even();
  else if (hint_name == "odd")
    hint = ParityHint::odd();
  else if (hint_name != "none")
    throw ConfigError("hint: expected even, odd or none, got '" + hint_name + "'");
  const CatKind kind = hint_name == "odd" ? CatKind::odd : CatKind::even;

  const Dims dims = parse_dims(c.text("dims"));
  const LindbladModel model =
      tier == "reduced" ? build_reduced_model(d, d.source.kappa_a, dims.a) : build_approx_model(d, dims);
  const DensityMatrix ss = steady_state(model, hint);
  const std::size_t keep[] = {0};
  const DensityMatrix rho_a = tier == "reduced" ? ss : partial_trace(ss, keep);
  const double f = fidelity(rho_a, cat_state(rho_a.space().mode(0), target_alpha(d), kind));

  const StateFamily family{kind == CatKind::even ? FamilyKind::SECS : FamilyKind::SOCS, std::abs(d.alpha), d.r};
  const QfiResult sim = qfi_of_simulated_state(rho_a, d.r);
  const QfiResult ana = qfi_analytic(family);

  std::vector<std::string> rows;
  for (Eigen::Index n = 0; n < rho_a.matrix().rows(); ++n) rows.push_back(row({double(n), rho_a.matrix()(n, n).real()}));
  out.csv("steady_populations.csv", "n,population", rows);
  auto& r = out.results();
  r["tier"] = tier;
  r["hint"] = hint_name;
  r["fidelity"] = number_json(f);
  r["residual"] = number_json(residual(model, ss));
  r["purity"] = number_json(rho_a.purity());
  r["n_a"] = number_json(expectation(ladder(rho_a.space().mode(0), Ladder::number), rho_a).real());
  r["qfi_simulated"] = {{"F", number_json(sim.F)}, {"N", number_json(sim.N)}, {"Q", number_json(sim.Q)}};
  r["qfi_analytic"] = {{"family", to_string(family.kind)}, {"F", number_json(ana.F)}, {"N", number_json(ana.N)}};
  r["qfi_relative_difference"] = number_json(std::abs(sim.F - ana.F) / ana.F);
  r["rwa"] = rwa_json(report);
}

void run_wigner(const RunConfig& c, Emitter& out) {
  const std::string& state = c.text("state");
  const double alpha = c.number("alpha"), r = c.number("r");
  if (!(alpha >= 0.0) || !(r >= 0.0)) throw ValidationError("wigner: alpha and r must be >= 0");
  const std::size_t dim = c.text("dim").empty() ? required_dim(alpha, r) : c.count("dim");
  check_truncation(dim, alpha, r);
  const ModeSpace mode(dim);
  std::optional<DensityMatrix> rho;
  if (state == "secs")
    rho = DensityMatrix::from_pure(squeezed_cat(mode, alpha, r, CatKind::even));
  else if (state == "socs")
    rho = DensityMatrix::from_pure(squeezed_cat(mode, alpha, r, CatKind::odd));
  else if (state == "decayed")
    rho = decayed_cat_density(alpha, r, c.number("kappa_a"), c.number("t"), dim);
  else
    throw ConfigError("state: expected secs, socs or decayed, got '" + state + "'");

  const std::size_t n = c.count("n");
  const std::string& grid_kind = c.text("grid");
  GridSpec spec;
  if (grid_kind == "covering")
    spec = GridSpec::covering(alpha, r, n);
  else if (grid_kind == "square")
    spec = GridSpec::square(c.number("half_width"), n);
  else
    throw ConfigError("grid: expected covering or square, got '" + grid_kind + "'");

  const WignerGrid w = wigner_numeric(*rho, spec);
  auto& res = out.results();
  res["normalization"] = number_json(w.normalization());
  res["negativity_volume"] = number_json(negativity_volume(w));
  res["min"] = number_json(w.values.minCoeff());
  res["max"] = number_json(w.values.maxCoeff());
  res["dim"] = dim;
  if (state == "secs") {
    const WignerGrid ref = wigner_analytic_secs(alpha, r, spec);
    res["max_abs_vs_analytic"] = number_json((w.values - ref.values).cwiseAbs().maxCoeff());
  }

  auto join = [](const std::string& label, const std::vector<double>& v) {
    std::string s = label;
    for (double x : v) s += "," + format_number(x);
    return s;
  };
  std::vector<std::string> rows = {join("q_values", w.q_values), join("p_values", w.p_values)};
  for (Eigen::Index i = 0; i < w.values.rows(); ++i) {
    std::string s;
    for (Eigen::Index j = 0; j < w.values.cols(); ++j) {
      if (j) s += ',';
      s += format_number(w.values(i, j));
    }
    rows.push_back(std::move(s));
  }
  out.csv("wigner.csv", "", rows);
}

json qfi_json(const QfiResult& q) {
  return {{"F", number_json(q.F)}, {"N", number_json(q.N)}, {"Q", number_json(q.Q)}, {"J_corr", number_json(q.J_corr)}};
}

void run_qfi(const RunConfig& c, Emitter& out) {
  const StateFamily family{parse_family(c.text("family")), c.number("alpha"), c.number("r")};
  family.validate();
  const std::size_t dim = c.text("dim").empty() ? required_dim(family.alpha, family.r) + 40 : c.count("dim");
  const QfiResult ana = qfi_analytic(family);
  const QfiResult num = qfi_numeric(family, dim);
  out.csv("qfi.csv", "family,alpha,r,N,F,Q,J_corr,F_numeric,N_numeric",
          {to_string(family.kind) + "," + row({family.alpha, family.r, ana.N, ana.F, ana.Q, ana.J_corr, num.F, num.N})});
  auto& r = out.results();
  r["family"] = to_string(family.kind);
  r["analytic"] = qfi_json(ana);
  r["numeric"] = qfi_json(num);
  r["dim"] = dim;
  r["beats_heisenberg"] = ana.F > ana.N * ana.N;
}

void run_optimize(const RunConfig& c, Emitter& out) {
  const FamilyKind kind = parse_family(c.text("family"));
  std::vector<std::string> rows;
  json list = json::array();
  for (double n : c.number_list("N")) {
    const Optimum o = optimize_qfi(kind, n);
    rows.push_back(row({o.N_target, o.r, o.alpha, o.N, o.F, o.F / o.N, o.F / (o.N * o.N)}));
    list.push_back({{"N_target", number_json(o.N_target)}, {"r", number_json(o.r)}, {"alpha", number_json(o.alpha)},
                    {"N", number_json(o.N)}, {"F", number_json(o.F)}});
  }
  out.csv("optimize.csv", "N_target,r,alpha,N,F,F_over_N,F_over_N2", rows);
  out.results()["family"] = to_string(kind);
  out.results()["optima"] = list;
}

void run_fit(const RunConfig& c, Emitter& out) {
  const FamilyKind kind = parse_family(c.text("family"));
  const double lo = c.number("N_min"), hi = c.number("N_max"), step = c.number("N_step");
  if (!(step > 0.0) || !(hi >= lo)) throw ValidationError("fit: need N_step > 0 and N_max >= N_min");
  std::vector<double> samples;
  for (std::size_t k = 0;; ++k) {
    const double n = lo + double(k) * step;
    if (n > hi * (1.0 + 1e-12)) break;
    samples.push_back(n);
  }
  const ScalingFit fit = fit_scaling(kind, samples);
  std::vector<std::string> rows;
  for (const auto& o : fit.samples) rows.push_back(row({o.N_target, o.r, o.alpha, o.N, o.F}));
  out.csv("fit_samples.csv", "N_target,r,alpha,N,F", rows);
  json coeffs = json::object();
  for (std::size_t i = 0; i < fit.basis.size(); ++i) coeffs[fit.basis[i]] = number_json(fit.coefficients[i]);
  auto& r = out.results();
  r["family"] = to_string(kind);
  r["coefficients"] = coeffs;
  r["residual"] = number_json(fit.residual);
  r["sample_count"] = fit.samples.size();
}

}  // namespace

void execute(const RunConfig& config, std::ostream& log) {
  const auto t0 = std::chrono::steady_clock::now();
  Emitter out(config, log);
  switch (config.scenario()) {
    case Scenario::derive: run_derive(config, out); break;
    case Scenario::simulate: run_simulate(config, out); break;
    case Scenario::steady: run_steady(config, out); break;
    case Scenario::wigner: run_wigner(config, out); break;
    case Scenario::qfi: run_qfi(config, out); break;
    case Scenario::optimize: run_optimize(config, out); break;
    case Scenario::fit: run_fit(config, out); break;
  }
  out.finish(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return kParseError;
  if (dynamic_cast<const ValidationError*>(&e)) return kValidationError;
  if (dynamic_cast<const TruncationError*>(&e)) return kTruncationError;
  if (dynamic_cast<const ContractError*>(&e)) return kContractError;
  return kFailure;
}

int run(const RunConfig& config, std::ostream& log, std::ostream& err) {
  try {
    execute(config, log);
    return kOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  }
}

}  // namespace sqcat::cli
