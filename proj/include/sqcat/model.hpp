#pragma once

// Physics of the driven three-mode system: parameter chain from laboratory
// knobs to the squeezed/displaced interaction frame, Lindblad models at three
// levels of approximation, RWA bookkeeping and the analytic decayed cat.
//
// All rates and frequencies are in units of kappa_b.

#include <cstddef>
#include <string>
#include <vector>

#include "sqcat/dynamics.hpp"
#include "sqcat/fock.hpp"

namespace sqcat {

struct SystemParams {
  double Delta_a = 0.0;
  double Delta_b = 0.0;
  double Delta_c = 0.0;
  double g = 0.0;
  double Omega_1 = 0.0;
  double Omega_2 = 0.0;
  double Omega_3 = 0.0;
  double phi_1 = 0.0;
  double phi_2 = 0.0;
  double phi_3 = 0.0;
  double kappa_a = 0.0;
  double kappa_b = 1.0;
  double kappa_c = 1.0;
  double r_env = 0.0;
  double phi_env = 0.0;
  /// omega_2 - omega_3.
  double drive_detuning_b = 0.0;

  /// Throws ValidationError for non-finite values, kappa_b <= 0, negative
  /// rates, Delta_a <= 2|Omega_1| or phi_1 != 0.
  void validate() const;
};

struct DerivedParams {
  SystemParams source;
  cplx eta_s{0.0};
  double r = 0.0;
  double omega_sa = 0.0;
  double g_s = 0.0;
  double g_p = 0.0;
  double G = 0.0;
  double Gamma_a = 0.0;
  cplx J_eff{0.0};
  /// sqrt(-Omega_2 e^{i phi_2} / G); NaN when G = 0.
  cplx alpha{0.0};
  double N_eff = 0.0;
  cplx M_eff{0.0};

  /// Omega_2 e^{i phi_2}.
  cplx drive_b() const;
  /// 2 omega_sa = Delta_b and omega_2 - omega_3 = Delta_b (relative 1e-9).
  bool resonant() const;
};

DerivedParams derive_params(const SystemParams& p);

/// Knobs that are not fixed by the (alpha, r, G) targets.
struct TargetBase {
  double Delta_a = 100.0;
  double g = 1e-3;
  double kappa_a = 0.0;
  double kappa_b = 1.0;
  double kappa_c = 1.0;
  /// Delta_c / Delta_b.
  double detuning_ratio_c = 11.0;
  /// Reservoir; matched to r_target when unset.
  std::optional<double> r_env;
  std::optional<double> phi_env;
};

/// Inverts the parameter chain so that derive_params returns the requested
/// real alpha, r and G with real positive eta_s, on resonance.
SystemParams params_for_target(double alpha, double r, double G, const TargetBase& base = {});

/// The paper's Fig. 2 operating point: alpha = 2, r = 1.1, G = 0.1, Delta_a = 100.
SystemParams figure2_params();
/// figure2_params with every detuning divided by 5 (g unchanged).
SystemParams scaled_detuning_params();

struct Reservoir {
  double r_env = 0.0;
  double phi_env = 0.0;
  double n_env = 0.0;
  cplx m_env{0.0};
};

/// N_e = sinh^2 r_e, M_e = sinh r_e cosh r_e e^{i phi_e}.
Reservoir reservoir(double r_env, double phi_env);
/// r_e = r, phi_e = pi.
Reservoir matched_reservoir(double r);

double effective_n(double r, double r_env, double phi_env);
cplx effective_m(double r, double r_env, double phi_env);

struct Dims {
  std::size_t a = 20;
  std::size_t b = 4;
  std::size_t c = 3;
};

struct ExactOptions {
  bool include_nonrotating = true;
};

/// Three modes (a, b, c) in the interaction picture with every oscillating
/// term kept. Requires resonance.
LindbladModel build_exact_model(const DerivedParams& d, const Dims& dims = {}, const ExactOptions& options = {});
/// Degenerate three-wave mixing of (a, b) with kappa_a (squeezed kind) and kappa_b.
LindbladModel build_approx_model(const DerivedParams& d, const Dims& dims = {});
/// Mode b eliminated: H = iJ(a^2 - a^dag^2), Gamma_a D[a^2], optional kappa_a.
/// Requires real J (phi_2 in {0, pi}).
LindbladModel build_reduced_model(const DerivedParams& d, double kappa_a, std::size_t dim_a);

struct RwaRatio {
  std::string name;
  double large = 0.0;
  double small = 0.0;
  /// large / small; +inf when small = 0.
  double ratio = 0.0;
  bool pass = false;
};

struct RwaReport {
  static constexpr double kThreshold = 10.0;
  std::vector<RwaRatio> ratios;
  double n_a = 0.0, n_b = 0.0, n_c = 0.0;
  bool pass = true;
};

RwaReport rwa_validity(const DerivedParams& d, double n_a, double n_b, double n_c);
/// n_a = |alpha|^2, n_b = max(1, (2 Omega_2 / kappa_b)^2), n_c = 1.
RwaReport rwa_validity(const DerivedParams& d);

/// S^dag(r) rho S(r) after zero-padding to lab_dim. TruncationError unless
/// lab_dim >= required_dim(sqrt(<n>), r).
DensityMatrix to_lab_frame(const DensityMatrix& rho, double r, std::size_t lab_dim);
PureState to_lab_frame(const PureState& psi, double r, std::size_t lab_dim);

/// Even cat under pure single-photon loss, mapped by S^dag(r).
DensityMatrix decayed_cat_density(double alpha, double r, double kappa_a, double t, std::size_t dim);

/// 1 / (2 |alpha|^2 kappa_a).
double lifetime(double alpha, double kappa_a);

}  // namespace sqcat
