#pragma once

// Phase-estimation QFI for (squeezed) cat inputs of a two-arm interferometer.
// N is always the total mean photon number over both arms; F = 2 Var(a^dag a).

#include <optional>
#include <string>
#include <vector>

#include "sqcat/fock.hpp"

namespace sqcat {

enum class FamilyKind { ECS, OCS, YSCS, SECS, SOCS, SYSCS };

struct StateFamily {
  FamilyKind kind = FamilyKind::SECS;
  double alpha = 0.0;
  double r = 0.0;

  /// r = 0 for unsqueezed kinds, alpha >= 0, alpha > 0 for odd kinds.
  void validate() const;
};

bool is_squeezed(FamilyKind kind);
CatKind cat_kind(FamilyKind kind);
std::string to_string(FamilyKind kind);
/// Case-insensitive; throws ValidationError on unknown names.
FamilyKind parse_family(const std::string& name);

struct QfiResult {
  std::optional<StateFamily> family;
  double F = 0.0;
  double N = 0.0;
  double Q = 0.0;
  double J_corr = 0.0;

  /// Q = F/N - 1 (0 when N = 0), J_corr = 0.
  static QfiResult from_moments(std::optional<StateFamily> family, double F, double N);
};

QfiResult qfi_analytic(const StateFamily& family);
/// Variance of a^dag a on the Fock-space state of the family.
QfiResult qfi_numeric(const StateFamily& family, std::size_t dim);

double mandel_q(const StateFamily& family);
/// (Var(n) - <n>) / <n> of an explicit single-mode state.
double mandel_q(const PureState& state);

struct Optimum {
  FamilyKind kind = FamilyKind::SECS;
  double N_target = 0.0;
  double r = 0.0;
  double alpha = 0.0;
  double F = 0.0;
  double N = 0.0;
};

/// Maximizes F(r, alpha) on the constraint N(r, alpha) = N_target. Unsqueezed
/// kinds keep r = 0. Throws ValidationError when N_target is infeasible.
Optimum optimize_qfi(FamilyKind kind, double N_target);

struct ScalingFit {
  FamilyKind kind = FamilyKind::SECS;
  std::vector<std::string> basis;
  std::vector<double> coefficients;
  /// Euclidean norm of the fit residual.
  double residual = 0.0;
  std::vector<Optimum> samples;
};

/// SECS, SYSCS: {N, N^2}; SOCS: {1, sqrt N, N, N^2}; unsqueezed kinds: {1, N}.
std::vector<std::string> scaling_basis(FamilyKind kind);
ScalingFit fit_scaling(FamilyKind kind, const std::vector<double>& N_samples);
/// {4, 6, ..., 100}.
std::vector<double> default_fit_samples();

/// QFI of the lab-frame state S^dag(r) rho S(r), evaluated as Tr[rho f(S n S^dag)]
/// on a padded copy of rho (exact for any truncation of rho).
QfiResult qfi_of_simulated_state(const DensityMatrix& rho_a, double r);

}  // namespace sqcat
