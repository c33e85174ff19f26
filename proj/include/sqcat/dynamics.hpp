#pragma once

// Lindblad master-equation integration and steady-state extraction.
//
//   d rho/dt = -i [H(t), rho] + sum_k rate_k L_k(rho)
//
// Superoperators are vectorized by column stacking: vec(A rho B) = (B^T (x) A) vec(rho).

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sqcat/fock.hpp"

namespace sqcat {

/// Time envelope amplitude * exp(-i frequency t).
struct Envelope {
  cplx amplitude{1.0};
  double frequency{0.0};

  cplx operator()(double t) const;
  /// Envelope of the Hermitian-conjugate partner term.
  Envelope conjugate() const { return {std::conj(amplitude), -frequency}; }
  static Envelope constant(cplx value) { return {value, 0.0}; }
};

struct HamiltonianTerm {
  Operator op;
  Envelope envelope;
};

/// Dissipation channel for a jump operator o.
///
///   standard:  rate * D[o]
///   squeezed:  rate * [(N+1) D[o] + N D[o^dag] - M G[o] - M^* G[o^dag]]
///
/// with D[o]rho = o rho o^dag - {o^dag o, rho}/2 and G[o]rho = o rho o - (o o rho + rho o o)/2.
class Dissipator {
 public:
  enum class Kind { standard, squeezed };

  static Dissipator standard(Operator op, double rate);
  /// Throws ValidationError unless |M|^2 <= N(N+1) (within 1e-10).
  static Dissipator squeezed(Operator op, double rate, double n_env, cplx m_env);

  const Operator& op() const noexcept { return op_; }
  double rate() const noexcept { return rate_; }
  Kind kind() const noexcept { return kind_; }
  double n_env() const noexcept { return n_env_; }
  cplx m_env() const noexcept { return m_env_; }

 private:
  Dissipator(Operator op, double rate, Kind kind, double n_env, cplx m_env);

  Operator op_;
  double rate_;
  Kind kind_;
  double n_env_;
  cplx m_env_;
};

class LindbladModel {
 public:
  explicit LindbladModel(CompositeSpace space);

  const CompositeSpace& space() const noexcept { return space_; }
  const std::vector<HamiltonianTerm>& terms() const noexcept { return terms_; }
  const std::vector<Dissipator>& dissipators() const noexcept { return dissipators_; }

  void add_term(Operator op, Envelope envelope);
  /// Adds envelope * op together with its Hermitian-conjugate partner.
  void add_hermitian_pair(const Operator& op, Envelope envelope);
  void add_dissipator(Dissipator d);

  Operator hamiltonian(double t) const;
  bool time_independent() const;
  /// Largest |frequency| over all envelopes.
  double max_frequency() const;
  /// Throws ValidationError if H(t) is not Hermitian (1e-10) at the sample times.
  void check_hermitian(const std::vector<double>& sample_times) const;

 private:
  void require_space(const Operator& op) const;

  CompositeSpace space_;
  std::vector<HamiltonianTerm> terms_;
  std::vector<Dissipator> dissipators_;
};

/// d rho/dt for an arbitrary (not necessarily Hermitian) matrix.
Matrix rhs(const LindbladModel& model, const Matrix& rho, double t);
Matrix rhs(const LindbladModel& model, const DensityMatrix& rho, double t);

/// Dense superoperator at time t in the column-stacking convention.
Matrix liouvillian(const LindbladModel& model, double t = 0.0);

/// Frequency scale used by the step-size contract: largest envelope
/// frequency + spectral radius of H(0) + dissipative rate scale.
double characteristic_frequency(const LindbladModel& model);
/// (2 pi / characteristic_frequency) / 20.
double max_step(const LindbladModel& model);

struct Observable {
  std::string name;
  Operator op;
};

struct EvolveOptions {
  double t_final = 0.0;
  double dt = 0.0;
  std::vector<Observable> observables;
  /// Times at which observables are recorded (snapped to the step grid).
  /// Empty means every step.
  std::vector<double> sample_times;
  std::vector<double> snapshot_times;
};

struct Snapshot {
  double time;
  DensityMatrix state;
};

/// Observable series on the integrator grid. "trace" and "purity" are always
/// recorded alongside the requested observables.
struct Trajectory {
  std::vector<double> times;
  std::map<std::string, std::vector<cplx>> series;
  std::vector<Snapshot> snapshots;
  double dt = 0.0;
  std::optional<DensityMatrix> final_state;

  const std::vector<cplx>& operator[](const std::string& name) const;
  std::vector<double> real(const std::string& name) const;
};

/// Fixed-step RK4. Throws ContractError when dt exceeds max_step(model); the
/// step actually used is t_final / ceil(t_final / dt).
Trajectory evolve(const LindbladModel& model, const DensityMatrix& rho0, const EvolveOptions& options);

/// Uniform sample times {0, t/(n-1), ..., t}.
std::vector<double> uniform_times(double t_final, std::size_t count);

/// Selects a parity sector of one mode. `even_weight` in [0, 1]; values
/// strictly between 0 and 1 request the corresponding mixture of the even- and
/// odd-sector steady states.
struct ParityHint {
  std::size_t mode = 0;
  double even_weight = 1.0;

  static ParityHint even(std::size_t mode = 0) { return {mode, 1.0}; }
  static ParityHint odd(std::size_t mode = 0) { return {mode, 0.0}; }
  /// Parity populations of `rho` on `mode`.
  static ParityHint from_state(const DensityMatrix& rho, std::size_t mode = 0);
};

struct SteadyStateOptions {
  /// Sector dimension up to which the dense null-space path is used.
  std::size_t dense_limit = 64;
  /// Residual target for the long-time evolution fallback.
  double residual_tol = 1e-10;
  double fallback_max_time = 1e5;
  double fallback_chunk = 50.0;
};

/// Time-independent steady state via the smallest right-singular vector of the
/// Liouvillian (restricted to the hinted parity sector). Throws
/// MultiplicityError if the null space is degenerate.
DensityMatrix steady_state(const LindbladModel& model, std::optional<ParityHint> hint = std::nullopt,
                           const SteadyStateOptions& options = {});

/// Max-abs entry of rhs(model, rho, t).
double residual(const LindbladModel& model, const DensityMatrix& rho, double t = 0.0);

}  // namespace sqcat
