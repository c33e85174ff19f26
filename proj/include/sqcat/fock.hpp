#pragma once

// Truncated Fock-space linear algebra: mode spaces, operators, canonical
// states and expectation machinery for single and composite bosonic modes.
//
// Basis ordering on a composite space is lexicographic with mode 0 the most
// significant factor, i.e. an operator A on mode 0 of (A, B) embeds as A (x) I.

#include <complex>
#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "sqcat/errors.hpp"

namespace sqcat {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

/// A single bosonic mode truncated to levels 0..dim-1.
class ModeSpace {
 public:
  explicit ModeSpace(std::size_t dim);

  std::size_t dim() const noexcept { return dim_; }
  bool operator==(const ModeSpace&) const = default;

 private:
  std::size_t dim_;
};

/// Ordered tensor product of mode spaces.
class CompositeSpace {
 public:
  CompositeSpace(ModeSpace mode);  // NOLINT(google-explicit-constructor)
  explicit CompositeSpace(std::vector<ModeSpace> modes);

  const std::vector<ModeSpace>& modes() const noexcept { return modes_; }
  std::size_t mode_count() const noexcept { return modes_.size(); }
  std::size_t total_dim() const noexcept { return total_; }
  const ModeSpace& mode(std::size_t position) const;

  /// Occupation of `position` in basis state `index`.
  std::size_t level(std::size_t index, std::size_t position) const;

  bool operator==(const CompositeSpace&) const = default;

 private:
  std::vector<ModeSpace> modes_;
  std::size_t total_;
};

/// Composite spaces above this total dimension store operators sparsely.
inline constexpr std::size_t kSparseCutoff = 256;

/// Square operator on a composite space. Single-mode and small composite
/// operators are dense; larger composite embeddings are sparse.
class Operator {
 public:
  Operator(CompositeSpace space, Matrix matrix);
  Operator(CompositeSpace space, SparseMatrix matrix);

  static Operator identity(const CompositeSpace& space);
  static Operator zero(const CompositeSpace& space);

  const CompositeSpace& space() const noexcept { return space_; }
  std::size_t dim() const noexcept { return space_.total_dim(); }
  bool is_sparse() const noexcept { return std::holds_alternative<SparseMatrix>(storage_); }

  Matrix dense() const;
  SparseMatrix sparse() const;

  Operator adjoint() const;
  Vector apply(const Vector& v) const;

  Operator operator+(const Operator& rhs) const;
  Operator operator-(const Operator& rhs) const;
  Operator operator*(const Operator& rhs) const;
  Operator operator*(cplx s) const;
  friend Operator operator*(cplx s, const Operator& op) { return op * s; }

 private:
  static bool prefers_sparse(const CompositeSpace& space);
  void require_same_space(const Operator& rhs) const;

  CompositeSpace space_;
  std::variant<Matrix, SparseMatrix> storage_;
};

/// Commutator [A, B].
Operator commutator(const Operator& a, const Operator& b);

/// Normalized state vector.
class PureState {
 public:
  /// Normalizes `amplitudes`; throws ValidationError on a zero vector.
  PureState(CompositeSpace space, Vector amplitudes);

  const CompositeSpace& space() const noexcept { return space_; }
  const Vector& amplitudes() const noexcept { return amplitudes_; }
  cplx amplitude(std::size_t index) const { return amplitudes_(static_cast<Eigen::Index>(index)); }

 private:
  CompositeSpace space_;
  Vector amplitudes_;
};

/// Hermitian, unit-trace, positive semidefinite matrix.
class DensityMatrix {
 public:
  static constexpr double kHermitianTol = 1e-10;
  static constexpr double kTraceTol = 1e-8;
  static constexpr double kCheckpointTraceTol = 1e-6;
  static constexpr double kEigenTol = 1e-8;

  /// Validates Hermiticity and trace (within `trace_tol`). Positivity is
  /// checked separately by `check_positive` since it needs a diagonalization.
  DensityMatrix(CompositeSpace space, Matrix matrix, double trace_tol = kTraceTol);

  static DensityMatrix from_pure(const PureState& state);
  /// Hermitizes and rescales to unit trace before validating.
  static DensityMatrix normalized(CompositeSpace space, Matrix matrix);

  const CompositeSpace& space() const noexcept { return space_; }
  const Matrix& matrix() const noexcept { return matrix_; }
  std::size_t dim() const noexcept { return space_.total_dim(); }

  double trace() const;
  double purity() const;
  double min_eigenvalue() const;
  /// Throws ValidationError when an eigenvalue is below -kEigenTol.
  void check_positive() const;

 private:
  CompositeSpace space_;
  Matrix matrix_;
};

enum class Ladder { annihilation, creation, number, identity };
enum class CatKind { even, odd, yurke_stoler };

Operator ladder(const ModeSpace& space, Ladder which);
/// Position quadrature q = (a + a^dag)/sqrt(2).
Operator position_quadrature(const ModeSpace& space);
/// Momentum quadrature p = (a - a^dag)/(i sqrt(2)).
Operator momentum_quadrature(const ModeSpace& space);
/// Photon-number parity (-1)^{a^dag a}.
Operator parity(const ModeSpace& space);

/// Places a single-mode operator at `position`, identity elsewhere.
Operator embed(const Operator& op, const CompositeSpace& target, std::size_t position);
Operator kron(const Operator& a, const Operator& b);

/// Smallest truncation allowed for a state of amplitude |alpha| squeezed by r:
/// ceil(4 (|alpha|^2 e^{2r} + e^{2r})).
std::size_t required_dim(double alpha_abs, double r);
/// Throws TruncationError when `dim < required_dim(alpha_abs, r)`.
void check_truncation(std::size_t dim, double alpha_abs, double r);

/// exp(eta a^dag - eta^* a).
Operator displacement(const ModeSpace& space, cplx eta);
/// exp[(zeta a^dag^2 - zeta^* a^2)/2]. Its adjoint S^dag(r) compresses q.
Operator squeeze(const ModeSpace& space, cplx zeta);

PureState fock_state(const ModeSpace& space, std::size_t n);
PureState coherent_state(const ModeSpace& space, cplx alpha);
PureState cat_state(const ModeSpace& space, cplx alpha, CatKind kind);
/// S^dag(r) applied to cat_state(alpha, kind).
PureState squeezed_cat(const ModeSpace& space, cplx alpha, double r, CatKind kind);
PureState tensor(const PureState& a, const PureState& b);
DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b);

cplx expectation(const Operator& op, const PureState& state);
cplx expectation(const Operator& op, const DensityMatrix& rho);
double variance(const Operator& op, const PureState& state);
double variance(const Operator& op, const DensityMatrix& rho);

/// Uhlmann fidelity Tr sqrt(sqrt(rho) sigma sqrt(rho)).
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);
/// sqrt(<psi|rho|psi>), equal to the Uhlmann form for a pure target.
double fidelity(const DensityMatrix& rho, const PureState& target);
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

/// Traces out every mode not listed in `keep`.
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep);

/// Copies a single-mode density matrix into a larger truncation (zero padding).
DensityMatrix pad(const DensityMatrix& rho, std::size_t new_dim);
/// U rho U^dag.
DensityMatrix conjugate(const Operator& unitary, const DensityMatrix& rho);

}  // namespace sqcat
