#include "sqcat/fock.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace sqcat {

namespace {

Matrix hermitize(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

Matrix kron_dense(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

SparseMatrix kron_sparse(const SparseMatrix& a, const SparseMatrix& b) {
  std::vector<Eigen::Triplet<cplx>> triplets;
  triplets.reserve(static_cast<std::size_t>(a.nonZeros() * b.nonZeros()));
  for (Eigen::Index i = 0; i < a.outerSize(); ++i)
    for (SparseMatrix::InnerIterator ia(a, i); ia; ++ia)
      for (Eigen::Index k = 0; k < b.outerSize(); ++k)
        for (SparseMatrix::InnerIterator ib(b, k); ib; ++ib)
          triplets.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(),
                                ia.value() * ib.value());
  SparseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

/// exp(A) for anti-Hermitian A, via the Hermitian generator K = -iA.
Matrix expm_antihermitian(const Matrix& a) {
  const Matrix k = hermitize(cplx(0.0, -1.0) * a);
  Eigen::SelfAdjointEigenSolver<Matrix> es(k);
  const Vector phases = (cplx(0.0, 1.0) * es.eigenvalues().cast<cplx>()).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

Vector coherent_amplitudes(std::size_t dim, cplx alpha) {
  Vector c(static_cast<Eigen::Index>(dim));
  c(0) = std::exp(-0.5 * std::norm(alpha));
  for (std::size_t n = 1; n < dim; ++n)
    c(static_cast<Eigen::Index>(n)) = c(static_cast<Eigen::Index>(n - 1)) * alpha / std::sqrt(double(n));
  return c;
}

}  // namespace

// ---------------------------------------------------------------- spaces

ModeSpace::ModeSpace(std::size_t dim) : dim_(dim) {
  if (dim < 2) throw DimensionError("ModeSpace: dim must be >= 2");
}

CompositeSpace::CompositeSpace(ModeSpace mode) : CompositeSpace(std::vector<ModeSpace>{mode}) {}

CompositeSpace::CompositeSpace(std::vector<ModeSpace> modes) : modes_(std::move(modes)), total_(1) {
  if (modes_.empty()) throw DimensionError("CompositeSpace: at least one mode required");
  for (const auto& m : modes_) total_ *= m.dim();
}

const ModeSpace& CompositeSpace::mode(std::size_t position) const {
  if (position >= modes_.size()) throw DimensionError("CompositeSpace: mode index out of range");
  return modes_[position];
}

std::size_t CompositeSpace::level(std::size_t index, std::size_t position) const {
  std::size_t stride = 1;
  for (std::size_t k = modes_.size(); k-- > position + 1;) stride *= modes_[k].dim();
  return (index / stride) % mode(position).dim();
}

// ---------------------------------------------------------------- Operator

bool Operator::prefers_sparse(const CompositeSpace& space) {
  return space.mode_count() > 1 && space.total_dim() > kSparseCutoff;
}

Operator::Operator(CompositeSpace space, Matrix matrix) : space_(std::move(space)) {
  const auto n = static_cast<Eigen::Index>(space_.total_dim());
  if (matrix.rows() != n || matrix.cols() != n)
    throw DimensionError("Operator: matrix dimension does not match space");
  if (prefers_sparse(space_))
    storage_ = SparseMatrix(matrix.sparseView());
  else
    storage_ = std::move(matrix);
}

Operator::Operator(CompositeSpace space, SparseMatrix matrix) : space_(std::move(space)) {
  const auto n = static_cast<Eigen::Index>(space_.total_dim());
  if (matrix.rows() != n || matrix.cols() != n)
    throw DimensionError("Operator: matrix dimension does not match space");
  matrix.makeCompressed();
  if (prefers_sparse(space_))
    storage_ = std::move(matrix);
  else
    storage_ = Matrix(matrix);
}

Operator Operator::identity(const CompositeSpace& space) {
  SparseMatrix id(static_cast<Eigen::Index>(space.total_dim()), static_cast<Eigen::Index>(space.total_dim()));
  id.setIdentity();
  return Operator(space, id);
}

Operator Operator::zero(const CompositeSpace& space) {
  SparseMatrix z(static_cast<Eigen::Index>(space.total_dim()), static_cast<Eigen::Index>(space.total_dim()));
  return Operator(space, z);
}

Matrix Operator::dense() const {
  if (const auto* m = std::get_if<Matrix>(&storage_)) return *m;
  return Matrix(std::get<SparseMatrix>(storage_));
}

SparseMatrix Operator::sparse() const {
  if (const auto* s = std::get_if<SparseMatrix>(&storage_)) return *s;
  SparseMatrix s = std::get<Matrix>(storage_).sparseView();
  s.makeCompressed();
  return s;
}

Operator Operator::adjoint() const {
  if (is_sparse()) return Operator(space_, SparseMatrix(std::get<SparseMatrix>(storage_).adjoint()));
  return Operator(space_, Matrix(std::get<Matrix>(storage_).adjoint()));
}

Vector Operator::apply(const Vector& v) const {
  if (v.size() != static_cast<Eigen::Index>(dim())) throw DimensionError("Operator::apply: size mismatch");
  if (is_sparse()) return std::get<SparseMatrix>(storage_) * v;
  return std::get<Matrix>(storage_) * v;
}

void Operator::require_same_space(const Operator& rhs) const {
  if (!(space_ == rhs.space_)) throw DimensionError("Operator: operands live on different spaces");
}

Operator Operator::operator+(const Operator& rhs) const {
  require_same_space(rhs);
  if (is_sparse()) return Operator(space_, SparseMatrix(sparse() + rhs.sparse()));
  return Operator(space_, Matrix(dense() + rhs.dense()));
}

Operator Operator::operator-(const Operator& rhs) const { return *this + rhs * cplx(-1.0); }

Operator Operator::operator*(const Operator& rhs) const {
  require_same_space(rhs);
  if (is_sparse()) return Operator(space_, SparseMatrix(sparse() * rhs.sparse()));
  return Operator(space_, Matrix(std::get<Matrix>(storage_) * std::get<Matrix>(rhs.storage_)));
}

Operator Operator::operator*(cplx s) const {
  if (is_sparse()) return Operator(space_, SparseMatrix(s * std::get<SparseMatrix>(storage_)));
  return Operator(space_, Matrix(s * std::get<Matrix>(storage_)));
}

Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

// ---------------------------------------------------------------- states

PureState::PureState(CompositeSpace space, Vector amplitudes)
    : space_(std::move(space)), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != static_cast<Eigen::Index>(space_.total_dim()))
    throw DimensionError("PureState: amplitude count does not match space");
  const double norm = amplitudes_.stableNorm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw ValidationError("PureState: cannot normalize a zero vector");
  amplitudes_ /= norm;
}

DensityMatrix::DensityMatrix(CompositeSpace space, Matrix matrix, double trace_tol)
    : space_(std::move(space)), matrix_(std::move(matrix)) {
  const auto n = static_cast<Eigen::Index>(space_.total_dim());
  if (matrix_.rows() != n || matrix_.cols() != n)
    throw DimensionError("DensityMatrix: matrix dimension does not match space");
  const double herm = max_abs(matrix_ - matrix_.adjoint());
  if (herm > kHermitianTol) {
    std::ostringstream os;
    os << "DensityMatrix: not Hermitian (deviation " << herm << ")";
    throw ValidationError(os.str());
  }
  const double tr = matrix_.trace().real();
  if (std::abs(tr - 1.0) > trace_tol) {
    std::ostringstream os;
    os << "DensityMatrix: trace " << tr << " deviates from 1";
    throw ValidationError(os.str());
  }
}

DensityMatrix DensityMatrix::from_pure(const PureState& state) {
  const Vector& v = state.amplitudes();
  return DensityMatrix(state.space(), v * v.adjoint());
}

DensityMatrix DensityMatrix::normalized(CompositeSpace space, Matrix matrix) {
  Matrix h = hermitize(matrix);
  const double tr = h.trace().real();
  if (!(std::abs(tr) > 0.0)) throw ValidationError("DensityMatrix: zero trace");
  h /= tr;
  return DensityMatrix(std::move(space), std::move(h));
}

double DensityMatrix::trace() const { return matrix_.trace().real(); }

double DensityMatrix::purity() const { return matrix_.cwiseAbs2().sum(); }

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(matrix_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void DensityMatrix::check_positive() const {
  const double lo = min_eigenvalue();
  if (lo < -kEigenTol) {
    std::ostringstream os;
    os << "DensityMatrix: negative eigenvalue " << lo;
    throw ValidationError(os.str());
  }
}

// ---------------------------------------------------------------- operators

Operator ladder(const ModeSpace& space, Ladder which) {
  const auto n = static_cast<Eigen::Index>(space.dim());
  Matrix m = Matrix::Zero(n, n);
  switch (which) {
    case Ladder::annihilation:
      for (Eigen::Index k = 1; k < n; ++k) m(k - 1, k) = std::sqrt(double(k));
      break;
    case Ladder::creation:
      for (Eigen::Index k = 1; k < n; ++k) m(k, k - 1) = std::sqrt(double(k));
      break;
    case Ladder::number:
      for (Eigen::Index k = 0; k < n; ++k) m(k, k) = double(k);
      break;
    case Ladder::identity:
      m.setIdentity();
      break;
  }
  return Operator(space, std::move(m));
}

Operator position_quadrature(const ModeSpace& space) {
  const Operator a = ladder(space, Ladder::annihilation);
  return (a + a.adjoint()) * cplx(1.0 / std::sqrt(2.0));
}

Operator momentum_quadrature(const ModeSpace& space) {
  const Operator a = ladder(space, Ladder::annihilation);
  return (a - a.adjoint()) * cplx(0.0, -1.0 / std::sqrt(2.0));
}

Operator parity(const ModeSpace& space) {
  const auto n = static_cast<Eigen::Index>(space.dim());
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) m(k, k) = (k % 2 == 0) ? 1.0 : -1.0;
  return Operator(space, std::move(m));
}

Operator kron(const Operator& a, const Operator& b) {
  std::vector<ModeSpace> modes = a.space().modes();
  modes.insert(modes.end(), b.space().modes().begin(), b.space().modes().end());
  CompositeSpace space(std::move(modes));
  if (space.total_dim() > kSparseCutoff) return Operator(space, kron_sparse(a.sparse(), b.sparse()));
  return Operator(space, kron_dense(a.dense(), b.dense()));
}

Operator embed(const Operator& op, const CompositeSpace& target, std::size_t position) {
  if (op.space().mode_count() != 1) throw DimensionError("embed: operator must act on a single mode");
  if (!(target.mode(position) == op.space().mode(0)))
    throw DimensionError("embed: operator dimension does not match target mode");
  SparseMatrix result(1, 1);
  result.insert(0, 0) = 1.0;
  for (std::size_t k = 0; k < target.mode_count(); ++k) {
    SparseMatrix factor;
    if (k == position) {
      factor = op.sparse();
    } else {
      const auto d = static_cast<Eigen::Index>(target.mode(k).dim());
      factor.resize(d, d);
      factor.setIdentity();
    }
    result = kron_sparse(result, factor);
  }
  return Operator(target, std::move(result));
}

std::size_t required_dim(double alpha_abs, double r) {
  const double need = 4.0 * (alpha_abs * alpha_abs + 1.0) * std::exp(2.0 * std::abs(r));
  return static_cast<std::size_t>(std::ceil(need - 1e-9));
}

void check_truncation(std::size_t dim, double alpha_abs, double r) {
  const std::size_t need = required_dim(alpha_abs, r);
  if (dim < need) {
    std::ostringstream os;
    os << "truncation guard: dim " << dim << " < " << need << " required for |alpha| = " << alpha_abs
       << ", r = " << r;
    throw TruncationError(os.str());
  }
}

Operator displacement(const ModeSpace& space, cplx eta) {
  check_truncation(space.dim(), std::abs(eta), 0.0);
  if (eta == cplx(0.0)) return Operator::identity(space);
  const Matrix a = ladder(space, Ladder::annihilation).dense();
  const Matrix gen = eta * a.adjoint() - std::conj(eta) * a;
  return Operator(space, expm_antihermitian(gen));
}

Operator squeeze(const ModeSpace& space, cplx zeta) {
  check_truncation(space.dim(), 0.0, std::abs(zeta));
  if (zeta == cplx(0.0)) return Operator::identity(space);
  const Matrix a = ladder(space, Ladder::annihilation).dense();
  const Matrix a2 = a * a;
  const Matrix gen = 0.5 * (zeta * a2.adjoint() - std::conj(zeta) * a2);
  return Operator(space, expm_antihermitian(gen));
}

PureState fock_state(const ModeSpace& space, std::size_t n) {
  if (n >= space.dim()) throw DimensionError("fock_state: level outside truncation");
  Vector v = Vector::Zero(static_cast<Eigen::Index>(space.dim()));
  v(static_cast<Eigen::Index>(n)) = 1.0;
  return PureState(space, std::move(v));
}

PureState coherent_state(const ModeSpace& space, cplx alpha) {
  check_truncation(space.dim(), std::abs(alpha), 0.0);
  return PureState(space, coherent_amplitudes(space.dim(), alpha));
}

PureState cat_state(const ModeSpace& space, cplx alpha, CatKind kind) {
  check_truncation(space.dim(), std::abs(alpha), 0.0);
  if (kind == CatKind::odd && alpha == cplx(0.0))
    throw ValidationError("cat_state: odd cat is undefined at alpha = 0");
  Vector c = coherent_amplitudes(space.dim(), alpha);
  const cplx plus(0.5, 0.5), minus(0.5, -0.5);
  for (Eigen::Index n = 0; n < c.size(); ++n) {
    const bool even = n % 2 == 0;
    switch (kind) {
      case CatKind::even:
        if (!even) c(n) = 0.0;
        break;
      case CatKind::odd:
        if (even) c(n) = 0.0;
        break;
      case CatKind::yurke_stoler:
        c(n) *= even ? plus + minus : plus - minus;
        break;
    }
  }
  return PureState(space, std::move(c));
}

PureState squeezed_cat(const ModeSpace& space, cplx alpha, double r, CatKind kind) {
  check_truncation(space.dim(), std::abs(alpha), r);
  const PureState cat = cat_state(space, alpha, kind);
  if (r == 0.0) return cat;
  return PureState(space, squeeze(space, r).adjoint().apply(cat.amplitudes()));
}

PureState tensor(const PureState& a, const PureState& b) {
  std::vector<ModeSpace> modes = a.space().modes();
  modes.insert(modes.end(), b.space().modes().begin(), b.space().modes().end());
  Vector v(a.amplitudes().size() * b.amplitudes().size());
  for (Eigen::Index i = 0; i < a.amplitudes().size(); ++i)
    v.segment(i * b.amplitudes().size(), b.amplitudes().size()) = a.amplitudes()(i) * b.amplitudes();
  return PureState(CompositeSpace(std::move(modes)), std::move(v));
}

DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  std::vector<ModeSpace> modes = a.space().modes();
  modes.insert(modes.end(), b.space().modes().begin(), b.space().modes().end());
  return DensityMatrix(CompositeSpace(std::move(modes)), kron_dense(a.matrix(), b.matrix()),
                       DensityMatrix::kCheckpointTraceTol);
}

// ---------------------------------------------------------------- measures

cplx expectation(const Operator& op, const PureState& state) {
  if (!(op.space() == state.space())) throw DimensionError("expectation: space mismatch");
  return state.amplitudes().dot(op.apply(state.amplitudes()));
}

cplx expectation(const Operator& op, const DensityMatrix& rho) {
  if (!(op.space() == rho.space())) throw DimensionError("expectation: space mismatch");
  if (op.is_sparse()) return (op.sparse() * rho.matrix()).trace();
  return (op.dense().cwiseProduct(rho.matrix().transpose())).sum();
}

double variance(const Operator& op, const PureState& state) {
  const Vector v = op.apply(state.amplitudes());
  const double second = v.squaredNorm();
  const cplx first = state.amplitudes().dot(v);
  return second - std::norm(first);
}

double variance(const Operator& op, const DensityMatrix& rho) {
  const cplx first = expectation(op, rho);
  const cplx second = expectation(op * op, rho);
  return second.real() - std::norm(first);
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (!(rho.space() == sigma.space())) throw DimensionError("fidelity: space mismatch");
  Eigen::SelfAdjointEigenSolver<Matrix> es(rho.matrix());
  const Eigen::VectorXd roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Matrix sqrt_rho = es.eigenvectors() * roots.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
  const Matrix inner = hermitize(sqrt_rho * sigma.matrix() * sqrt_rho);
  Eigen::SelfAdjointEigenSolver<Matrix> es2(inner, Eigen::EigenvaluesOnly);
  const double f = es2.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return std::clamp(f, 0.0, 1.0);
}

double fidelity(const DensityMatrix& rho, const PureState& target) {
  if (!(rho.space() == target.space())) throw DimensionError("fidelity: space mismatch");
  const Vector& psi = target.amplitudes();
  const double overlap = psi.dot(rho.matrix() * psi).real();
  return std::sqrt(std::clamp(overlap, 0.0, 1.0));
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (!(rho.space() == sigma.space())) throw DimensionError("trace_distance: space mismatch");
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(rho.matrix() - sigma.matrix()), Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep) {
  const CompositeSpace& space = rho.space();
  std::vector<std::size_t> kept(keep.begin(), keep.end());
  std::sort(kept.begin(), kept.end());
  if (kept.empty() || std::adjacent_find(kept.begin(), kept.end()) != kept.end() ||
      kept.back() >= space.mode_count())
    throw DimensionError("partial_trace: invalid mode indices");

  std::vector<ModeSpace> kept_modes;
  for (auto k : kept) kept_modes.push_back(space.mode(k));
  CompositeSpace out_space(kept_modes);

  const std::size_t n = space.total_dim();
  std::vector<std::size_t> kept_index(n), traced_index(n);
  std::size_t traced_total = 1;
  for (std::size_t m = 0; m < space.mode_count(); ++m)
    if (!std::binary_search(kept.begin(), kept.end(), m)) traced_total *= space.mode(m).dim();
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t ki = 0, ti = 0;
    for (std::size_t m = 0; m < space.mode_count(); ++m) {
      const std::size_t lvl = space.level(i, m);
      if (std::binary_search(kept.begin(), kept.end(), m))
        ki = ki * space.mode(m).dim() + lvl;
      else
        ti = ti * space.mode(m).dim() + lvl;
    }
    kept_index[i] = ki;
    traced_index[i] = ti;
  }
  std::vector<std::vector<std::size_t>> groups(traced_total);
  for (std::size_t i = 0; i < n; ++i) groups[traced_index[i]].push_back(i);

  const auto out_dim = static_cast<Eigen::Index>(out_space.total_dim());
  Matrix out = Matrix::Zero(out_dim, out_dim);
  const Matrix& m = rho.matrix();
  for (const auto& g : groups)
    for (auto i : g)
      for (auto j : g)
        out(static_cast<Eigen::Index>(kept_index[i]), static_cast<Eigen::Index>(kept_index[j])) +=
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return DensityMatrix(std::move(out_space), hermitize(out), DensityMatrix::kCheckpointTraceTol);
}

DensityMatrix pad(const DensityMatrix& rho, std::size_t new_dim) {
  if (rho.space().mode_count() != 1) throw DimensionError("pad: single-mode density matrix required");
  const auto old_dim = static_cast<Eigen::Index>(rho.dim());
  if (static_cast<Eigen::Index>(new_dim) < old_dim) throw DimensionError("pad: cannot shrink a truncation");
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(new_dim), static_cast<Eigen::Index>(new_dim));
  m.topLeftCorner(old_dim, old_dim) = rho.matrix();
  return DensityMatrix(ModeSpace(new_dim), std::move(m), DensityMatrix::kCheckpointTraceTol);
}

DensityMatrix conjugate(const Operator& unitary, const DensityMatrix& rho) {
  if (!(unitary.space() == rho.space())) throw DimensionError("conjugate: space mismatch");
  const Matrix u = unitary.dense();
  return DensityMatrix(rho.space(), hermitize(u * rho.matrix() * u.adjoint()), DensityMatrix::kCheckpointTraceTol);
}

}  // namespace sqcat
