#include "sqcat/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#if defined(__SSE__)
#include <xmmintrin.h>
#endif

namespace sqcat {

namespace {

constexpr cplx kI{0.0, 1.0};

double spectral_norm(const SparseMatrix& op) {
  if (op.rows() <= 512) {
    const Matrix d(op);
    Eigen::SelfAdjointEigenSolver<Matrix> es(d.adjoint() * d, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
  }
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(op.rows()), cols = Eigen::VectorXd::Zero(op.cols());
  for (Eigen::Index i = 0; i < op.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(op, i); it; ++it) {
      rows(it.row()) += std::abs(it.value());
      cols(it.col()) += std::abs(it.value());
    }
  return std::sqrt(rows.maxCoeff() * cols.maxCoeff());
}

double hermitian_spectral_radius(const Operator& h) {
  if (h.dim() <= 512) {
    const Matrix d = h.dense();
    Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (d + d.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  return spectral_norm(h.sparse());
}

/// coefficient * left * rho * right
struct JumpTerm {
  cplx coefficient;
  SparseMatrix left;
  SparseMatrix right;
  SparseMatrix left_adjoint;
};

/// Model flattened into rhs(rho) = K(t) rho + rho K(t)^dag + sum_j c_j L_j rho R_j with
/// K(t) = K0 - i sum_w exp(-i w t) H_w stored on one shared sparsity pattern.
class CompiledModel {
 public:
  explicit CompiledModel(const LindbladModel& model) : dim_(static_cast<Eigen::Index>(model.space().total_dim())) {
    SparseMatrix k0(dim_, dim_);
    std::map<double, SparseMatrix> groups;
    for (const auto& term : model.terms()) {
      const SparseMatrix op = term.envelope.amplitude * term.op.sparse();
      if (term.envelope.frequency == 0.0) {
        k0 += -kI * op;
      } else {
        auto [it, inserted] = groups.try_emplace(term.envelope.frequency, dim_, dim_);
        it->second += op;
      }
    }
    for (const auto& d : model.dissipators()) {
      if (d.rate() == 0.0) continue;
      const SparseMatrix o = d.op().sparse();
      const SparseMatrix od = o.adjoint();
      const double k = d.rate();
      const SparseMatrix odo = od * o;
      if (d.kind() == Dissipator::Kind::standard) {
        jumps_.push_back({cplx(k), o, od, od});
        k0 += cplx(-0.5 * k) * odo;
        continue;
      }
      const double n = d.n_env();
      const cplx m = d.m_env();
      jumps_.push_back({cplx(k * (n + 1.0)), o, od, od});
      k0 += cplx(-0.5 * k * (n + 1.0)) * odo;
      if (n != 0.0) {
        jumps_.push_back({cplx(k * n), od, o, o});
        k0 += cplx(-0.5 * k * n) * SparseMatrix(o * od);
      }
      if (m != cplx(0.0)) {
        const SparseMatrix o2 = o * o;
        const SparseMatrix od2 = od * od;
        jumps_.push_back({-k * m, o, o, od});
        jumps_.push_back({-k * std::conj(m), od, od, o});
        k0 += (0.5 * k * m) * o2 + (0.5 * k * std::conj(m)) * od2;
      }
    }

    // Shared pattern over K0 and every oscillating group.
    std::vector<Eigen::Triplet<cplx>> pattern;
    auto collect = [&](const SparseMatrix& m) {
      for (Eigen::Index i = 0; i < m.outerSize(); ++i)
        for (SparseMatrix::InnerIterator it(m, i); it; ++it) pattern.emplace_back(it.row(), it.col(), cplx(1.0));
    };
    collect(k0);
    for (const auto& [w, g] : groups) collect(g);
    pattern_.resize(dim_, dim_);
    pattern_.setFromTriplets(pattern.begin(), pattern.end(), [](const cplx& a, const cplx&) { return a; });
    pattern_.makeCompressed();
    pattern_adjoint_ = SparseMatrix(pattern_.adjoint());
    pattern_adjoint_.makeCompressed();

    static_values_ = align(pattern_, k0);
    static_adjoint_ = align(pattern_adjoint_, SparseMatrix(k0.adjoint()));
    for (const auto& [w, g] : groups) {
      oscillating_.push_back({w, align(pattern_, g)});
      oscillating_adjoint_.push_back({w, align(pattern_adjoint_, SparseMatrix(g.adjoint()))});
    }
  }

  SparseMatrix effective(double t) const {
    SparseMatrix k = pattern_;
    Eigen::Map<Vector> values(k.valuePtr(), k.nonZeros());
    values = static_values_;
    for (const auto& [w, v] : oscillating_) values += (-kI * std::exp(-kI * (w * t))) * v;
    return k;
  }

  /// K(t)^dag on its own pattern.
  SparseMatrix effective_adjoint(double t) const {
    SparseMatrix k = pattern_adjoint_;
    Eigen::Map<Vector> values(k.valuePtr(), k.nonZeros());
    values = static_adjoint_;
    for (const auto& [w, v] : oscillating_adjoint_) values += (kI * std::exp(kI * (w * t))) * v;
    return k;
  }

  Matrix apply(const Matrix& rho, double t) const {
    const SparseMatrix k = effective(t);
    Matrix out = k * rho;
    out += rho * SparseMatrix(k.adjoint());
    add_jumps(rho, out);
    return out;
  }

  /// Assumes rho is Hermitian. Builds Y = rho K^dag + (1/2) sum_j (L_j rho R_j)^dag from
  /// dense-times-sparse products only and returns Y + Y^dag.
  Matrix apply_hermitian(const Matrix& rho, double t) const {
    Matrix y(rho.rows(), rho.cols()), tmp(rho.rows(), rho.cols()), tmp_adj(rho.rows(), rho.cols());
    y.noalias() = rho * effective_adjoint(t);
    for (const auto& j : jumps_) {
      tmp.noalias() = rho * j.right;
      tmp_adj = tmp.adjoint();
      tmp.noalias() = tmp_adj * j.left_adjoint;
      y += (0.5 * std::conj(j.coefficient)) * tmp;
    }
    return y + y.adjoint();
  }

  SparseMatrix superoperator(double t) const {
    const SparseMatrix k = effective(t);
    SparseMatrix id(dim_, dim_);
    id.setIdentity();
    SparseMatrix l = kron_sparse(id, k) + kron_sparse(SparseMatrix(k.conjugate()), id);
    for (const auto& j : jumps_) l += j.coefficient * kron_sparse(SparseMatrix(j.right.transpose()), j.left);
    return l;
  }

 private:
  static SparseMatrix kron_sparse(const SparseMatrix& a, const SparseMatrix& b) {
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

  static Vector align(const SparseMatrix& pattern, const SparseMatrix& m) {
    Vector v = Vector::Zero(pattern.nonZeros());
    const auto* outer = pattern.outerIndexPtr();
    const auto* inner = pattern.innerIndexPtr();
    for (Eigen::Index i = 0; i < m.outerSize(); ++i)
      for (SparseMatrix::InnerIterator it(m, i); it; ++it) {
        const auto* begin = inner + outer[it.row()];
        const auto* end = inner + outer[it.row() + 1];
        const auto* pos = std::lower_bound(begin, end, static_cast<int>(it.col()));
        v(pos - inner) += it.value();
      }
    return v;
  }

  void add_jumps(const Matrix& rho, Matrix& out) const {
    for (const auto& j : jumps_) {
      const Matrix lr = j.left * rho;
      out.noalias() += j.coefficient * (lr * j.right);
    }
  }

  Eigen::Index dim_;
  SparseMatrix pattern_;
  SparseMatrix pattern_adjoint_;
  Vector static_values_;
  Vector static_adjoint_;
  std::vector<std::pair<double, Vector>> oscillating_;
  std::vector<std::pair<double, Vector>> oscillating_adjoint_;
  std::vector<JumpTerm> jumps_;
};

Matrix hermitize(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

// Subnormal amplitudes appear as populations spread through the truncation and
// slow the products down by an order of magnitude; flush them for the run.
class FlushSubnormals {
 public:
#if defined(__SSE__)
  FlushSubnormals() : saved_(_mm_getcsr()) { _mm_setcsr(saved_ | 0x8040u); }
  ~FlushSubnormals() { _mm_setcsr(saved_); }

 private:
  unsigned int saved_;
#endif
};

}  // namespace

// ---------------------------------------------------------------- model types

cplx Envelope::operator()(double t) const { return amplitude * std::exp(-kI * (frequency * t)); }

Dissipator::Dissipator(Operator op, double rate, Kind kind, double n_env, cplx m_env)
    : op_(std::move(op)), rate_(rate), kind_(kind), n_env_(n_env), m_env_(m_env) {
  if (!(rate >= 0.0)) throw ValidationError("Dissipator: rate must be >= 0");
}

Dissipator Dissipator::standard(Operator op, double rate) {
  return Dissipator(std::move(op), rate, Kind::standard, 0.0, 0.0);
}

Dissipator Dissipator::squeezed(Operator op, double rate, double n_env, cplx m_env) {
  if (!(n_env >= 0.0)) throw ValidationError("Dissipator: reservoir photon number must be >= 0");
  if (std::norm(m_env) > n_env * (n_env + 1.0) + 1e-10)
    throw ValidationError("Dissipator: unphysical reservoir, |M|^2 > N(N+1)");
  return Dissipator(std::move(op), rate, Kind::squeezed, n_env, m_env);
}

LindbladModel::LindbladModel(CompositeSpace space) : space_(std::move(space)) {}

void LindbladModel::require_space(const Operator& op) const {
  if (!(op.space() == space_)) throw DimensionError("LindbladModel: operator lives on a different space");
}

void LindbladModel::add_term(Operator op, Envelope envelope) {
  require_space(op);
  terms_.push_back({std::move(op), envelope});
}

void LindbladModel::add_hermitian_pair(const Operator& op, Envelope envelope) {
  add_term(op, envelope);
  add_term(op.adjoint(), envelope.conjugate());
}

void LindbladModel::add_dissipator(Dissipator d) {
  require_space(d.op());
  dissipators_.push_back(std::move(d));
}

Operator LindbladModel::hamiltonian(double t) const {
  Operator h = Operator::zero(space_);
  for (const auto& term : terms_) h = h + term.op * term.envelope(t);
  return h;
}

bool LindbladModel::time_independent() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const auto& term) { return term.envelope.frequency == 0.0; });
}

double LindbladModel::max_frequency() const {
  double w = 0.0;
  for (const auto& term : terms_) w = std::max(w, std::abs(term.envelope.frequency));
  return w;
}

void LindbladModel::check_hermitian(const std::vector<double>& sample_times) const {
  for (double t : sample_times) {
    const SparseMatrix h = hamiltonian(t).sparse();
    const SparseMatrix diff = h - SparseMatrix(h.adjoint());
    double dev = 0.0;
    for (Eigen::Index i = 0; i < diff.outerSize(); ++i)
      for (SparseMatrix::InnerIterator it(diff, i); it; ++it) dev = std::max(dev, std::abs(it.value()));
    if (dev > 1e-10) {
      std::ostringstream os;
      os << "LindbladModel: H(t) not Hermitian at t = " << t << " (deviation " << dev << ")";
      throw ValidationError(os.str());
    }
  }
}

// ---------------------------------------------------------------- generator

Matrix rhs(const LindbladModel& model, const Matrix& rho, double t) {
  const auto n = static_cast<Eigen::Index>(model.space().total_dim());
  if (rho.rows() != n || rho.cols() != n) throw DimensionError("rhs: state does not match model space");
  return CompiledModel(model).apply(rho, t);
}

Matrix rhs(const LindbladModel& model, const DensityMatrix& rho, double t) {
  if (!(rho.space() == model.space())) throw DimensionError("rhs: state does not match model space");
  return CompiledModel(model).apply(rho.matrix(), t);
}

Matrix liouvillian(const LindbladModel& model, double t) { return Matrix(CompiledModel(model).superoperator(t)); }

double residual(const LindbladModel& model, const DensityMatrix& rho, double t) {
  return rhs(model, rho, t).cwiseAbs().maxCoeff();
}

double characteristic_frequency(const LindbladModel& model) {
  double w = model.max_frequency() + hermitian_spectral_radius(model.hamiltonian(0.0));
  for (const auto& d : model.dissipators()) {
    if (d.rate() == 0.0) continue;
    const double norm = spectral_norm(d.op().sparse());
    const double weight =
        d.kind() == Dissipator::Kind::standard ? 1.0 : 2.0 * d.n_env() + 1.0 + 2.0 * std::abs(d.m_env());
    w += d.rate() * weight * norm * norm;
  }
  return w;
}

double max_step(const LindbladModel& model) {
  const double w = characteristic_frequency(model);
  if (w == 0.0) return std::numeric_limits<double>::infinity();
  return (2.0 * std::numbers::pi / w) / 20.0;
}

// ---------------------------------------------------------------- evolution

const std::vector<cplx>& Trajectory::operator[](const std::string& name) const {
  const auto it = series.find(name);
  if (it == series.end()) throw std::out_of_range("Trajectory: no series named " + name);
  return it->second;
}

std::vector<double> Trajectory::real(const std::string& name) const {
  const auto& s = (*this)[name];
  std::vector<double> out(s.size());
  std::transform(s.begin(), s.end(), out.begin(), [](cplx z) { return z.real(); });
  return out;
}

std::vector<double> uniform_times(double t_final, std::size_t count) {
  std::vector<double> t(count);
  for (std::size_t k = 0; k < count; ++k) t[k] = count == 1 ? t_final : t_final * double(k) / double(count - 1);
  return t;
}

namespace {

std::set<std::size_t> snap(const std::vector<double>& times, double h, std::size_t steps) {
  std::set<std::size_t> idx;
  for (double t : times) {
    const double k = std::round(t / h);
    idx.insert(static_cast<std::size_t>(std::clamp(k, 0.0, double(steps))));
  }
  return idx;
}

cplx sparse_expectation(const SparseMatrix& op, const Matrix& rho) {
  cplx acc = 0.0;
  for (Eigen::Index i = 0; i < op.outerSize(); ++i)
    for (SparseMatrix::InnerIterator it(op, i); it; ++it) acc += it.value() * rho(it.col(), it.row());
  return acc;
}

}  // namespace

Trajectory evolve(const LindbladModel& model, const DensityMatrix& rho0, const EvolveOptions& options) {
  if (!(rho0.space() == model.space())) throw DimensionError("evolve: initial state does not match model space");
  if (!(options.t_final > 0.0) || !(options.dt > 0.0)) throw ContractError("evolve: t_final and dt must be positive");
  model.check_hermitian({0.0, options.t_final});

  const double dt_max = max_step(model);
  if (options.dt > dt_max * (1.0 + 1e-12)) {
    std::ostringstream os;
    os.precision(6);
    os << "evolve: dt = " << options.dt << " violates the step contract; required dt <= " << dt_max;
    throw ContractError(os.str());
  }
  const auto steps = static_cast<std::size_t>(std::ceil(options.t_final / options.dt - 1e-9));
  const double h = options.t_final / double(steps);

  std::set<std::size_t> sample_idx;
  if (options.sample_times.empty()) {
    for (std::size_t k = 0; k <= steps; ++k) sample_idx.insert(k);
  } else {
    sample_idx = snap(options.sample_times, h, steps);
  }
  const std::set<std::size_t> snapshot_idx = snap(options.snapshot_times, h, steps);

  std::vector<std::pair<std::string, SparseMatrix>> observers;
  for (const auto& o : options.observables) {
    if (!(o.op.space() == model.space())) throw DimensionError("evolve: observable " + o.name + " space mismatch");
    observers.emplace_back(o.name, o.op.sparse());
  }

  const CompiledModel compiled(model);
  const FlushSubnormals flush;
  Trajectory traj;
  traj.dt = h;
  for (const auto& [name, op] : observers) traj.series[name];
  traj.series["trace"];
  traj.series["purity"];

  Matrix rho = rho0.matrix();
  for (std::size_t k = 0;; ++k) {
    const double t = double(k) * h;
    if (sample_idx.count(k)) {
      traj.times.push_back(t);
      for (const auto& [name, op] : observers) traj.series[name].push_back(sparse_expectation(op, rho));
      traj.series["trace"].emplace_back(rho.trace().real());
      traj.series["purity"].emplace_back(rho.cwiseAbs2().sum());
    }
    if (snapshot_idx.count(k)) {
      const double tr = rho.trace().real();
      if (std::abs(tr - 1.0) > DensityMatrix::kCheckpointTraceTol) {
        std::ostringstream os;
        os << "evolve: trace drifted to " << tr << " at t = " << t;
        throw ContractError(os.str());
      }
      traj.snapshots.push_back({t, DensityMatrix(model.space(), hermitize(rho), DensityMatrix::kCheckpointTraceTol)});
    }
    if (k == steps) break;

    const Matrix k1 = compiled.apply_hermitian(rho, t);
    const Matrix k2 = compiled.apply_hermitian(rho + (0.5 * h) * k1, t + 0.5 * h);
    const Matrix k3 = compiled.apply_hermitian(rho + (0.5 * h) * k2, t + 0.5 * h);
    const Matrix k4 = compiled.apply_hermitian(rho + h * k3, t + h);
    rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  const double tr = rho.trace().real();
  if (std::abs(tr - 1.0) > DensityMatrix::kCheckpointTraceTol) {
    std::ostringstream os;
    os << "evolve: trace drifted to " << tr << " at t = " << options.t_final;
    throw ContractError(os.str());
  }
  traj.final_state.emplace(model.space(), hermitize(rho), DensityMatrix::kCheckpointTraceTol);
  return traj;
}

// ---------------------------------------------------------------- steady state

ParityHint ParityHint::from_state(const DensityMatrix& rho, std::size_t mode) {
  const CompositeSpace& space = rho.space();
  double even = 0.0;
  for (std::size_t i = 0; i < space.total_dim(); ++i)
    if (space.level(i, mode) % 2 == 0) even += rho.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
  return {mode, std::clamp(even / rho.trace(), 0.0, 1.0)};
}

namespace {

/// Basis indices whose occupation of `mode` has the given parity.
std::vector<Eigen::Index> sector_indices(const CompositeSpace& space, std::size_t mode, int parity) {
  std::vector<Eigen::Index> idx;
  for (std::size_t i = 0; i < space.total_dim(); ++i)
    if (int(space.level(i, mode) % 2) == parity) idx.push_back(static_cast<Eigen::Index>(i));
  return idx;
}

DensityMatrix dense_null_space(const LindbladModel& model, const SparseMatrix& super,
                               const std::vector<Eigen::Index>& sector, bool hinted) {
  const auto n = static_cast<Eigen::Index>(model.space().total_dim());
  const auto s = static_cast<Eigen::Index>(sector.size());
  std::vector<Eigen::Index> pos(static_cast<std::size_t>(n), -1);
  for (Eigen::Index k = 0; k < s; ++k) pos[static_cast<std::size_t>(sector[static_cast<std::size_t>(k)])] = k;

  // Column-stacked indices restricted to sector x sector.
  Matrix block = Matrix::Zero(s * s, s * s);
  double leak = 0.0;
  const SparseMatrix by_col = super;  // row-major; walk rows and test membership
  for (Eigen::Index row = 0; row < by_col.outerSize(); ++row) {
    const Eigen::Index ri = row % n, rj = row / n;
    const Eigen::Index pi = pos[static_cast<std::size_t>(ri)], pj = pos[static_cast<std::size_t>(rj)];
    for (SparseMatrix::InnerIterator it(by_col, row); it; ++it) {
      const Eigen::Index ci = it.col() % n, cj = it.col() / n;
      const Eigen::Index qi = pos[static_cast<std::size_t>(ci)], qj = pos[static_cast<std::size_t>(cj)];
      if (qi < 0 || qj < 0) continue;
      if (pi < 0 || pj < 0) {
        leak = std::max(leak, std::abs(it.value()));
        continue;
      }
      block(pj * s + pi, qj * s + qi) += it.value();
    }
  }
  if (leak > 1e-12) {
    std::ostringstream os;
    os << "steady_state: parity hint inconsistent, the generator couples sectors (" << leak << ")";
    throw ContractError(os.str());
  }

  Eigen::BDCSVD<Matrix> svd(block, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double scale = std::max(sv(0), 1e-300);
  std::size_t multiplicity = 0;
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv(k) <= 1e-9 * scale) ++multiplicity;
  if (multiplicity > 1) {
    std::ostringstream os;
    os << "steady_state: null space has multiplicity " << multiplicity
       << (hinted ? " inside the hinted sector" : "; supply a parity hint");
    throw MultiplicityError(os.str(), multiplicity);
  }
  const Vector v = svd.matrixV().col(s * s - 1);
  Matrix rho = Matrix::Zero(n, n);
  for (Eigen::Index qj = 0; qj < s; ++qj)
    for (Eigen::Index qi = 0; qi < s; ++qi)
      rho(sector[static_cast<std::size_t>(qi)], sector[static_cast<std::size_t>(qj)]) = v(qj * s + qi);
  return DensityMatrix::normalized(model.space(), rho);
}

DensityMatrix evolve_to_rest(const LindbladModel& model, const DensityMatrix& start, const SteadyStateOptions& options) {
  const double dt = max_step(model);
  DensityMatrix rho = start;
  double elapsed = 0.0;
  while (elapsed < options.fallback_max_time) {
    EvolveOptions eo;
    eo.t_final = options.fallback_chunk;
    eo.dt = dt;
    eo.sample_times = {0.0};
    rho = *evolve(model, rho, eo).final_state;
    elapsed += options.fallback_chunk;
    if (residual(model, rho) <= options.residual_tol) return DensityMatrix::normalized(model.space(), rho.matrix());
  }
  throw ContractError("steady_state: long-time evolution did not reach the residual target");
}

DensityMatrix sector_steady_state(const LindbladModel& model, const std::optional<SparseMatrix>& super,
                                  std::size_t mode, int parity, const SteadyStateOptions& options) {
  const CompositeSpace& space = model.space();
  const auto sector = sector_indices(space, mode, parity);
  if (sector.size() <= options.dense_limit) return dense_null_space(model, *super, sector, true);
  Vector start = Vector::Zero(static_cast<Eigen::Index>(space.total_dim()));
  for (std::size_t i = 0; i < space.total_dim(); ++i) {
    bool match = true;
    for (std::size_t m = 0; m < space.mode_count(); ++m)
      match = match && space.level(i, m) == (m == mode ? std::size_t(parity) : 0);
    if (match) start(static_cast<Eigen::Index>(i)) = 1.0;
  }
  return evolve_to_rest(model, DensityMatrix::from_pure(PureState(space, start)), options);
}

}  // namespace

DensityMatrix steady_state(const LindbladModel& model, std::optional<ParityHint> hint, const SteadyStateOptions& options) {
  if (!model.time_independent()) throw ContractError("steady_state: model has time-dependent envelopes");
  model.check_hermitian({0.0});
  const CompositeSpace& space = model.space();
  const std::size_t n = space.total_dim();

  std::optional<SparseMatrix> super;
  const bool needs_dense = hint ? n / 2 <= options.dense_limit || n <= 2 * options.dense_limit : n <= options.dense_limit;
  if (needs_dense) super = CompiledModel(model).superoperator(0.0);

  if (!hint) {
    if (n <= options.dense_limit) {
      std::vector<Eigen::Index> all(n);
      for (std::size_t i = 0; i < n; ++i) all[i] = static_cast<Eigen::Index>(i);
      return dense_null_space(model, *super, all, false);
    }
    return evolve_to_rest(model, DensityMatrix::from_pure(PureState(space, Vector::Unit(static_cast<Eigen::Index>(n), 0))),
                          options);
  }

  if (!(hint->even_weight >= 0.0 && hint->even_weight <= 1.0))
    throw ValidationError("steady_state: parity weight must lie in [0, 1]");
  space.mode(hint->mode);
  auto get_super = [&]() -> const std::optional<SparseMatrix>& {
    if (!super) super = CompiledModel(model).superoperator(0.0);
    return super;
  };
  const double w = hint->even_weight;
  if (w == 1.0) return sector_steady_state(model, get_super(), hint->mode, 0, options);
  if (w == 0.0) return sector_steady_state(model, get_super(), hint->mode, 1, options);
  const DensityMatrix even = sector_steady_state(model, get_super(), hint->mode, 0, options);
  const DensityMatrix odd = sector_steady_state(model, get_super(), hint->mode, 1, options);
  return DensityMatrix::normalized(space, w * even.matrix() + (1.0 - w) * odd.matrix());
}

}  // namespace sqcat
