#include "sqcat/metrology.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/QR>

namespace sqcat {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Overflow-safe products for x >= 0 (x > 0 where a csch appears).
double sech_sinh(double x, double y) { return (std::exp(y - x) - std::exp(-y - x)) / (1.0 + std::exp(-2.0 * x)); }
double csch_cosh(double x, double y) { return (std::exp(y - x) + std::exp(-y - x)) / -std::expm1(-2.0 * x); }
double sech_sq(double x) {
  const double e = std::exp(-2.0 * x);
  return 4.0 * e / ((1.0 + e) * (1.0 + e));
}
double x_csch(double x) { return x < 1.0 ? (x == 0.0 ? 1.0 : x / std::sinh(x)) : 2.0 * x * std::exp(-x) / -std::expm1(-2.0 * x); }

struct Moments {
  double F;
  double N;
};

Moments closed_form(FamilyKind kind, double alpha, double r) {
  const double x = alpha * alpha;
  const double sr = std::sinh(r);
  const double s2 = std::sinh(2.0 * r);
  const double c2 = std::cosh(2.0 * r);
  switch (kind) {
    case FamilyKind::ECS: {
      const double n = 2.0 * x * std::tanh(x);
      return {2.0 * x * x * sech_sq(x) + n, n};
    }
    case FamilyKind::OCS: {
      const double n = 2.0 * x / std::tanh(x);
      const double xc = x_csch(x);
      return {-2.0 * xc * xc + n, n};
    }
    case FamilyKind::YSCS:
      return {2.0 * x, 2.0 * x};
    case FamilyKind::SECS:
      return {s2 * s2 - 2.0 * x * sech_sinh(x, 4.0 * r - x) + 2.0 * x * x * c2 * c2 * sech_sq(x),
              2.0 * (sr * sr - x * sech_sinh(x, 2.0 * r - x))};
    case FamilyKind::SOCS: {
      const double xc = x_csch(x);
      return {s2 * s2 + 2.0 * x * csch_cosh(x, 4.0 * r - x) - 2.0 * c2 * c2 * xc * xc,
              2.0 * (sr * sr + x * csch_cosh(x, 2.0 * r - x))};
    }
    case FamilyKind::SYSCS:
      return {s2 * s2 + 2.0 * std::exp(-4.0 * r) * x, 2.0 * (sr * sr + x * std::exp(-2.0 * r))};
  }
  return {0.0, 0.0};
}

bool odd_kind(FamilyKind kind) { return kind == FamilyKind::OCS || kind == FamilyKind::SOCS; }

}  // namespace

// ---------------------------------------------------------------- families

bool is_squeezed(FamilyKind kind) {
  return kind == FamilyKind::SECS || kind == FamilyKind::SOCS || kind == FamilyKind::SYSCS;
}

CatKind cat_kind(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::ECS:
    case FamilyKind::SECS:
      return CatKind::even;
    case FamilyKind::OCS:
    case FamilyKind::SOCS:
      return CatKind::odd;
    default:
      return CatKind::yurke_stoler;
  }
}

std::string to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::ECS: return "ECS";
    case FamilyKind::OCS: return "OCS";
    case FamilyKind::YSCS: return "YSCS";
    case FamilyKind::SECS: return "SECS";
    case FamilyKind::SOCS: return "SOCS";
    case FamilyKind::SYSCS: return "SYSCS";
  }
  return "?";
}

FamilyKind parse_family(const std::string& name) {
  std::string up(name);
  std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return std::toupper(c); });
  for (auto k : {FamilyKind::ECS, FamilyKind::OCS, FamilyKind::YSCS, FamilyKind::SECS, FamilyKind::SOCS,
                 FamilyKind::SYSCS})
    if (to_string(k) == up) return k;
  throw ValidationError("unknown state family '" + name + "'");
}

void StateFamily::validate() const {
  if (!std::isfinite(alpha) || !std::isfinite(r)) throw ValidationError("StateFamily: non-finite parameter");
  if (alpha < 0.0) throw ValidationError("StateFamily: alpha must be >= 0");
  if (r < 0.0) throw ValidationError("StateFamily: r must be >= 0");
  if (!is_squeezed(kind) && r != 0.0) throw ValidationError("StateFamily: " + to_string(kind) + " requires r = 0");
  if (odd_kind(kind) && !(alpha > 0.0)) throw ValidationError("StateFamily: " + to_string(kind) + " requires alpha > 0");
}

QfiResult QfiResult::from_moments(std::optional<StateFamily> family, double F, double N) {
  QfiResult q;
  q.family = family;
  q.F = F;
  q.N = N;
  q.Q = N == 0.0 ? 0.0 : F / N - 1.0;
  q.J_corr = 0.0;
  return q;
}

QfiResult qfi_analytic(const StateFamily& family) {
  family.validate();
  const Moments m = closed_form(family.kind, family.alpha, family.r);
  return QfiResult::from_moments(family, m.F, m.N);
}

QfiResult qfi_numeric(const StateFamily& family, std::size_t dim) {
  family.validate();
  const ModeSpace mode(dim);
  const PureState psi = squeezed_cat(mode, family.alpha, family.r, cat_kind(family.kind));
  const Operator n = ladder(mode, Ladder::number);
  return QfiResult::from_moments(family, 2.0 * variance(n, psi), 2.0 * expectation(n, psi).real());
}

double mandel_q(const StateFamily& family) { return qfi_analytic(family).Q; }

double mandel_q(const PureState& state) {
  if (state.space().mode_count() != 1) throw DimensionError("mandel_q: expects a single-mode state");
  const Operator n = ladder(state.space().mode(0), Ladder::number);
  const double mean = expectation(n, state).real();
  if (mean == 0.0) return 0.0;
  return (variance(n, state) - mean) / mean;
}

// ---------------------------------------------------------------- optimization

namespace {

double bisect(const auto& f, double lo, double hi, double flo) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Every alpha with N(r, alpha) = N_target, found by scan + bisection.
std::vector<double> alpha_roots(FamilyKind kind, double r, double n_target) {
  const double lo = odd_kind(kind) ? 1e-6 : 0.0;
  const double hi = std::sqrt(0.5 * n_target) * std::exp(r) + 4.0;
  auto g = [&](double a) { return closed_form(kind, a, r).N - n_target; };
  constexpr int kScan = 400;
  std::vector<double> roots;
  double a_prev = lo, g_prev = g(lo);
  if (g_prev == 0.0) roots.push_back(lo);
  for (int k = 1; k <= kScan; ++k) {
    const double s = double(k) / kScan;
    const double a = lo + (hi - lo) * s * s;
    const double ga = g(a);
    if (ga == 0.0) {
      roots.push_back(a);
    } else if (g_prev != 0.0 && (ga < 0.0) != (g_prev < 0.0)) {
      roots.push_back(bisect(g, a_prev, a, g_prev));
    }
    a_prev = a;
    g_prev = ga;
  }
  return roots;
}

struct Branch {
  double F = kNegInf;
  double alpha = 0.0;
};

Branch best_on_constraint(FamilyKind kind, double r, double n_target) {
  Branch best;
  for (double a : alpha_roots(kind, r, n_target)) {
    const double F = closed_form(kind, a, r).F;
    if (F > best.F) best = {F, a};
  }
  return best;
}

double golden_max(const auto& f, double a, double b) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > 1e-12 * std::max(1.0, std::abs(a) + std::abs(b))) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? c : d;
}

void infeasible(FamilyKind kind, double n_target) {
  std::ostringstream os;
  os << "optimize_qfi: N = " << n_target << " is infeasible for " << to_string(kind);
  throw ValidationError(os.str());
}

}  // namespace

Optimum optimize_qfi(FamilyKind kind, double n_target) {
  if (!(n_target > 0.0) || !std::isfinite(n_target)) infeasible(kind, n_target);
  if (odd_kind(kind) && n_target < 2.0) infeasible(kind, n_target);

  Optimum opt;
  opt.kind = kind;
  opt.N_target = n_target;
  if (!is_squeezed(kind)) {
    const auto roots = alpha_roots(kind, 0.0, n_target);
    if (roots.empty()) infeasible(kind, n_target);
    opt.alpha = roots.front();
  } else {
    const double r_hi = 0.5 * std::log(20.0 * n_target + 1.0) + 0.5;
    constexpr int kCoarse = 400;
    std::vector<double> rs(kCoarse + 1), fs(kCoarse + 1);
    int best = -1;
    for (int k = 0; k <= kCoarse; ++k) {
      rs[k] = r_hi * double(k) / kCoarse;
      fs[k] = best_on_constraint(kind, rs[k], n_target).F;
      if (fs[k] > kNegInf && (best < 0 || fs[k] > fs[best])) best = k;
    }
    if (best < 0) infeasible(kind, n_target);
    const double lo = rs[std::max(0, best - 1)], hi = rs[std::min(kCoarse, best + 1)];
    auto phi = [&](double r) { return best_on_constraint(kind, r, n_target).F; };
    double r_star = golden_max(phi, lo, hi);
    if (!(phi(r_star) >= fs[best])) r_star = rs[best];
    opt.r = r_star;
    opt.alpha = best_on_constraint(kind, r_star, n_target).alpha;
  }
  const Moments m = closed_form(kind, opt.alpha, opt.r);
  opt.F = m.F;
  opt.N = m.N;
  if (std::abs(opt.N - n_target) > 1e-8 * std::max(1.0, n_target))
    throw ContractError("optimize_qfi: constraint not met to 1e-8");
  return opt;
}

std::vector<std::string> scaling_basis(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::SECS:
    case FamilyKind::SYSCS:
      return {"N", "N^2"};
    case FamilyKind::SOCS:
      return {"1", "sqrt(N)", "N", "N^2"};
    default:
      return {"1", "N"};
  }
}

std::vector<double> default_fit_samples() {
  std::vector<double> n;
  for (int k = 4; k <= 100; k += 2) n.push_back(double(k));
  return n;
}

ScalingFit fit_scaling(FamilyKind kind, const std::vector<double>& N_samples) {
  ScalingFit fit;
  fit.kind = kind;
  fit.basis = scaling_basis(kind);
  const auto rows = static_cast<Eigen::Index>(N_samples.size());
  const auto cols = static_cast<Eigen::Index>(fit.basis.size());
  if (rows < cols) throw ValidationError("fit_scaling: fewer samples than basis functions");
  Eigen::MatrixXd A(rows, cols);
  Eigen::VectorXd y(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Optimum o = optimize_qfi(kind, N_samples[static_cast<std::size_t>(i)]);
    fit.samples.push_back(o);
    const double n = o.N_target;
    for (Eigen::Index j = 0; j < cols; ++j) {
      const std::string& b = fit.basis[static_cast<std::size_t>(j)];
      A(i, j) = b == "1" ? 1.0 : b == "sqrt(N)" ? std::sqrt(n) : b == "N" ? n : n * n;
    }
    y(i) = o.F;
  }
  const Eigen::VectorXd c = A.colPivHouseholderQr().solve(y);
  fit.coefficients.assign(c.data(), c.data() + c.size());
  fit.residual = (A * c - y).norm();
  return fit;
}

// ---------------------------------------------------------------- simulated states

QfiResult qfi_of_simulated_state(const DensityMatrix& rho_a, double r) {
  if (rho_a.space().mode_count() != 1) throw DimensionError("qfi_of_simulated_state: expects a single-mode state");
  // S n S^dag = b^dag b with b = a cosh r - a^dag sinh r; raises by at most 4 levels.
  const std::size_t dim = rho_a.dim() + 6;
  const DensityMatrix rho = pad(rho_a, dim);
  const ModeSpace mode(dim);
  const Matrix a = ladder(mode, Ladder::annihilation).dense();
  const Matrix b = std::cosh(r) * a - std::sinh(r) * a.adjoint();
  const Matrix n = b.adjoint() * b;
  const double mean = (rho.matrix() * n).trace().real();
  const double second = (rho.matrix() * (n * n)).trace().real();
  return QfiResult::from_moments(std::nullopt, 2.0 * (second - mean * mean), 2.0 * mean);
}

}  // namespace sqcat
