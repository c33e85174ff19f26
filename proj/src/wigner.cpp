#include "sqcat/wigner.hpp"

#include <cmath>
#include <numbers>

namespace sqcat {

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k) v[k] = n == 1 ? lo : lo + (hi - lo) * double(k) / double(n - 1);
  return v;
}

WignerGrid empty_grid(const GridSpec& spec) {
  spec.validate();
  WignerGrid g;
  g.q_values = linspace(spec.q_min, spec.q_max, spec.nq);
  g.p_values = linspace(spec.p_min, spec.p_max, spec.np);
  g.values = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(spec.nq), static_cast<Eigen::Index>(spec.np));
  g.q0 = spec.q0;
  g.p0 = spec.p0;
  return g;
}

// W = Tr[rho D(2 beta) Pi] / pi summed along diagonals k = m - n, with the
// normalized elements E_n = sqrt(n!/(n+k)!) x^{k/2} e^{-x/2} L_n^k(x), x = |2 beta|^2.
double wigner_point(const Matrix& rho, double q, double p) {
  const Eigen::Index d = rho.rows();
  const cplx g(std::sqrt(2.0) * q, std::sqrt(2.0) * p);
  const double x = std::norm(g);
  const cplx u = x > 0.0 ? g / std::sqrt(x) : cplx(1.0);
  double total = 0.0;
  cplx uk(1.0);
  for (Eigen::Index k = 0; k < d; ++k) {
    double e0;
    if (k == 0)
      e0 = std::exp(-0.5 * x);
    else if (x == 0.0)
      break;
    else
      e0 = std::exp(0.5 * double(k) * std::log(x) - 0.5 * x - 0.5 * std::lgamma(double(k) + 1.0));
    double prev = 0.0, cur = e0;
    cplx diag = rho(0, k) * cur;
    for (Eigen::Index n = 1; n + k < d; ++n) {
      const double nn = double(n - 1);
      const double next = ((2.0 * nn + 1.0 + double(k) - x) * cur - std::sqrt(nn * (nn + double(k))) * prev) /
                          std::sqrt((nn + 1.0) * (nn + double(k) + 1.0));
      prev = cur;
      cur = next;
      diag += (n % 2 == 0 ? 1.0 : -1.0) * rho(n, n + k) * cur;
    }
    total += k == 0 ? diag.real() : 2.0 * (uk * diag).real();
    uk *= u;
  }
  return total / kPi;
}

void require_single_mode(const CompositeSpace& space) {
  if (space.mode_count() != 1) throw DimensionError("wigner: expects a single-mode state");
}

}  // namespace

GridSpec GridSpec::square(double half_width, std::size_t n) {
  return {-half_width, half_width, -half_width, half_width, n, n, 0.0, 0.0};
}

GridSpec GridSpec::covering(cplx alpha, double r, std::size_t n) {
  const double q0 = std::sqrt(2.0) * alpha.real();
  const double p0 = std::sqrt(2.0) * alpha.imag();
  const double hq = std::abs(q0) * std::exp(-r) + 5.0;
  const double hp = (std::abs(p0) + 5.0) * std::exp(r);
  return {-hq, hq, -hp, hp, n, n, q0, p0};
}

void GridSpec::validate() const {
  if (nq < 2 || np < 2) throw ValidationError("GridSpec: at least two points per axis");
  if (!(q_max > q_min) || !(p_max > p_min)) throw ValidationError("GridSpec: empty range");
}

double WignerGrid::dq() const { return (q_values.back() - q_values.front()) / double(q_values.size() - 1); }
double WignerGrid::dp() const { return (p_values.back() - p_values.front()) / double(p_values.size() - 1); }

double WignerGrid::normalization() const { return values.sum() * dq() * dp(); }

std::vector<double> WignerGrid::marginal_q() const {
  std::vector<double> out(q_values.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = values.row(static_cast<Eigen::Index>(i)).sum() * dp();
  return out;
}

WignerGrid wigner_numeric(const DensityMatrix& rho, const GridSpec& spec) {
  require_single_mode(rho.space());
  WignerGrid g = empty_grid(spec);
  const Matrix& m = rho.matrix();
  for (std::size_t i = 0; i < spec.nq; ++i)
    for (std::size_t j = 0; j < spec.np; ++j)
      g.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          wigner_point(m, g.q_values[i], g.p_values[j]);
  return g;
}

WignerGrid wigner_numeric(const PureState& psi, const GridSpec& spec) {
  return wigner_numeric(DensityMatrix::from_pure(psi), spec);
}

double wigner_at(const DensityMatrix& rho, double q, double p, std::size_t work_dim) {
  require_single_mode(rho.space());
  const cplx beta(q / std::sqrt(2.0), p / std::sqrt(2.0));
  if (work_dim == 0) work_dim = rho.dim() + required_dim(std::abs(beta), 0.0) + 40;
  const DensityMatrix padded = pad(rho, work_dim);
  const ModeSpace mode(work_dim);
  const Matrix d = displacement(mode, beta).dense();
  const Matrix par = parity(mode).dense();
  const cplx value = (padded.matrix() * d * par * d.adjoint()).trace() / kPi;
  if (std::abs(value.imag()) > 1e-10) throw ContractError("wigner_at: non-real Wigner value");
  return value.real();
}

WignerGrid wigner_analytic_secs(cplx alpha, double r, const GridSpec& spec) {
  WignerGrid g = empty_grid(spec);
  const double q0 = std::sqrt(2.0) * alpha.real();
  const double p0 = std::sqrt(2.0) * alpha.imag();
  g.q0 = q0;
  g.p0 = p0;
  const double er = std::exp(r), emr = std::exp(-r);
  const double norm = 1.0 + std::exp(-p0 * p0 - q0 * q0);
  for (std::size_t i = 0; i < spec.nq; ++i) {
    const double q = g.q_values[i];
    for (std::size_t j = 0; j < spec.np; ++j) {
      const double p = g.p_values[j];
      const double w1 = std::exp(-std::pow(emr * p - p0, 2) - std::pow(er * q - q0, 2)) / (2.0 * kPi * norm);
      const double w2 = std::exp(-std::pow(emr * p + p0, 2) - std::pow(er * q + q0, 2)) / (2.0 * kPi * norm);
      const double win = std::exp(-emr * emr * p * p - er * er * q * q) / (kPi * norm) *
                         std::cos(2.0 * (emr * p * q0 - er * p0 * q));
      g.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = w1 + w2 + win;
    }
  }
  return g;
}

double negativity_volume(const WignerGrid& grid) {
  return (-grid.values.array()).max(0.0).sum() * grid.dq() * grid.dp();
}

}  // namespace sqcat
