#pragma once

// Wigner quasiprobability on a rectangular (q, p) grid, with q = (a + a^dag)/sqrt(2)
// and p = (a - a^dag)/(i sqrt(2)), normalized so that the integral over dq dp is 1.

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "sqcat/fock.hpp"

namespace sqcat {

struct GridSpec {
  double q_min = -8.0, q_max = 8.0;
  double p_min = -8.0, p_max = 8.0;
  std::size_t nq = 101, np = 101;
  /// Cat-peak coordinates recorded in the emitted grid.
  double q0 = 0.0, p0 = 0.0;

  static GridSpec square(double half_width = 8.0, std::size_t n = 101);
  /// q in +-(|q0| e^{-r} + 5), p in +-(|p0| + 5) e^{r}, peaks from alpha.
  static GridSpec covering(cplx alpha, double r, std::size_t n = 101);
  void validate() const;
};

struct WignerGrid {
  std::vector<double> q_values;
  std::vector<double> p_values;
  /// values(i, j) = W(q_i, p_j).
  Eigen::MatrixXd values;
  double q0 = 0.0, p0 = 0.0;

  double dq() const;
  double dp() const;
  /// Riemann sum of W dq dp.
  double normalization() const;
  /// sum_j W(q_i, p_j) dp.
  std::vector<double> marginal_q() const;
};

/// Exact displaced-parity evaluation W = (1/pi) Tr[rho D(beta) Pi D^dag(beta)],
/// beta = (q + i p)/sqrt(2), as Tr[rho D(2 beta) Pi] via normalized Laguerre recurrences per diagonal.
WignerGrid wigner_numeric(const DensityMatrix& rho, const GridSpec& grid = {});
WignerGrid wigner_numeric(const PureState& psi, const GridSpec& grid = {});

/// Single point by explicit displacement in a padded space; work_dim = 0 picks
/// a size from the truncation guard.
double wigner_at(const DensityMatrix& rho, double q, double p, std::size_t work_dim = 0);

/// Closed form for S^dag(r) applied to the even cat of amplitude alpha.
WignerGrid wigner_analytic_secs(cplx alpha, double r, const GridSpec& grid = {});

/// sum max(0, -W) dq dp.
double negativity_volume(const WignerGrid& grid);

}  // namespace sqcat
