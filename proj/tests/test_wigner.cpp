#include <cmath>
#include <numbers>

#include "doctest.h"
#include "sqcat/wigner.hpp"

using namespace sqcat;

namespace {
constexpr double kPi = std::numbers::pi;

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }
}  // namespace

TEST_CASE("Wigner function of Gaussian and Fock states") {
  const ModeSpace m(30);
  const GridSpec spec{-4.0, 4.0, -3.0, 3.0, 33, 25, 0.0, 0.0};
  const WignerGrid vac = wigner_numeric(fock_state(m, 0), spec);
  const WignerGrid one = wigner_numeric(fock_state(m, 1), spec);
  const cplx alpha(0.8, -0.5);
  const WignerGrid coh = wigner_numeric(coherent_state(m, alpha), spec);
  Eigen::MatrixXd e_vac(33, 25), e_one(33, 25), e_coh(33, 25);
  for (Eigen::Index i = 0; i < 33; ++i)
    for (Eigen::Index j = 0; j < 25; ++j) {
      const double q = vac.q_values[std::size_t(i)], p = vac.p_values[std::size_t(j)];
      const double g = std::exp(-q * q - p * p) / kPi;
      e_vac(i, j) = g;
      e_one(i, j) = (2.0 * (q * q + p * p) - 1.0) * g;
      const double dq = q - std::sqrt(2.0) * alpha.real(), dp = p - std::sqrt(2.0) * alpha.imag();
      e_coh(i, j) = std::exp(-dq * dq - dp * dp) / kPi;
    }
  CHECK(max_abs(vac.values - e_vac) < 1e-12);
  CHECK(max_abs(one.values - e_one) < 1e-12);
  CHECK(max_abs(coh.values - e_coh) < 1e-10);
  CHECK(negativity_volume(vac) == 0.0);
  CHECK(negativity_volume(one) > 0.0);

  const auto marginal = vac.marginal_q();
  for (std::size_t i = 0; i < marginal.size(); i += 4)
    CHECK(std::abs(marginal[i] - std::exp(-vac.q_values[i] * vac.q_values[i]) / std::sqrt(kPi)) < 2e-3);
}

TEST_CASE("Wigner values at the origin") {
  const ModeSpace m(40);
  const GridSpec origin{-1.0, 1.0, -1.0, 1.0, 3, 3, 0.0, 0.0};
  CHECK(std::abs(wigner_numeric(fock_state(m, 0), origin).values(1, 1) - 1.0 / kPi) < 1e-8);
  CHECK(std::abs(wigner_numeric(cat_state(m, 2.0, CatKind::even), origin).values(1, 1) - 1.0 / kPi) < 1e-6);
  Matrix mix = Matrix::Zero(40, 40);
  mix(0, 0) = mix(1, 1) = 0.5;
  CHECK(std::abs(wigner_numeric(DensityMatrix(m, mix), origin).values(1, 1)) < 1e-15);
}

TEST_CASE("recurrence agrees with explicit displaced parity") {
  const ModeSpace m(40);
  const DensityMatrix rho = DensityMatrix::from_pure(cat_state(m, cplx(1.5, 0.5), CatKind::odd));
  const GridSpec spec{-3.0, 3.0, -2.0, 2.0, 5, 4, 0.0, 0.0};
  const WignerGrid w = wigner_numeric(rho, spec);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      CHECK(std::abs(w.values(Eigen::Index(i), Eigen::Index(j)) - wigner_at(rho, w.q_values[i], w.p_values[j])) < 1e-10);
}

TEST_CASE("closed form for squeezed even cats") {
  SUBCASE("zero amplitude is the squeezed vacuum Gaussian") {
    const double r = 0.7;
    const WignerGrid w = wigner_analytic_secs(0.0, r, GridSpec::square(4.0, 21));
    for (std::size_t i = 0; i < 21; i += 5)
      for (std::size_t j = 0; j < 21; j += 5) {
        const double q = w.q_values[i], p = w.p_values[j];
        const double g = std::exp(-std::exp(2 * r) * q * q - std::exp(-2 * r) * p * p) / kPi;
        CHECK(std::abs(w.values(Eigen::Index(i), Eigen::Index(j)) - g) < 1e-14);
      }
  }
  SUBCASE("unsqueezed peaks") {
    const double q0 = 2.0 * std::sqrt(2.0);
    const GridSpec at{-q0, q0, -1.0, 1.0, 3, 3, 0.0, 0.0};
    const WignerGrid w = wigner_analytic_secs(2.0, 0.0, at);
    const double peak = (1.0 + 2.0 * std::exp(-8.0) + std::exp(-32.0)) / (2.0 * kPi * (1.0 + std::exp(-8.0)));
    CHECK(std::abs(w.values(0, 1) - peak) < 1e-6);
    CHECK(std::abs(w.values(2, 1) - peak) < 1e-6);
    CHECK(w.q0 == doctest::Approx(q0));
  }
  SUBCASE("squeezed peaks move to e^-r q0") {
    const double r = 1.1, q_peak = std::exp(-r) * 2.0 * std::sqrt(2.0), h = 0.05;
    const GridSpec line{q_peak - h, q_peak + h, -1e-9, 1e-9, 3, 2, 0.0, 0.0};
    const WignerGrid w = wigner_analytic_secs(2.0, r, line);
    CHECK(w.values(1, 0) > w.values(0, 0));
    CHECK(w.values(1, 0) > w.values(2, 0));
  }
  SUBCASE("numeric lab-frame state matches the closed form") {
    const ModeSpace m(181);
    for (double r : {0.0, 1.1}) {
      const GridSpec spec = GridSpec::covering(2.0, r, 31);
      const WignerGrid num = wigner_numeric(squeezed_cat(m, 2.0, r, CatKind::even), spec);
      const WignerGrid ref = wigner_analytic_secs(2.0, r, spec);
      CHECK(max_abs(num.values - ref.values) < 1e-6);
    }
  }
}

TEST_CASE("grid bookkeeping") {
  const GridSpec c = GridSpec::covering(2.0, 1.1, 11);
  CHECK(c.q0 == doctest::Approx(2.0 * std::sqrt(2.0)));
  CHECK(c.q_max == doctest::Approx(2.0 * std::sqrt(2.0) * std::exp(-1.1) + 5.0));
  CHECK(c.p_max == doctest::Approx(5.0 * std::exp(1.1)));
  const WignerGrid w = wigner_analytic_secs(2.0, 0.0, GridSpec::square(8.0, 101));
  CHECK(std::abs(w.normalization() - 1.0) < 1e-2);
  CHECK(negativity_volume(w) > 0.0);
  CHECK(w.dq() == doctest::Approx(0.16));
  CHECK_THROWS_AS(wigner_analytic_secs(1.0, 0.0, GridSpec{1.0, 0.0, -1.0, 1.0, 5, 5, 0.0, 0.0}), ValidationError);
  CHECK_THROWS_AS(wigner_analytic_secs(1.0, 0.0, GridSpec{-1.0, 1.0, -1.0, 1.0, 1, 5, 0.0, 0.0}), ValidationError);
  const CompositeSpace two({ModeSpace(2), ModeSpace(2)});
  Vector v = Vector::Zero(4);
  v(0) = 1.0;
  CHECK_THROWS_AS(wigner_numeric(PureState(two, v)), DimensionError);
}
