#include <cmath>

#include "doctest.h"
#include "sqcat/fock.hpp"

using namespace sqcat;

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

// Poisson-weighted amplitudes built directly from the series.
Vector coherent_series(std::size_t dim, cplx alpha) {
  Vector v(static_cast<Eigen::Index>(dim));
  for (std::size_t n = 0; n < dim; ++n)
    v(static_cast<Eigen::Index>(n)) = std::exp(-std::norm(alpha) / 2.0) * std::pow(alpha, double(n)) / std::sqrt(factorial(int(n)));
  return v;
}

// Squeezed vacuum with q compressed: c_2n = (-tanh r)^n sqrt((2n)!) / (2^n n!) / sqrt(cosh r).
Vector squeezed_vacuum_series(std::size_t dim, double r) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(dim));
  for (std::size_t n = 0; 2 * n < dim; ++n) {
    const double lg = 0.5 * std::lgamma(2.0 * n + 1.0) - n * std::log(2.0) - std::lgamma(n + 1.0);
    v(static_cast<Eigen::Index>(2 * n)) = std::pow(-std::tanh(r), double(n)) * std::exp(lg) / std::sqrt(std::cosh(r));
  }
  return v;
}

}  // namespace

TEST_CASE("ladder operators act as sqrt(n) shifts") {
  const ModeSpace m(6);
  const Matrix a = ladder(m, Ladder::annihilation).dense();
  const Vector one = fock_state(m, 1).amplitudes();
  const Vector vac = fock_state(m, 0).amplitudes();
  CHECK(std::abs((a * one)(0) - 1.0) < 1e-15);
  CHECK((a * one - vac).norm() < 1e-15);
  CHECK((a * vac).norm() == 0.0);
  for (Eigen::Index n = 1; n < 6; ++n) CHECK(std::abs(a(n - 1, n) - std::sqrt(double(n))) < 1e-15);
  const Matrix comm = commutator(ladder(m, Ladder::annihilation), ladder(m, Ladder::creation)).dense();
  for (Eigen::Index n = 0; n < 5; ++n) CHECK(std::abs(comm(n, n) - 1.0) < 1e-14);
  CHECK(std::abs(comm(5, 5) + 5.0) < 1e-14);
  CHECK(max_abs(ladder(m, Ladder::number).dense() - a.adjoint() * a) < 1e-14);
}

TEST_CASE("coherent state mean photon number matches the Poisson series") {
  const ModeSpace m(40);
  const PureState psi = coherent_state(m, 2.0);
  double series = 0.0;
  for (int n = 0; n < 40; ++n) series += n * std::exp(-4.0) * std::pow(4.0, n) / factorial(n);
  CHECK(std::abs(expectation(ladder(m, Ladder::number), psi).real() - series) < 1e-10);
  CHECK(std::abs(series - 4.0) < 1e-6);
  CHECK((psi.amplitudes() - coherent_series(40, 2.0).normalized()).norm() < 1e-12);
}

TEST_CASE("embedding follows lexicographic ordering") {
  const CompositeSpace s({ModeSpace(2), ModeSpace(2)});
  const Matrix n0 = embed(ladder(s.mode(0), Ladder::number), s, 0).dense();
  Matrix expect = Matrix::Zero(4, 4);
  expect(2, 2) = expect(3, 3) = 1.0;
  CHECK(max_abs(n0 - expect) == 0.0);
  CHECK(max_abs(embed(Operator::identity(CompositeSpace(ModeSpace(2))), s, 1).dense() - Matrix::Identity(4, 4)) == 0.0);

  const CompositeSpace big({ModeSpace(5), ModeSpace(4)});
  const Operator a = embed(ladder(big.mode(0), Ladder::annihilation), big, 0);
  const Operator bd = embed(ladder(big.mode(1), Ladder::creation), big, 1);
  CHECK(max_abs(commutator(a, bd).dense()) < 1e-14);
  CHECK(max_abs(kron(ladder(ModeSpace(5), Ladder::annihilation), Operator::identity(ModeSpace(4))).dense() - a.dense()) == 0.0);
}

TEST_CASE("large composite spaces switch to sparse storage") {
  const CompositeSpace s({ModeSpace(20), ModeSpace(4), ModeSpace(4)});
  const Operator a = embed(ladder(s.mode(0), Ladder::annihilation), s, 0);
  CHECK(a.is_sparse());
  CHECK_FALSE(embed(ladder(ModeSpace(20), Ladder::annihilation), CompositeSpace({ModeSpace(20), ModeSpace(4)}), 0).is_sparse());
  const Operator n = a.adjoint() * a;
  CHECK(std::abs(n.dense()(16 * 3 + 2, 16 * 3 + 2) - 3.0) < 1e-14);
}

TEST_CASE("displacement produces Poisson weights and inverts") {
  const ModeSpace m(30);
  CHECK(max_abs(displacement(m, 0.0).dense() - Matrix::Identity(30, 30)) < 1e-15);
  const Vector psi = displacement(m, 1.0).apply(fock_state(m, 0).amplitudes());
  for (int n = 0; n < 3; ++n) CHECK(std::abs(std::norm(psi(n)) - std::exp(-1.0) / factorial(n)) < 1e-8);
  const cplx eta(0.7, -0.4);
  CHECK(max_abs((displacement(m, eta) * displacement(m, -eta)).dense() - Matrix::Identity(30, 30)) < 1e-10);
}

TEST_CASE("squeezed vacuum compresses q and matches the closed series") {
  const ModeSpace m(120);
  CHECK(max_abs(squeeze(m, 0.0).dense() - Matrix::Identity(120, 120)) < 1e-15);
  const PureState sv = squeezed_cat(m, 0.0, 1.1, CatKind::even);
  CHECK(std::abs(variance(position_quadrature(m), sv) - std::exp(-2.2) / 2.0) < 1e-6);
  CHECK(std::abs(variance(momentum_quadrature(m), sv) - std::exp(2.2) / 2.0) < 1e-6);
  const ModeSpace big(240);
  const Vector oracle = squeezed_vacuum_series(240, 1.1);
  CHECK((squeezed_cat(big, 0.0, 1.1, CatKind::even).amplitudes() - oracle).norm() < 1e-8);
  const Vector via_op = squeeze(big, 1.1).adjoint().apply(fock_state(big, 0).amplitudes());
  CHECK((via_op - oracle).norm() < 1e-8);
}

TEST_CASE("cat states") {
  const ModeSpace m(60);
  SUBCASE("small amplitude limit is the vacuum") {
    const PureState c = cat_state(m, 1e-6, CatKind::even);
    CHECK(std::abs(std::abs(c.amplitude(0)) - 1.0) < 1e-10);
  }
  SUBCASE("parity and a^2 eigenvalue") {
    const PureState even = cat_state(m, 2.0, CatKind::even);
    const PureState odd = cat_state(m, 2.0, CatKind::odd);
    CHECK(even.amplitude(1) == 0.0);
    CHECK(odd.amplitude(0) == 0.0);
    const Operator a = ladder(m, Ladder::annihilation);
    CHECK(std::abs(expectation(a * a, even) - 4.0) < 1e-10);
    const double ne = 2.0 * (1.0 + std::exp(-8.0));
    const Vector coh = coherent_series(60, 2.0);
    for (Eigen::Index n = 0; n < 10; n += 2) CHECK(std::abs(even.amplitudes()(n) - 2.0 * coh(n) / std::sqrt(ne)) < 1e-12);
    CHECK(std::abs(expectation(ladder(m, Ladder::number), odd).real() - 4.0 / std::tanh(4.0)) < 1e-8);
    CHECK(fidelity(DensityMatrix::from_pure(even), odd) < 1e-14);
  }
  SUBCASE("Yurke-Stoler superposition") {
    const PureState ys = cat_state(m, 1.5, CatKind::yurke_stoler);
    const Vector c = coherent_series(60, 1.5), cm = coherent_series(60, -1.5);
    const Vector expect = (cplx(0.5, 0.5) * c + cplx(0.5, -0.5) * cm).normalized();
    CHECK(std::abs(std::abs(expect.dot(ys.amplitudes())) - 1.0) < 1e-12);
  }
  CHECK_THROWS_AS(cat_state(m, 0.0, CatKind::odd), ValidationError);
}

TEST_CASE("squeezed cat mean photon number follows the Bogoliubov transform") {
  const ModeSpace m(200);
  const double x = 4.0, r = 1.1;
  const PureState secs = squeezed_cat(m, 2.0, r, CatKind::even);
  const double oracle = x * std::tanh(x) * std::cosh(2 * r) + std::sinh(r) * std::sinh(r) - x * std::sinh(2 * r);
  CHECK(std::abs(expectation(ladder(m, Ladder::number), secs).real() - oracle) < 1e-6);
  const PureState plain = squeezed_cat(ModeSpace(40), 2.0, 0.0, CatKind::odd);
  CHECK((plain.amplitudes() - cat_state(ModeSpace(40), 2.0, CatKind::odd).amplitudes()).norm() < 1e-14);
}

TEST_CASE("fidelity, trace distance and partial trace") {
  const ModeSpace m(4);
  const DensityMatrix r0 = DensityMatrix::from_pure(fock_state(m, 0));
  const DensityMatrix r1 = DensityMatrix::from_pure(fock_state(m, 1));
  CHECK(std::abs(fidelity(r1, r1) - 1.0) < 1e-12);
  CHECK(fidelity(r0, fock_state(m, 1)) == 0.0);
  CHECK(std::abs(trace_distance(r0, r1) - 1.0) < 1e-12);
  Matrix mix = Matrix::Zero(4, 4);
  mix(0, 0) = 0.25;
  mix(1, 1) = 0.75;
  const DensityMatrix rm(m, mix);
  CHECK(std::abs(fidelity(rm, r1) - std::sqrt(0.75)) < 1e-12);
  CHECK(std::abs(fidelity(rm, r1) - fidelity(r1, rm)) < 1e-10);

  const CompositeSpace s({ModeSpace(2), ModeSpace(2)});
  Vector bell = Vector::Zero(4);
  bell(0) = bell(3) = 1.0;
  const DensityMatrix rb = DensityMatrix::from_pure(PureState(s, bell));
  const std::size_t keep_a[] = {0};
  CHECK(max_abs(partial_trace(rb, keep_a).matrix() - Matrix::Identity(2, 2) / 2.0) < 1e-15);
  const std::size_t keep_all[] = {0, 1};
  CHECK(max_abs(partial_trace(rb, keep_all).matrix() - rb.matrix()) == 0.0);

  const DensityMatrix ra = DensityMatrix::from_pure(coherent_state(ModeSpace(6), 0.5));
  const DensityMatrix prod = tensor(ra, DensityMatrix::from_pure(fock_state(ModeSpace(3), 1)));
  CHECK(max_abs(partial_trace(prod, keep_a).matrix() - ra.matrix()) < 1e-12);
  const std::size_t bad[] = {2};
  CHECK_THROWS_AS(partial_trace(prod, bad), DimensionError);
}

TEST_CASE("density matrix validation") {
  const ModeSpace m(3);
  Matrix h = Matrix::Identity(3, 3) / 3.0;
  CHECK_NOTHROW(DensityMatrix(m, h));
  Matrix nh = h;
  nh(0, 1) = 0.1;
  CHECK_THROWS_AS(DensityMatrix(m, nh), ValidationError);
  CHECK_THROWS_AS(DensityMatrix(m, 2.0 * h), ValidationError);
  CHECK_THROWS_AS(DensityMatrix(ModeSpace(4), h), DimensionError);
  Matrix neg = Matrix::Zero(3, 3);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  CHECK_THROWS_AS(DensityMatrix(m, neg).check_positive(), ValidationError);
  CHECK(std::abs(DensityMatrix(m, h).purity() - 1.0 / 3.0) < 1e-15);
  CHECK_THROWS_AS(PureState(m, Vector::Zero(3)), ValidationError);
  CHECK_THROWS_AS(ModeSpace(1), DimensionError);
  CHECK_THROWS_AS(expectation(ladder(ModeSpace(4), Ladder::number), DensityMatrix(m, h)), DimensionError);
}

TEST_CASE("truncation guard") {
  CHECK(required_dim(2.0, 0.0) == 20);
  CHECK(required_dim(2.0, 1.1) == 181);
  CHECK(required_dim(0.0, 0.0) == 4);
  CHECK_NOTHROW(check_truncation(20, 2.0, 0.0));
  CHECK_THROWS_AS(check_truncation(19, 2.0, 0.0), TruncationError);
  CHECK_THROWS_AS(check_truncation(180, 2.0, 1.1), TruncationError);
}

TEST_CASE("padding and unitary conjugation") {
  const DensityMatrix r = DensityMatrix::from_pure(cat_state(ModeSpace(20), 1.0, CatKind::even));
  const DensityMatrix p = pad(r, 30);
  CHECK(p.dim() == 30);
  CHECK(max_abs(p.matrix().topLeftCorner(20, 20) - r.matrix()) == 0.0);
  CHECK_THROWS_AS(pad(r, 10), DimensionError);
  const ModeSpace m(60);
  const DensityMatrix rc = conjugate(squeeze(m, 0.5).adjoint(), DensityMatrix::from_pure(cat_state(m, 1.0, CatKind::even)));
  CHECK(std::abs(fidelity(rc, squeezed_cat(m, 1.0, 0.5, CatKind::even)) - 1.0) < 1e-10);
}
