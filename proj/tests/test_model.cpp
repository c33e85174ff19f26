#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "sqcat/model.hpp"

using namespace sqcat;

namespace {

constexpr double kPi = std::numbers::pi;

bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

// Moments of c = cosh(r) a + sinh(r) a^dag for a reservoir with <a^dag a> = N, <a a> = M.
std::pair<double, cplx> bogoliubov(double r, double n, cplx m) {
  const double mu = std::cosh(r), nu = std::sinh(r);
  return {mu * mu * n + nu * nu * (n + 1.0) + 2.0 * mu * nu * m.real(),
          mu * mu * m + mu * nu * (2.0 * n + 1.0) + nu * nu * std::conj(m)};
}

}  // namespace

TEST_CASE("parameter chain without a two-photon drive") {
  SystemParams p;
  p.Delta_a = 50.0;
  p.g = 1e-3;
  p.Omega_3 = 3.0;
  p.Delta_c = 10.0;
  const DerivedParams d = derive_params(p);
  CHECK(d.r == 0.0);
  CHECK(d.g_p == 0.0);
  CHECK(d.G == 0.0);
  CHECK(d.omega_sa == 50.0);
  CHECK(std::isnan(d.alpha.real()));
}

TEST_CASE("operating point of the cat generator") {
  const SystemParams p = figure2_params();
  CHECK(near(p.Omega_1, 50.0 * std::tanh(2.2), 1e-12));
  CHECK(near(p.Omega_1, 48.787, 1e-3));
  CHECK(near(p.Omega_2, 0.4, 1e-14));
  CHECK(near(p.phi_2, kPi, 0.0));
  const DerivedParams d = derive_params(p);
  CHECK(near(d.r, 1.1, 1e-9));
  CHECK(near(d.omega_sa, 100.0 / std::cosh(2.2), 1e-12));
  CHECK(near(d.omega_sa, 21.892, 1e-3));
  CHECK(near(p.Delta_b, 43.784, 1e-3));
  CHECK(near(p.Delta_c, 11.0 * p.Delta_b, 1e-12));
  CHECK(near(std::abs(d.eta_s), 2.0 * 0.1 / (1e-3 * std::sinh(2.2)), 1e-9));
  CHECK(near(std::abs(d.eta_s), 44.87, 5e-3));
  CHECK(std::abs(d.eta_s.imag()) < 1e-12);
  CHECK(near(d.G, 0.1, 1e-12));
  CHECK(near(d.Gamma_a, 0.04, 1e-12));
  CHECK(std::abs(d.alpha - cplx(2.0, 0.0)) < 1e-12);
  CHECK(near(d.J_eff.real(), 2.0 * -0.4 * 0.1, 1e-12));
  CHECK(d.resonant());

  const DerivedParams s = derive_params(scaled_detuning_params());
  CHECK(near(s.source.Delta_b, p.Delta_b / 5.0, 1e-12));
  CHECK(near(s.G, 0.1, 1e-12));
  CHECK(near(s.r, 1.1, 1e-9));
}

TEST_CASE("parameter validation") {
  SystemParams p = figure2_params();
  p.Omega_1 = 60.0;
  CHECK_THROWS_AS(derive_params(p), ValidationError);
  p = figure2_params();
  p.kappa_b = 0.0;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = figure2_params();
  p.phi_1 = 0.3;
  CHECK_THROWS_AS(p.validate(), ValidationError);
  p = figure2_params();
  p.g = std::nan("");
  CHECK_THROWS_AS(p.validate(), ValidationError);
  CHECK_THROWS_AS(params_for_target(2.0, 0.0, 0.1), ValidationError);
  CHECK_THROWS_AS(params_for_target(-1.0, 1.1, 0.1), ValidationError);
}

TEST_CASE("effective reservoir follows the Bogoliubov transform") {
  CHECK(effective_n(0.0, 0.0, 0.0) == 0.0);
  CHECK(std::abs(effective_m(0.0, 0.0, 0.0)) == 0.0);
  const Reservoir matched = matched_reservoir(1.1);
  CHECK(std::abs(effective_n(1.1, matched.r_env, matched.phi_env)) <= 1e-12);
  CHECK(std::abs(effective_m(1.1, matched.r_env, matched.phi_env)) <= 1e-12);
  CHECK(effective_n(1.1, 0.55, kPi) > 0.0);
  for (const auto& [r, re, phi] : {std::tuple{0.3, 0.7, 0.4}, std::tuple{1.1, 0.2, 2.0}, std::tuple{0.8, 0.8, -1.0}}) {
    const Reservoir res = reservoir(re, phi);
    const auto [n, m] = bogoliubov(r, res.n_env, res.m_env);
    CHECK(near(effective_n(r, re, phi), n, 1e-12));
    CHECK(std::abs(effective_m(r, re, phi) - m) < 1e-12);
    CHECK(std::norm(m) <= n * (n + 1.0) + 1e-10);
  }
  const DerivedParams d = derive_params(figure2_params());
  CHECK(std::abs(d.N_eff) <= 1e-12);
  CHECK(std::abs(d.M_eff) <= 1e-12);
  CHECK_THROWS_AS(reservoir(-0.1, 0.0), ValidationError);
}

TEST_CASE("exact model envelopes and term structure") {
  const DerivedParams d = derive_params(figure2_params());
  const LindbladModel exact = build_exact_model(d);
  std::vector<double> freqs;
  for (const auto& t : exact.terms()) freqs.push_back(t.envelope.frequency);
  for (double f : {87.57, 481.6, -394.1, 43.78, -437.8}) {
    const bool found = std::any_of(freqs.begin(), freqs.end(), [&](double x) { return std::abs(x - f) < 0.05; });
    CHECK_MESSAGE(found, "missing envelope frequency " << f);
  }
  CHECK(near(exact.max_frequency(), 481.6, 0.05));
  CHECK_NOTHROW(exact.check_hermitian({0.0, 0.013, 0.1}));
  for (const auto& t : exact.terms()) CHECK(std::abs(t.envelope(0.0) - t.envelope.amplitude) == 0.0);
}

TEST_CASE("exact model without oscillating terms is the two-mode model with an idle third mode") {
  const DerivedParams d = derive_params(figure2_params());
  const Dims dims{20, 3, 2};
  const LindbladModel exact = build_exact_model(d, dims, ExactOptions{false});
  const LindbladModel approx = build_approx_model(d, dims);
  const Operator id_c = Operator::identity(CompositeSpace(ModeSpace(2)));
  const Matrix expect = kron(approx.hamiltonian(0.0), id_c).dense();
  CHECK((exact.hamiltonian(0.0).dense() - expect).cwiseAbs().maxCoeff() < 1e-14);
  CHECK(exact.time_independent());
}

TEST_CASE("builder preconditions") {
  SystemParams p = figure2_params();
  p.drive_detuning_b *= 1.01;
  CHECK_THROWS_AS(build_exact_model(derive_params(p)), ValidationError);
  p = figure2_params();
  p.phi_2 = 0.5;
  CHECK_THROWS_AS(build_reduced_model(derive_params(p), 0.0, 20), ValidationError);
  CHECK_THROWS_AS(build_reduced_model(derive_params(figure2_params()), 0.0, 12), TruncationError);
  CHECK_THROWS_AS(build_approx_model(derive_params(figure2_params()), Dims{12, 4, 3}), TruncationError);
}

TEST_CASE("reduced model dark states") {
  const DerivedParams d = derive_params(figure2_params());
  const LindbladModel red = build_reduced_model(d, 0.0, 48);
  const ModeSpace m(48);
  const PureState cat = cat_state(m, 2.0, CatKind::even);
  CHECK(residual(red, DensityMatrix::from_pure(cat)) < 1e-10);

  SystemParams p = figure2_params();
  p.Omega_2 = 0.0;
  const LindbladModel undriven = build_reduced_model(derive_params(p), 0.0, 20);
  CHECK(residual(undriven, DensityMatrix::from_pure(fock_state(ModeSpace(20), 0))) == 0.0);
}

TEST_CASE("RWA validity report") {
  const RwaReport fig2 = rwa_validity(derive_params(figure2_params()));
  CHECK(fig2.ratios.size() == 7);
  CHECK(fig2.pass);
  for (const auto& r : fig2.ratios) CHECK(r.ratio >= RwaReport::kThreshold);
  CHECK(rwa_validity(derive_params(scaled_detuning_params())).pass);

  SystemParams p = figure2_params();
  p.g = 0.0;
  const RwaReport none = rwa_validity(derive_params(p));
  CHECK(none.pass);
  for (const auto& r : none.ratios) CHECK(std::isinf(r.ratio));

  // Delta_b equal to g_p eta_s n_a: 2 Delta_b against g_p eta_s n_a / 2
  const DerivedParams d = derive_params(figure2_params());
  DerivedParams forced = d;
  forced.source.Delta_b = d.g_p * std::abs(d.eta_s) * 4.0;
  const RwaReport bad = rwa_validity(forced, 4.0, 1.0, 1.0);
  CHECK(near(bad.ratios[0].ratio, 4.0, 1e-12));
  CHECK_FALSE(bad.ratios[0].pass);
  CHECK_FALSE(bad.pass);
}

TEST_CASE("lab frame and single-photon loss") {
  const ModeSpace m(40);
  const PureState cat = cat_state(m, 2.0, CatKind::even);
  const PureState lab = to_lab_frame(cat, 1.1, 181);
  CHECK(std::abs(std::abs(lab.amplitudes().dot(squeezed_cat(ModeSpace(181), 2.0, 1.1, CatKind::even).amplitudes())) - 1.0) < 1e-10);
  CHECK_THROWS_AS(to_lab_frame(cat, 1.1, 150), TruncationError);

  const DensityMatrix t0 = decayed_cat_density(2.0, 1.1, 1e-3, 0.0, 181);
  CHECK(std::abs(fidelity(t0, squeezed_cat(ModeSpace(181), 2.0, 1.1, CatKind::even)) - 1.0) < 1e-10);
  const double tau = lifetime(2.0, 1e-3);
  CHECK(near(tau, 125.0, 1e-12));
  CHECK(near(lifetime(1.0, 1.0), 0.5, 0.0));
  CHECK(near(lifetime(4.0, 1e-3), tau / 4.0, 1e-12));
  const DensityMatrix late = decayed_cat_density(2.0, 1.1, 1e-3, 50.0 * tau, 181);
  const PureState sq_vac = squeezed_cat(ModeSpace(181), 0.0, 1.1, CatKind::even);
  const double beta2 = 4.0 * std::exp(-50.0 * tau * 1e-3);
  const double cross = std::exp(-2.0 * 4.0 * (1.0 - std::exp(-50.0 * tau * 1e-3)));
  const double vac_weight = std::exp(-beta2) * (2.0 + 2.0 * cross) / (2.0 + 2.0 * cross * std::exp(-2.0 * beta2));
  CHECK(near(fidelity(late, sq_vac), std::sqrt(vac_weight), 1e-8));
  CHECK(fidelity(late, sq_vac) >= 0.99);
  CHECK(std::abs(late.trace() - 1.0) < 1e-12);
}
