#include "sqcat/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace sqcat {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw ValidationError(std::string("SystemParams: ") + name + " is not finite");
}

bool close(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)}); }

double alpha_guard(const DerivedParams& d) {
  const double a = std::abs(d.alpha);
  return std::isfinite(a) ? a : 0.0;
}

}  // namespace

void SystemParams::validate() const {
  const std::pair<double, const char*> all[] = {
      {Delta_a, "Delta_a"}, {Delta_b, "Delta_b"}, {Delta_c, "Delta_c"}, {g, "g"},
      {Omega_1, "Omega_1"}, {Omega_2, "Omega_2"}, {Omega_3, "Omega_3"}, {phi_1, "phi_1"},
      {phi_2, "phi_2"},     {phi_3, "phi_3"},     {kappa_a, "kappa_a"}, {kappa_b, "kappa_b"},
      {kappa_c, "kappa_c"}, {r_env, "r_env"},     {phi_env, "phi_env"}, {drive_detuning_b, "drive_detuning_b"}};
  for (const auto& [v, name] : all) require_finite(v, name);
  if (!(kappa_b > 0.0)) throw ValidationError("SystemParams: kappa_b must be > 0");
  if (kappa_a < 0.0 || kappa_c < 0.0) throw ValidationError("SystemParams: decay rates must be >= 0");
  if (r_env < 0.0) throw ValidationError("SystemParams: r_env must be >= 0");
  if (!(Delta_a > 2.0 * std::abs(Omega_1))) {
    std::ostringstream os;
    os << "SystemParams: squeeze diverges, Delta_a = " << Delta_a << " must exceed 2|Omega_1| = " << 2.0 * std::abs(Omega_1);
    throw ValidationError(os.str());
  }
  if (phi_1 != 0.0) throw ValidationError("SystemParams: only phi_1 = 0 (real squeeze parameter) is supported");
}

cplx DerivedParams::drive_b() const { return source.Omega_2 * std::exp(kI * source.phi_2); }

bool DerivedParams::resonant() const {
  return close(2.0 * omega_sa, source.Delta_b) && close(source.drive_detuning_b, source.Delta_b);
}

double effective_n(double r, double r_env, double phi_env) {
  const double sr = std::sinh(r), cr = std::cosh(r), se = std::sinh(r_env), ce = std::cosh(r_env);
  return sr * sr * ce * ce + cr * cr * se * se + 0.5 * std::cos(phi_env) * std::sinh(2.0 * r) * std::sinh(2.0 * r_env);
}

cplx effective_m(double r, double r_env, double phi_env) {
  const double sr = std::sinh(r), cr = std::cosh(r), se = std::sinh(r_env), ce = std::cosh(r_env);
  return (cr * ce + std::exp(-kI * phi_env) * sr * se) * (sr * ce + std::exp(kI * phi_env) * cr * se);
}

Reservoir reservoir(double r_env, double phi_env) {
  if (r_env < 0.0) throw ValidationError("reservoir: r_env must be >= 0");
  return {r_env, phi_env, std::sinh(r_env) * std::sinh(r_env),
          std::sinh(r_env) * std::cosh(r_env) * std::exp(kI * phi_env)};
}

Reservoir matched_reservoir(double r) { return reservoir(std::abs(r), kPi); }

DerivedParams derive_params(const SystemParams& p) {
  p.validate();
  DerivedParams d;
  d.source = p;
  d.eta_s = p.Omega_3 * std::exp(kI * p.phi_3) / cplx(p.Delta_c, -0.5 * p.kappa_c);
  d.r = 0.25 * std::log((p.Delta_a + 2.0 * p.Omega_1) / (p.Delta_a - 2.0 * p.Omega_1));
  d.omega_sa = p.Delta_a / std::cosh(2.0 * d.r);
  d.g_s = p.g * std::cosh(2.0 * d.r);
  d.g_p = p.g * std::sinh(2.0 * d.r);
  d.G = 0.5 * d.g_p * d.eta_s.real();
  d.Gamma_a = 4.0 * d.G * d.G / p.kappa_b;
  d.J_eff = 2.0 * d.drive_b() * d.G / p.kappa_b;
  d.alpha = d.G == 0.0 ? cplx(std::numeric_limits<double>::quiet_NaN(), 0.0) : std::sqrt(-d.drive_b() / d.G);
  d.N_eff = effective_n(d.r, p.r_env, p.phi_env);
  d.M_eff = effective_m(d.r, p.r_env, p.phi_env);
  return d;
}

SystemParams params_for_target(double alpha, double r, double G, const TargetBase& base) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw ValidationError("params_for_target: alpha must be finite and >= 0");
  if (!(r > 0.0) || !std::isfinite(r)) throw ValidationError("params_for_target: r must be > 0 to produce a three-wave coupling");
  if (!(G > 0.0) || !std::isfinite(G)) throw ValidationError("params_for_target: G must be > 0");
  if (!(base.g > 0.0)) throw ValidationError("params_for_target: g must be > 0");
  if (!(base.Delta_a > 0.0)) throw ValidationError("params_for_target: Delta_a must be > 0");
  if (!(base.detuning_ratio_c != 1.0)) throw ValidationError("params_for_target: Delta_c must differ from Delta_b");

  SystemParams p;
  p.Delta_a = base.Delta_a;
  p.g = base.g;
  p.kappa_a = base.kappa_a;
  p.kappa_b = base.kappa_b;
  p.kappa_c = base.kappa_c;
  p.Omega_1 = 0.5 * base.Delta_a * std::tanh(2.0 * r);
  const double omega_sa = base.Delta_a / std::cosh(2.0 * r);
  p.Delta_b = 2.0 * omega_sa;
  p.drive_detuning_b = p.Delta_b;
  p.Delta_c = base.detuning_ratio_c * p.Delta_b;
  const double g_p = base.g * std::sinh(2.0 * r);
  const double eta_s = 2.0 * G / g_p;
  const cplx denom(p.Delta_c, -0.5 * p.kappa_c);
  p.Omega_3 = eta_s * std::abs(denom);
  p.phi_3 = std::arg(denom);
  p.Omega_2 = alpha * alpha * G;
  p.phi_2 = kPi;
  p.r_env = base.r_env.value_or(r);
  p.phi_env = base.phi_env.value_or(kPi);
  p.validate();
  return p;
}

SystemParams figure2_params() { return params_for_target(2.0, 1.1, 0.1); }

SystemParams scaled_detuning_params() {
  TargetBase base;
  base.Delta_a = 100.0 / 5.0;
  return params_for_target(2.0, 1.1, 0.1, base);
}

// ---------------------------------------------------------------- builders

namespace {

void require_resonance(const DerivedParams& d, const char* who) {
  if (!d.resonant()) {
    std::ostringstream os;
    os << who << ": requires 2 omega_sa = Delta_b = omega_2 - omega_3 (got 2 omega_sa = " << 2.0 * d.omega_sa
       << ", Delta_b = " << d.source.Delta_b << ", omega_2 - omega_3 = " << d.source.drive_detuning_b << ")";
    throw ValidationError(os.str());
  }
}

void add_mode_a_loss(LindbladModel& model, const Operator& a, const DerivedParams& d, double kappa_a) {
  if (kappa_a <= 0.0) return;
  const double n = d.N_eff < 1e-12 ? 0.0 : d.N_eff;
  const cplx m = std::abs(d.M_eff) < 1e-12 ? cplx(0.0) : d.M_eff;
  if (n == 0.0 && m == cplx(0.0))
    model.add_dissipator(Dissipator::standard(a, kappa_a));
  else
    model.add_dissipator(Dissipator::squeezed(a, kappa_a, n, m));
}

}  // namespace

LindbladModel build_exact_model(const DerivedParams& d, const Dims& dims, const ExactOptions& options) {
  require_resonance(d, "build_exact_model");
  check_truncation(dims.a, alpha_guard(d), 0.0);
  const CompositeSpace space({ModeSpace(dims.a), ModeSpace(dims.b), ModeSpace(dims.c)});
  const Operator a = embed(ladder(space.mode(0), Ladder::annihilation), space, 0);
  const Operator b = embed(ladder(space.mode(1), Ladder::annihilation), space, 1);
  const Operator c = embed(ladder(space.mode(2), Ladder::annihilation), space, 2);
  const Operator na = embed(ladder(space.mode(0), Ladder::number), space, 0);
  const Operator id = Operator::identity(space);
  const Operator a2 = a * a;
  const Operator bd = b.adjoint(), cd = c.adjoint();

  const SystemParams& p = d.source;
  const cplx coupling = 0.5 * d.g_p * d.eta_s;
  LindbladModel model(space);
  model.add_hermitian_pair(a2 * bd, Envelope::constant(coupling));
  model.add_hermitian_pair(b, Envelope::constant(p.Omega_2 * std::exp(-kI * p.phi_2)));

  if (options.include_nonrotating) {
    const double Db = p.Delta_b, Dc = p.Delta_c;
    const double shift = p.g * std::sinh(d.r) * std::sinh(d.r);
    const Operator fredkin = d.g_s * na + shift * id;
    model.add_hermitian_pair(a2 * b, {coupling, 2.0 * Db});
    model.add_hermitian_pair(a2 * bd * c, {-0.5 * d.g_p, Dc});
    model.add_hermitian_pair(a2 * cd * b, {-0.5 * d.g_p, 2.0 * Db - Dc});
    model.add_hermitian_pair(fredkin * b, {-d.eta_s, Db});
    model.add_hermitian_pair(fredkin * b * cd, {1.0, Db - Dc});
  }

  add_mode_a_loss(model, a, d, p.kappa_a);
  model.add_dissipator(Dissipator::standard(b, p.kappa_b));
  if (p.kappa_c > 0.0) model.add_dissipator(Dissipator::standard(c, p.kappa_c));
  return model;
}

LindbladModel build_approx_model(const DerivedParams& d, const Dims& dims) {
  check_truncation(dims.a, alpha_guard(d), 0.0);
  const CompositeSpace space({ModeSpace(dims.a), ModeSpace(dims.b)});
  const Operator a = embed(ladder(space.mode(0), Ladder::annihilation), space, 0);
  const Operator b = embed(ladder(space.mode(1), Ladder::annihilation), space, 1);
  const SystemParams& p = d.source;
  LindbladModel model(space);
  model.add_hermitian_pair(a * a * b.adjoint(), Envelope::constant(d.G));
  model.add_hermitian_pair(b, Envelope::constant(p.Omega_2 * std::exp(-kI * p.phi_2)));
  add_mode_a_loss(model, a, d, p.kappa_a);
  model.add_dissipator(Dissipator::standard(b, p.kappa_b));
  return model;
}

LindbladModel build_reduced_model(const DerivedParams& d, double kappa_a, std::size_t dim_a) {
  if (std::abs(d.J_eff.imag()) > 1e-12 * std::max(1.0, std::abs(d.J_eff)))
    throw ValidationError("build_reduced_model: effective drive J must be real (phi_2 in {0, pi})");
  if (kappa_a < 0.0) throw ValidationError("build_reduced_model: kappa_a must be >= 0");
  check_truncation(dim_a, alpha_guard(d), 0.0);
  const ModeSpace mode(dim_a);
  const Operator a = ladder(mode, Ladder::annihilation);
  const Operator a2 = a * a;
  LindbladModel model{CompositeSpace(mode)};
  const double J = d.J_eff.real();
  if (J != 0.0) model.add_hermitian_pair(a2, Envelope::constant(kI * J));
  if (d.Gamma_a > 0.0) model.add_dissipator(Dissipator::standard(a2, d.Gamma_a));
  add_mode_a_loss(model, a, d, kappa_a);
  return model;
}

// ---------------------------------------------------------------- RWA report

RwaReport rwa_validity(const DerivedParams& d, double n_a, double n_b, double n_c) {
  if (n_a < 0.0 || n_b < 0.0 || n_c < 0.0) throw ValidationError("rwa_validity: excitation numbers must be >= 0");
  const SystemParams& p = d.source;
  const double eta = std::abs(d.eta_s);
  const double sh2 = std::sinh(d.r) * std::sinh(d.r);
  const double Db = p.Delta_b, Dbc = std::abs(p.Delta_b - p.Delta_c);
  const double sb = std::sqrt(n_b), sbc = std::sqrt(n_b * n_c);

  RwaReport report;
  report.n_a = n_a;
  report.n_b = n_b;
  report.n_c = n_c;
  auto add = [&](std::string name, double large, double small) {
    RwaRatio r{std::move(name), std::abs(large), std::abs(small), 0.0, false};
    r.ratio = r.small == 0.0 ? std::numeric_limits<double>::infinity() : r.large / r.small;
    r.pass = r.ratio >= RwaReport::kThreshold;
    report.pass = report.pass && r.pass;
    report.ratios.push_back(std::move(r));
  };
  add("2Delta_b/(g_p eta_s n_a sqrt(n_b)/2)", 2.0 * Db, 0.5 * d.g_p * eta * n_a * sb);
  add("2Delta_b/(2 g_s eta_s n_a sqrt(n_b))", 2.0 * Db, 2.0 * d.g_s * eta * n_a * sb);
  add("2Delta_b/(2 g eta_s sinh^2 r sqrt(n_b))", 2.0 * Db, 2.0 * p.g * eta * sh2 * sb);
  add("|Delta_b-Delta_c|/(g_s n_a sqrt(n_b n_c))", Dbc, d.g_s * n_a * sbc);
  add("|Delta_b-Delta_c|/(g sinh^2 r sqrt(n_b n_c))", Dbc, p.g * sh2 * sbc);
  add("|Delta_b-Delta_c+2omega_sa|/(g_p n_a sqrt(n_b n_c)/2)", p.Delta_b - p.Delta_c + 2.0 * d.omega_sa,
      0.5 * d.g_p * n_a * sbc);
  add("|Delta_b-Delta_c-2omega_sa|/(g_p n_a sqrt(n_b n_c)/2)", p.Delta_b - p.Delta_c - 2.0 * d.omega_sa,
      0.5 * d.g_p * n_a * sbc);
  return report;
}

RwaReport rwa_validity(const DerivedParams& d) {
  const double a = alpha_guard(d);
  const double nb = 2.0 * d.source.Omega_2 / d.source.kappa_b;
  return rwa_validity(d, a * a, std::max(1.0, nb * nb), 1.0);
}

// ---------------------------------------------------------------- lab frame

namespace {

double mean_photons(const DensityMatrix& rho) {
  double n = 0.0;
  for (Eigen::Index k = 0; k < rho.matrix().rows(); ++k) n += double(k) * rho.matrix()(k, k).real();
  return n;
}

void require_single_mode(const CompositeSpace& space, const char* who) {
  if (space.mode_count() != 1) throw DimensionError(std::string(who) + ": expects a single-mode state");
}

}  // namespace

DensityMatrix to_lab_frame(const DensityMatrix& rho, double r, std::size_t lab_dim) {
  require_single_mode(rho.space(), "to_lab_frame");
  if (lab_dim < rho.dim()) throw DimensionError("to_lab_frame: lab_dim smaller than the state");
  check_truncation(lab_dim, std::sqrt(std::max(0.0, mean_photons(rho))), r);
  const DensityMatrix padded = pad(rho, lab_dim);
  if (r == 0.0) return padded;
  return conjugate(squeeze(ModeSpace(lab_dim), r).adjoint(), padded);
}

PureState to_lab_frame(const PureState& psi, double r, std::size_t lab_dim) {
  require_single_mode(psi.space(), "to_lab_frame");
  const auto n = static_cast<Eigen::Index>(psi.space().total_dim());
  if (lab_dim < std::size_t(n)) throw DimensionError("to_lab_frame: lab_dim smaller than the state");
  double photons = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) photons += double(k) * std::norm(psi.amplitudes()(k));
  check_truncation(lab_dim, std::sqrt(photons), r);
  Vector v = Vector::Zero(static_cast<Eigen::Index>(lab_dim));
  v.head(n) = psi.amplitudes();
  const ModeSpace mode(lab_dim);
  if (r == 0.0) return PureState(mode, v);
  return PureState(mode, squeeze(mode, r).adjoint().apply(v));
}

DensityMatrix decayed_cat_density(double alpha, double r, double kappa_a, double t, std::size_t dim) {
  if (!(alpha > 0.0)) throw ValidationError("decayed_cat_density: alpha must be > 0");
  if (kappa_a < 0.0 || t < 0.0) throw ValidationError("decayed_cat_density: kappa_a and t must be >= 0");
  check_truncation(dim, alpha, r);
  const ModeSpace mode(dim);
  const double decay = std::exp(-0.5 * kappa_a * t);
  const double cross = std::exp(-2.0 * alpha * alpha * (1.0 - decay * decay));
  const Vector plus = coherent_state(mode, alpha * decay).amplitudes();
  const Vector minus = coherent_state(mode, -alpha * decay).amplitudes();
  Matrix rho = plus * plus.adjoint() + minus * minus.adjoint() +
               cross * (plus * minus.adjoint() + minus * plus.adjoint());
  const DensityMatrix frame = DensityMatrix::normalized(mode, rho);
  if (r == 0.0) return frame;
  return conjugate(squeeze(mode, r).adjoint(), frame);
}

double lifetime(double alpha, double kappa_a) {
  if (!(alpha > 0.0) || !(kappa_a > 0.0)) throw ValidationError("lifetime: alpha and kappa_a must be > 0");
  return 1.0 / (2.0 * alpha * alpha * kappa_a);
}

}  // namespace sqcat
