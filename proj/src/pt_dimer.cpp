// Copyright 2026 The symbreak-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "symbreak/pt_dimer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include "symbreak/parallel.hpp"

namespace symbreak::dimer {

namespace {

constexpr cplx I{0.0, 1.0};

void require_finite_nonnegative(double v, const char* name) {
  if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument(std::string("DimerParams: ") + name + " must be finite and >= 0");
}

// Coefficient of the density in the hopping factor 1 + coef * n.
double hop_density_coefficient(const DimerParams& p, Model model) {
  switch (model) {
    case Model::NonlinearHop:
      return 0.5 / p.n_star;
    case Model::DetunedHop:
      return 1.0 / p.n_star;
    default:
      return 0.0;
  }
}

double gain_factor(double b2, double n_star, double exponent) { return std::pow(1.0 + b2 / n_star, -exponent); }

std::array<cplx, 2> sorted_pair(cplx x, cplx y) {
  if (x.real() < y.real() || (x.real() == y.real() && x.imag() < y.imag())) return {x, y};
  return {y, x};
}

// S18 amplitudes for the lasing fixed point, split as rho_a^2 : rho_b^2 = kb : ka.
std::array<double, 2> lasing_densities(const DimerParams& p, double n_total) {
  const double k = p.kappa_a + p.kappa_b;
  return {n_total * p.kappa_b / k, n_total * p.kappa_a / k};
}

}  // namespace

// --- parameters ------------------------------------------------------------

void DimerParams::validate(bool nonlinear) const {
  require_finite_nonnegative(J, "J");
  require_finite_nonnegative(kappa_a, "kappa_a");
  require_finite_nonnegative(kappa_b, "kappa_b");
  if (!std::isfinite(delta)) throw std::invalid_argument("DimerParams: delta must be finite");
  if (std::isnan(n_star) || n_star < 0.0) throw std::invalid_argument("DimerParams: n_star must be >= 0");
  if (nonlinear && !(n_star > 0.0)) throw std::invalid_argument("DimerParams: n_star must be > 0 for the nonlinear model");
}

double DimerParams::threshold_ratio() const {
  const double s = std::sqrt(kappa_a * kappa_b);
  if (J == 0.0) return s > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  return s / (2.0 * J);
}

Model parse_model(std::string_view name) {
  if (name == "nonlinear-hop") return Model::NonlinearHop;
  if (name == "gain-sat") return Model::GainSat;
  if (name == "detuned-hop") return Model::DetunedHop;
  if (name == "detuned-gain-sat") return Model::DetunedGainSat;
  throw std::invalid_argument("unknown dimer model '" + std::string(name) + "'");
}

std::string model_name(Model model) {
  switch (model) {
    case Model::NonlinearHop:
      return "nonlinear-hop";
    case Model::GainSat:
      return "gain-sat";
    case Model::DetunedHop:
      return "detuned-hop";
    case Model::DetunedGainSat:
      return "detuned-gain-sat";
  }
  return "unknown";
}

bool is_gain_saturation(Model model) { return model == Model::GainSat || model == Model::DetunedGainSat; }

std::string branch_name(Branch b) { return b == Branch::Lasing ? "lasing" : "trivial"; }

std::string verdict_name(StabilityVerdict v) {
  switch (v) {
    case StabilityVerdict::Unstable:
      return "unstable";
    case StabilityVerdict::Marginal:
      return "marginal";
    case StabilityVerdict::Stable:
      return "stable";
  }
  return "unknown";
}

// --- exact model -----------------------------------------------------------

OpenSystem build_dimer_model(const DimerParams& p, int dim_a, int dim_b) {
  p.validate(false);
  FockSpace space({dim_a, dim_b});
  const SparseOperator a = annihilation(space, 0);
  const SparseOperator b = annihilation(space, 1);
  const SparseOperator na = number(space, 0);
  const SparseOperator nb = number(space, 1);
  const SparseOperator hop = a.adjoint() * b + b.adjoint() * a;

  SparseOperator h = zero_operator(space);
  if (p.J != 0.0) {
    SparseOperator factor = identity(space);
    if (p.n_star > 0.0 && std::isfinite(p.n_star)) factor = factor + (na + nb) * cplx(0.5 / p.n_star);
    h = factor * hop * cplx(p.J);
  }
  if (p.delta != 0.0) h = h + (na - nb) * cplx(p.delta);

  std::vector<SparseOperator> jumps;
  if (p.kappa_a > 0.0) jumps.push_back(a * cplx(std::sqrt(p.kappa_a)));
  if (p.kappa_b > 0.0) jumps.push_back(b.adjoint() * cplx(std::sqrt(p.kappa_b)));
  return {h, std::move(jumps)};
}

DimerObservables dimer_observables(const FockSpace& space) {
  if (space.num_modes() != 2) throw std::invalid_argument("dimer_observables: expected a two-mode space");
  const SparseOperator a = annihilation(space, 0);
  const SparseOperator b = annihilation(space, 1);
  const SparseOperator ab = a.adjoint() * b;
  const SparseOperator ba = b.adjoint() * a;
  return {number(space, 0), number(space, 1), (ab - ba) * I, ab + ba};
}

// --- mean field ------------------------------------------------------------

MeanFieldState mean_field_rhs(const MeanFieldState& s, const DimerParams& p) {
  const double jt = p.J * (1.0 + (s.n_a + s.n_b + 0.5) / p.n_star);
  MeanFieldState d;
  d.n_a = -jt * s.c - p.kappa_a * s.n_a;
  d.n_b = jt * s.c + p.kappa_b * s.n_b + p.kappa_b;
  d.c = 2.0 * jt * (s.n_a - s.n_b) - 0.5 * (p.kappa_a - p.kappa_b) * s.c;
  return d;
}

Eigen::Matrix3d mean_field_jacobian(const MeanFieldState& s, const DimerParams& p) {
  const double jt = p.J * (1.0 + (s.n_a + s.n_b + 0.5) / p.n_star);
  const double djt = p.J / p.n_star;  // d Jt / d n_a = d Jt / d n_b
  const double diff = s.n_a - s.n_b;
  Eigen::Matrix3d m;
  m << -djt * s.c - p.kappa_a, -djt * s.c, -jt,
       djt * s.c, djt * s.c + p.kappa_b, jt,
       2.0 * djt * diff + 2.0 * jt, 2.0 * djt * diff - 2.0 * jt, -0.5 * (p.kappa_a - p.kappa_b);
  return m;
}

std::optional<MeanFieldState> mean_field_fixed_point(const DimerParams& p) {
  p.validate(true);
  if (p.kappa_b == 0.0) return MeanFieldState{0.0, 0.0, 0.0};
  if (!(p.kappa_a > p.kappa_b) || p.J == 0.0) return std::nullopt;
  const double ka = p.kappa_a, kb = p.kappa_b;
  // With n = n_a + n_b, the first two equations give n_a = kb (n + 1) / (ka + kb)
  // and c = -ka n_a / Jt; the third then reduces to f(n) = 0.
  auto f = [&](double n) {
    const double jt = p.J * (1.0 + (n + 0.5) / p.n_star);
    return 4.0 * jt * jt * ((ka - kb) * n - 2.0 * kb) - ka * kb * (ka - kb) * (n + 1.0);
  };
  double lo = 0.0, hi = 1.0;
  while (f(hi) <= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e15) return std::nullopt;
  }
  boost::math::tools::eps_tolerance<double> tol(52);
  std::uintmax_t iters = 200;
  auto [r0, r1] = boost::math::tools::toms748_solve(f, lo, hi, tol, iters);
  const double n = 0.5 * (r0 + r1);
  MeanFieldState s;
  s.n_a = kb * (n + 1.0) / (ka + kb);
  s.n_b = n - s.n_a;
  s.c = -ka * s.n_a / (p.J * (1.0 + (n + 0.5) / p.n_star));
  return s;
}

MeanFieldSteadyState mean_field_steady_state(const DimerParams& p) {
  p.validate(true);
  if (p.J == 0.0 && p.kappa_b > 0.0) throw std::domain_error("mean_field_steady_state: no bounded steady state for J = 0 with gain");
  MeanFieldSteadyState out;
  out.moment_fixed_point = mean_field_fixed_point(p);
  if (p.kappa_b > 0.0 && p.lasing()) {
    out.branch = Branch::Lasing;
    out.n_total = 2.0 * p.n_star * (p.threshold_ratio() - 1.0);
    const auto [na, nb] = lasing_densities(p, out.n_total);
    out.split = {na, nb, -2.0 * std::sqrt(na * nb)};
  } else {
    out.branch = Branch::Trivial;
    if (out.moment_fixed_point) {
      out.split = *out.moment_fixed_point;
      out.n_total = out.split.n_a + out.split.n_b;
    }
  }
  return out;
}

// --- semiclassical ---------------------------------------------------------

SemiclassicalState semiclassical_rhs(const SemiclassicalState& s, const DimerParams& p, Model model, const SemiclassicalOptions& opts) {
  const cplx a = s.a, b = s.b;
  SemiclassicalState d;
  if (is_gain_saturation(model)) {
    const double g = gain_factor(std::norm(b), p.n_star, opts.saturation_exponent);
    d.a = -I * p.J * b - I * p.delta * a - 0.5 * p.kappa_a * a;
    d.b = -I * p.J * a + I * p.delta * b + 0.5 * p.kappa_b * g * b;
    return d;
  }
  const double jn = p.J * (1.0 + hop_density_coefficient(p, model) * s.density());
  d.a = -I * jn * b - I * p.delta * a - 0.5 * p.kappa_a * a;
  d.b = -I * jn * a + I * p.delta * b + 0.5 * p.kappa_b * b;
  if (opts.retain_conserved_term) {
    const double x = 2.0 * std::real(std::conj(a) * b);
    const double k = p.J * 0.5 / p.n_star;
    d.a += -I * k * x * a;
    d.b += -I * k * x * b;
  }
  return d;
}

std::optional<SemiclassicalState> lasing_fixed_point(const DimerParams& p, Model model, const SemiclassicalOptions& opts) {
  p.validate(true);
  if (p.delta != 0.0 && (model == Model::DetunedHop || model == Model::DetunedGainSat)) return std::nullopt;
  if (p.delta != 0.0) return std::nullopt;
  if (p.J == 0.0 || !p.lasing()) return std::nullopt;
  if (is_gain_saturation(model)) {
    const double x = std::pow(p.kappa_a * p.kappa_b / (4.0 * p.J * p.J), 1.0 / opts.saturation_exponent) - 1.0;
    const double rb = std::sqrt(p.n_star * x);
    return SemiclassicalState{cplx(2.0 * p.J * rb / p.kappa_a, 0.0), cplx(0.0, rb)};
  }
  const double n = (p.threshold_ratio() - 1.0) / hop_density_coefficient(p, model);
  const auto [na, nb] = lasing_densities(p, n);
  return SemiclassicalState{cplx(std::sqrt(na), 0.0), cplx(0.0, std::sqrt(nb))};
}

Eigen::Matrix4d semiclassical_jacobian(const SemiclassicalState& s, const DimerParams& p, Model model, const SemiclassicalOptions& opts) {
  const cplx a = s.a, b = s.b;
  Eigen::Matrix4d jac;
  const std::array<std::pair<cplx, cplx>, 4> dirs{{{1.0, 0.0}, {I, 0.0}, {0.0, 1.0}, {0.0, I}}};
  for (int k = 0; k < 4; ++k) {
    const cplx da = dirs[k].first, db = dirs[k].second;
    cplx fa, fb;
    if (is_gain_saturation(model)) {
      const double b2 = std::norm(b);
      const double g = gain_factor(b2, p.n_star, opts.saturation_exponent);
      const double dg = -opts.saturation_exponent * std::pow(1.0 + b2 / p.n_star, -opts.saturation_exponent - 1.0) *
                        (2.0 * std::real(std::conj(b) * db) / p.n_star);
      fa = -I * p.J * db - I * p.delta * da - 0.5 * p.kappa_a * da;
      fb = -I * p.J * da + I * p.delta * db + 0.5 * p.kappa_b * (g * db + dg * b);
    } else {
      const double coef = hop_density_coefficient(p, model);
      const double jn = p.J * (1.0 + coef * s.density());
      const double djn = p.J * coef * 2.0 * (std::real(std::conj(a) * da) + std::real(std::conj(b) * db));
      fa = -I * (djn * b + jn * db) - I * p.delta * da - 0.5 * p.kappa_a * da;
      fb = -I * (djn * a + jn * da) + I * p.delta * db + 0.5 * p.kappa_b * db;
      if (opts.retain_conserved_term) {
        const double kk = p.J * 0.5 / p.n_star;
        const double x = 2.0 * std::real(std::conj(a) * b);
        const double dx = 2.0 * std::real(std::conj(da) * b + std::conj(a) * db);
        fa += -I * kk * (dx * a + x * da);
        fb += -I * kk * (dx * b + x * db);
      }
    }
    jac.col(k) << fa.real(), fa.imag(), fb.real(), fb.imag();
  }
  return jac;
}

std::vector<cplx> jacobian_spectrum(const SemiclassicalState& s, const DimerParams& p, Model model, const SemiclassicalOptions& opts) {
  Eigen::EigenSolver<Eigen::Matrix4d> es(semiclassical_jacobian(s, p, model, opts), false);
  std::vector<cplx> ev(es.eigenvalues().data(), es.eigenvalues().data() + 4);
  std::sort(ev.begin(), ev.end(), [](cplx x, cplx y) { return x.real() < y.real() || (x.real() == y.real() && x.imag() < y.imag()); });
  return ev;
}

std::vector<cplx> jacobian_spectrum(const MeanFieldState& s, const DimerParams& p) {
  Eigen::EigenSolver<Eigen::Matrix3d> es(mean_field_jacobian(s, p), false);
  std::vector<cplx> ev(es.eigenvalues().data(), es.eigenvalues().data() + 3);
  std::sort(ev.begin(), ev.end(), [](cplx x, cplx y) { return x.real() < y.real() || (x.real() == y.real() && x.imag() < y.imag()); });
  return ev;
}

std::optional<std::array<cplx, 2>> density_block_closed_form(const DimerParams& p) {
  const double diff = p.kappa_a - p.kappa_b;
  if (std::abs(diff) <= 1e-14 * std::max(p.kappa_a, p.kappa_b)) return std::nullopt;
  const double s = std::sqrt(p.kappa_a * p.kappa_b);
  const cplx root = std::sqrt(cplx(1.0 + 16.0 * s * (2.0 * p.J - s) / (diff * diff), 0.0));
  const double pref = -diff / 4.0;
  return sorted_pair(pref * (1.0 + root), pref * (1.0 - root));
}

DensityBlockSpectrum density_block_spectrum(const DimerParams& p) {
  const auto fp = lasing_fixed_point(p, Model::NonlinearHop);
  if (!fp) throw std::domain_error("density_block_spectrum: no lasing fixed point for these parameters");
  // At a = rho_a, b = i rho_b the amplitude fluctuations are Re(delta a) and
  // Im(delta b); at linear order they decouple from the two phases.
  const Eigen::Matrix4d jac = semiclassical_jacobian(*fp, p, Model::NonlinearHop);
  Eigen::Matrix2d block;
  block << jac(0, 0), jac(0, 3), jac(3, 0), jac(3, 3);
  Eigen::EigenSolver<Eigen::Matrix2d> es(block, false);
  DensityBlockSpectrum out;
  out.numeric = sorted_pair(es.eigenvalues()(0), es.eigenvalues()(1));
  out.closed_form = density_block_closed_form(p);
  out.closed_form_degenerate = !out.closed_form.has_value();
  return out;
}

Eigen::Matrix2cd detuned_hop_matrix(const DimerParams& p, double n) {
  const double jn = p.J * (1.0 + n / p.n_star);
  Eigen::Matrix2cd d;
  d << -I * p.delta - 0.5 * p.kappa_a, -I * jn, -I * jn, I * p.delta + 0.5 * p.kappa_b;
  return d;
}

Eigen::Matrix2cd detuned_gain_sat_matrix(const DimerParams& p, double b_abs, double exponent) {
  const double g = gain_factor(b_abs * b_abs, p.n_star, exponent);
  Eigen::Matrix2cd d;
  d << -I * p.delta - 0.5 * p.kappa_a, -I * p.J, -I * p.J, I * p.delta + 0.5 * p.kappa_b * g;
  return d;
}

std::array<cplx, 2> detuned_hop_eigenvalues(const DimerParams& p, double n) {
  const double jn = p.J * (1.0 + n / p.n_star);
  const cplx w = I * p.delta + 0.25 * (p.kappa_a + p.kappa_b);
  const cplx root = std::sqrt(w * w - jn * jn);
  const double shift = 0.25 * (p.kappa_b - p.kappa_a);
  return sorted_pair(shift + root, shift - root);
}

InstabilityCertificate instability_certificate(const DimerParams& p, double n_max, std::size_t grid_points) {
  if (!(n_max > 0.0)) throw std::invalid_argument("instability_certificate: n_max must be > 0");
  if (grid_points < 2) throw std::invalid_argument("instability_certificate: need at least two grid points");
  p.validate(true);
  const double scale = p.J + p.kappa_a + p.kappa_b + std::abs(p.delta);
  const double tol = 1e-12 * scale;
  auto max_real = [](const Eigen::Matrix2cd& m) {
    Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(m, false);
    return std::max(es.eigenvalues()(0).real(), es.eigenvalues()(1).real());
  };

  InstabilityCertificate cert;
  cert.grid_points = grid_points;
  cert.witness_max_real = std::numeric_limits<double>::infinity();
  // n = 0 plus a logarithmic grid up to n_max.
  const double lo = std::log(n_max * 1e-8), hi = std::log(n_max);
  double max_abs = 0.0;
  for (std::size_t k = 0; k < grid_points; ++k) {
    const double n = k == 0 ? 0.0 : std::exp(lo + (hi - lo) * static_cast<double>(k - 1) / static_cast<double>(grid_points - 2));
    const double mr = max_real(detuned_hop_matrix(p, n));
    max_abs = std::max(max_abs, std::abs(mr));
    if (mr < cert.witness_max_real) {
      cert.witness_max_real = mr;
      cert.witness_n = n;
    }
  }
  if (cert.witness_max_real > tol) {
    cert.hop_verdict = StabilityVerdict::Unstable;
  } else if (cert.witness_max_real >= -tol) {
    cert.hop_verdict = StabilityVerdict::Marginal;
  } else {
    cert.hop_verdict = StabilityVerdict::Stable;
  }
  cert.unstable_everywhere = cert.hop_verdict == StabilityVerdict::Unstable;

  // Gain saturation: look for a |b| where the spectrum is negative definite.
  const std::size_t nb = 2000;
  for (std::size_t k = 0; k < nb; ++k) {
    const double x = std::pow(10.0, -6.0 + 14.0 * static_cast<double>(k) / static_cast<double>(nb - 1));
    const double b_abs = std::sqrt(x * p.n_star);
    const double mr = max_real(detuned_gain_sat_matrix(p, b_abs));
    if (mr < -tol) {
      cert.gain_sat_stabilizes = true;
      cert.gain_sat_witness_b = b_abs;
      cert.gain_sat_max_real = mr;
      break;
    }
  }
  return cert;
}

// --- integration -----------------------------------------------------------

namespace odeint = boost::numeric::odeint;

SemiclassicalState integrate_semiclassical(const SemiclassicalState& s0, const DimerParams& p, Model model, double t_final,
                                           const SemiclassicalOptions& opts) {
  using State = std::array<double, 4>;
  State x{s0.a.real(), s0.a.imag(), s0.b.real(), s0.b.imag()};
  auto sys = [&](const State& y, State& dy, double) {
    const SemiclassicalState d = semiclassical_rhs({cplx(y[0], y[1]), cplx(y[2], y[3])}, p, model, opts);
    dy = {d.a.real(), d.a.imag(), d.b.real(), d.b.imag()};
  };
  auto stepper = odeint::make_controlled(1e-12, 1e-12, odeint::runge_kutta_dopri5<State>());
  odeint::integrate_adaptive(stepper, sys, x, 0.0, t_final, 1e-3);
  return {cplx(x[0], x[1]), cplx(x[2], x[3])};
}

MeanFieldState integrate_mean_field(const MeanFieldState& s0, const DimerParams& p, double t_final) {
  using State = std::array<double, 3>;
  State x{s0.n_a, s0.n_b, s0.c};
  auto sys = [&](const State& y, State& dy, double) {
    const MeanFieldState d = mean_field_rhs({y[0], y[1], y[2]}, p);
    dy = {d.n_a, d.n_b, d.c};
  };
  auto stepper = odeint::make_controlled(1e-12, 1e-12, odeint::runge_kutta_dopri5<State>());
  odeint::integrate_adaptive(stepper, sys, x, 0.0, t_final, 1e-3);
  return {x[0], x[1], x[2]};
}

// --- Langevin --------------------------------------------------------------

Trajectory langevin_simulate(const DimerParams& p, std::uint64_t seed, const LangevinOptions& opts) {
  p.validate(true);
  if (!(opts.dt > 0.0) || !(opts.t_max > 0.0) || opts.burn_in < 0.0 || !(opts.sample_interval > 0.0)) {
    throw std::invalid_argument("langevin_simulate: dt, t_max and sample_interval must be > 0, burn_in >= 0");
  }
  SemiclassicalState x;
  if (opts.initial) {
    x = *opts.initial;
  } else if (auto fp = lasing_fixed_point(p, opts.model, opts.semiclassical)) {
    x = *fp;
  } else {
    x = {cplx(0.1, 0.0), cplx(0.0, 0.1)};
  }
  double fastest = std::max(p.kappa_a, p.kappa_b);
  if (!is_gain_saturation(opts.model)) {
    double n_ref = x.density();
    if (p.lasing() && p.delta == 0.0) n_ref = std::max(n_ref, (p.threshold_ratio() - 1.0) / hop_density_coefficient(p, opts.model));
    fastest = std::max(fastest, p.J * (1.0 + hop_density_coefficient(p, opts.model) * n_ref));
  } else {
    fastest = std::max(fastest, p.J);
  }
  fastest = std::max(fastest, std::abs(p.delta));
  if (opts.dt * fastest > 0.05 * (1.0 + 1e-12)) {
    throw std::invalid_argument("langevin_simulate: dt must resolve the fastest rate by a factor of at least 20");
  }

  const auto burn_steps = static_cast<long long>(std::llround(opts.burn_in / opts.dt));
  const auto steps = static_cast<long long>(std::llround(opts.t_max / opts.dt));
  const long long every = std::max<long long>(1, std::llround(opts.sample_interval / opts.dt));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double sigma = std::sqrt(0.5 * opts.dt) * opts.noise_scale;
  const double amp_a = std::sqrt(p.kappa_a) * sigma;
  const double amp_b = std::sqrt(p.kappa_b) * sigma;

  Trajectory traj;
  traj.times.reserve(static_cast<size_t>(steps / every + 1));
  traj.states.reserve(static_cast<size_t>(steps / every + 1));
  for (long long k = -burn_steps; k <= steps; ++k) {
    if (k >= 0 && k % every == 0) {
      traj.times.push_back(static_cast<double>(k) * opts.dt);
      traj.states.push_back(x);
    }
    if (k == steps) break;
    const SemiclassicalState f = semiclassical_rhs(x, p, opts.model, opts.semiclassical);
    x.a += f.a * opts.dt;
    x.b += f.b * opts.dt;
    if (sigma > 0.0) {
      const double r1 = gauss(rng), r2 = gauss(rng), r3 = gauss(rng), r4 = gauss(rng);
      x.a += amp_a * cplx(r1, r2);
      x.b += amp_b * cplx(r3, r4);
    }
    const double m = std::max(std::abs(x.a), std::abs(x.b));
    if (!std::isfinite(m) || m > opts.overflow_guard) {
      throw DynamicalInstabilityError("langevin_simulate: dynamically unstable, amplitude exceeded overflow guard",
                                      static_cast<double>(k + 1) * opts.dt);
    }
  }
  return traj;
}

std::vector<Trajectory> langevin_ensemble(const DimerParams& p, std::uint64_t seed, std::size_t count, const LangevinOptions& opts) {
  std::vector<Trajectory> out(count);
  parallel_for(count, [&](std::size_t i) { out[i] = langevin_simulate(p, counter_seed(seed, i), opts); });
  return out;
}

namespace {

double ols_slope(const std::vector<double>& x, const std::vector<double>& y, std::size_t from) {
  const std::size_t n = x.size() - from;
  double mx = 0.0, my = 0.0;
  for (std::size_t k = from; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = from; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
  }
  return sxy / sxx;
}

}  // namespace

PhaseDiffusionEstimate phase_diffusion_estimate(const std::vector<Trajectory>& trajectories, const PhaseDiffusionOptions& opts) {
  const std::size_t m = trajectories.size();
  if (m < opts.min_trajectories) {
    throw std::invalid_argument("phase_diffusion_estimate: need at least " + std::to_string(opts.min_trajectories) + " trajectories");
  }
  const std::size_t k_len = trajectories.front().states.size();
  if (k_len < 4) throw std::invalid_argument("phase_diffusion_estimate: trajectories are too short");
  for (const auto& t : trajectories) {
    if (t.states.size() != k_len) throw std::invalid_argument("phase_diffusion_estimate: trajectories differ in length");
  }

  // Squared unwrapped phase displacement, one row per trajectory.
  std::vector<std::vector<double>> disp2(m, std::vector<double>(k_len));
  double early = 0.0, late = 0.0;
  const std::size_t half = k_len / 2;
  for (std::size_t j = 0; j < m; ++j) {
    const auto& st = trajectories[j].states;
    double phi = 0.0;
    double prev = std::arg(st[0].a);
    disp2[j][0] = 0.0;
    for (std::size_t k = 1; k < k_len; ++k) {
      const double cur = std::arg(st[k].a);
      phi += std::remainder(cur - prev, 2.0 * M_PI);
      prev = cur;
      disp2[j][k] = phi * phi;
    }
    for (std::size_t k = 0; k < k_len; ++k) (k < half ? early : late) += st[k].density();
  }
  early /= static_cast<double>(m * half);
  late /= static_cast<double>(m * (k_len - half));
  if (std::abs(late - early) > opts.stationarity_tol * std::max(std::abs(early), 1e-300)) {
    throw std::runtime_error("phase_diffusion_estimate: densities are not stationary over the window");
  }

  PhaseDiffusionEstimate est;
  est.trajectories = m;
  est.times = trajectories.front().times;
  auto msd_of = [&](const std::vector<std::size_t>& pick) {
    std::vector<double> msd(k_len, 0.0);
    for (std::size_t j : pick)
      for (std::size_t k = 0; k < k_len; ++k) msd[k] += disp2[j][k];
    for (double& v : msd) v /= static_cast<double>(pick.size());
    return msd;
  };
  std::vector<std::size_t> all(m);
  std::iota(all.begin(), all.end(), std::size_t{0});
  est.msd = msd_of(all);
  est.diffusion = ols_slope(est.times, est.msd, half);

  if (opts.bootstrap_samples > 1) {
    std::mt19937_64 rng(opts.bootstrap_seed);
    std::uniform_int_distribution<std::size_t> pick_one(0, m - 1);
    std::vector<double> slopes;
    slopes.reserve(opts.bootstrap_samples);
    std::vector<std::size_t> pick(m);
    for (std::size_t b = 0; b < opts.bootstrap_samples; ++b) {
      for (auto& v : pick) v = pick_one(rng);
      slopes.push_back(ols_slope(est.times, msd_of(pick), half));
    }
    const double mean = std::accumulate(slopes.begin(), slopes.end(), 0.0) / static_cast<double>(slopes.size());
    double var = 0.0;
    for (double s : slopes) var += (s - mean) * (s - mean);
    est.standard_error = std::sqrt(var / static_cast<double>(slopes.size() - 1));
  }
  return est;
}

double linearized_phase_diffusion(const DimerParams& p) {
  if (!(p.kappa_a > p.kappa_b)) throw std::domain_error("linearized_phase_diffusion: requires kappa_a > kappa_b");
  const auto fp = lasing_fixed_point(p, Model::NonlinearHop);
  if (!fp) throw std::domain_error("linearized_phase_diffusion: no lasing fixed point");
  const double rho_a2 = std::norm(fp->a);
  const double r = p.kappa_b / p.kappa_a;
  return p.kappa_a / rho_a2 * r * r / ((1.0 - r) * (1.0 - r));
}

// --- exact vs mean field -----------------------------------------------------

std::array<int, 2> default_dims(const DimerParams& p) {
  std::array<double, 2> expected{1.0, 1.0};
  const MeanFieldSteadyState mf = mean_field_steady_state(p);
  expected = {mf.split.n_a, mf.split.n_b};
  return {static_cast<int>(std::ceil(3.0 * expected[0] + 10.0)), static_cast<int>(std::ceil(3.0 * expected[1] + 10.0))};
}

std::vector<ScanPoint> mf_vs_exact_scan(const std::vector<DimerParams>& grid, const std::vector<std::array<int, 2>>& dims,
                                        const ScanOptions& opts) {
  if (!dims.empty() && dims.size() != grid.size()) throw std::invalid_argument("mf_vs_exact_scan: dims must be empty or match the grid");
  std::vector<ScanPoint> out;
  out.reserve(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    ScanPoint pt;
    pt.params = grid[k];
    std::array<int, 2> d = dims.empty() ? default_dims(grid[k]) : dims[k];
    pt.n_mean_field = mean_field_steady_state(grid[k]).n_total;
    for (int attempt = 0; attempt <= opts.max_refinements; ++attempt) {
      if (attempt > 0) {
        for (int& v : d) v = static_cast<int>(std::ceil(opts.growth * v));
      }
      pt.dim_a = d[0];
      pt.dim_b = d[1];
      const OpenSystem sys = build_dimer_model(grid[k], d[0], d[1]);
      const Liouvillian liou = sys.liouvillian();
      SteadyStateOptions so;
      so.tol = opts.solver_tol;
      so.dense_threshold = opts.dense_threshold;
      so.charges = sys.space().total_number();
      try {
        const SteadyStateResult res = solve_steady_state(liou, so);
        const DimerObservables obs = dimer_observables(sys.space());
        pt.n_exact = expectation(res.rho, obs.n_a + obs.n_b).real();
        pt.hop_expectation = expectation(res.rho, obs.hop).real();
        pt.edge_population = truncation_edge_population(res.rho);
        pt.error = std::abs(pt.n_exact - pt.n_mean_field);
        pt.converged = pt.edge_population < opts.edge_tol;
      } catch (const SolverError&) {
        pt.n_exact = std::numeric_limits<double>::quiet_NaN();
        pt.error = std::numeric_limits<double>::quiet_NaN();
        pt.edge_population = std::numeric_limits<double>::quiet_NaN();
        pt.converged = false;
        break;
      }
      if (pt.converged) break;
    }
    pt.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(pt);
  }
  return out;
}

PowerLawFit fit_error_scaling(const std::vector<ScanPoint>& points) {
  std::vector<double> x, y;
  for (const auto& p : points) {
    if (p.converged && p.error > 0.0 && p.n_exact > 0.0) {
      x.push_back(std::log(p.n_exact));
      y.push_back(std::log(p.error));
    }
  }
  PowerLawFit fit;
  fit.points = x.size();
  if (x.size() < 2) throw std::invalid_argument("fit_error_scaling: need at least two converged points");
  fit.slope = ols_slope(x, y, 0);
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  fit.intercept = my - fit.slope * mx;
  if (x.size() > 2) {
    double rss = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double r = y[k] - (fit.intercept + fit.slope * x[k]);
      rss += r * r;
      sxx += (x[k] - mx) * (x[k] - mx);
    }
    fit.slope_stderr = std::sqrt(rss / static_cast<double>(x.size() - 2) / sxx);
  }
  return fit;
}

}  // namespace symbreak::dimer
