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


#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "symbreak/lindblad.hpp"

namespace symbreak::dimer {

// Gain/loss dimer with density-dependent hopping
//   H = J (1 + n/(2 n*)) (a^dag b + b^dag a) + delta (a^dag a - b^dag b),
// loss sqrt(kappa_a) a on mode a and incoherent gain sqrt(kappa_b) b^dag on b.
struct DimerParams {
  double J = 1.0;
  double kappa_a = 4.0;
  double kappa_b = 1.5;
  double n_star = 5.0;
  double delta = 0.0;

  // Throws std::invalid_argument for negative or non-finite rates, or for
  // n_star <= 0 when `nonlinear` is set.
  void validate(bool nonlinear = true) const;

  // sqrt(kappa_a kappa_b) / (2 J); the linear dynamics is unstable above 1.
  double threshold_ratio() const;
  bool lasing() const { return threshold_ratio() > 1.0; }
};

// Densities and the current c = i <a^dag b - b^dag a>.
struct MeanFieldState {
  double n_a = 0.0;
  double n_b = 0.0;
  double c = 0.0;
};

struct SemiclassicalState {
  cplx a{};
  cplx b{};
  double density() const { return std::norm(a) + std::norm(b); }
};

// Semiclassical model variants. NonlinearHop and DetunedHop differ only in
// the density coefficient of the hopping: 1/(2 n*) and 1/n* respectively.
// GainSat and DetunedGainSat are the same equations; the tag is kept so
// that configuration files can name either. All variants include the
// detuning term when DimerParams::delta is non-zero.
enum class Model { NonlinearHop, GainSat, DetunedHop, DetunedGainSat };

Model parse_model(std::string_view name);
std::string model_name(Model model);
bool is_gain_saturation(Model model);

// Gain law kappa_b (1 + |b|^2 / n*)^(-exponent) for the gain-saturation
// models.
struct GainSatParams {
  DimerParams dimer;
  double exponent = 1.0;
};

struct SemiclassicalOptions {
  // Keep the -i J z (a* b + b* a) / (2 n*) terms that follow from the
  // Hamiltonian but vanish at every fixed point. Off by default.
  bool retain_conserved_term = false;
  double saturation_exponent = 1.0;
};

// --- exact model -----------------------------------------------------------

OpenSystem build_dimer_model(const DimerParams& p, int dim_a, int dim_b);

struct DimerObservables {
  SparseOperator n_a;
  SparseOperator n_b;
  SparseOperator current;  // i (a^dag b - b^dag a)
  SparseOperator hop;      // a^dag b + b^dag a
};
DimerObservables dimer_observables(const FockSpace& space);

// --- mean field (Gaussian closure of the moment equations) -----------------

// d/dt (n_a, n_b, c) with Jt = J (1 + 1/(2 n*)) + J (n_a + n_b) / n*:
//   n_a' = -Jt c - kappa_a n_a
//   n_b' =  Jt c + kappa_b n_b + kappa_b
//   c'   =  2 Jt (n_a - n_b) - (kappa_a - kappa_b) c / 2
MeanFieldState mean_field_rhs(const MeanFieldState& s, const DimerParams& p);
Eigen::Matrix3d mean_field_jacobian(const MeanFieldState& s, const DimerParams& p);

// Stationary point of mean_field_rhs. Requires kappa_a > kappa_b (otherwise
// there is no bounded stationary point) and returns nullopt if it fails.
std::optional<MeanFieldState> mean_field_fixed_point(const DimerParams& p);

enum class Branch { Lasing, Trivial };
std::string branch_name(Branch b);

struct MeanFieldSteadyState {
  Branch branch = Branch::Trivial;
  // Lasing branch: n / (2 n*) = sqrt(kappa_a kappa_b) / (2 J) - 1.
  // Trivial branch: the spontaneous-emission level of the moment equations.
  double n_total = 0.0;
  // n_total split between the modes, with the current at that point.
  MeanFieldState split;
  // Stationary point of the closed moment equations, when it exists.
  std::optional<MeanFieldState> moment_fixed_point;
};
MeanFieldSteadyState mean_field_steady_state(const DimerParams& p);

// --- semiclassical amplitudes ----------------------------------------------

SemiclassicalState semiclassical_rhs(const SemiclassicalState& s, const DimerParams& p, Model model,
                                     const SemiclassicalOptions& opts = {});

// Non-trivial fixed point with a real and b purely imaginary, or nullopt
// when it does not exist (below threshold, or detuned variants with
// delta != 0 which have no stationary solution).
std::optional<SemiclassicalState> lasing_fixed_point(const DimerParams& p, Model model, const SemiclassicalOptions& opts = {});

// Real 4x4 Jacobian in the coordinates (Re a, Im a, Re b, Im b).
Eigen::Matrix4d semiclassical_jacobian(const SemiclassicalState& s, const DimerParams& p, Model model,
                                       const SemiclassicalOptions& opts = {});

std::vector<cplx> jacobian_spectrum(const SemiclassicalState& s, const DimerParams& p, Model model,
                                    const SemiclassicalOptions& opts = {});
std::vector<cplx> jacobian_spectrum(const MeanFieldState& s, const DimerParams& p);

// Linearization of the amplitude fluctuations (delta rho_a, delta rho_b)
// about the nonlinear-hop lasing fixed point. `closed_form` is
//   -(kappa_a - kappa_b)/4 * (1 +- sqrt(1 + 16 sqrt(ka kb) (2J - sqrt(ka kb)) / (ka - kb)^2))
// and is absent when kappa_a == kappa_b.
struct DensityBlockSpectrum {
  std::array<cplx, 2> numeric{};
  std::optional<std::array<cplx, 2>> closed_form;
  bool closed_form_degenerate = false;
};
DensityBlockSpectrum density_block_spectrum(const DimerParams& p);
std::optional<std::array<cplx, 2>> density_block_closed_form(const DimerParams& p);

// Linear dynamical matrices of the detuned variants at fixed density n (or
// fixed |b| for gain saturation).
Eigen::Matrix2cd detuned_hop_matrix(const DimerParams& p, double n);
Eigen::Matrix2cd detuned_gain_sat_matrix(const DimerParams& p, double b_abs, double exponent = 1.0);
// Closed-form spectrum of detuned_hop_matrix with Jn = J (1 + n/n*):
//   (kb - ka)/4 +- sqrt((i delta + (ka + kb)/4)^2 - Jn^2),
// i.e. +-1/2 sqrt((kappa + 2 i delta)^2 - 4 Jn^2) for balanced rates.
std::array<cplx, 2> detuned_hop_eigenvalues(const DimerParams& p, double n);

enum class StabilityVerdict { Unstable, Marginal, Stable };
std::string verdict_name(StabilityVerdict v);

struct InstabilityCertificate {
  StabilityVerdict hop_verdict = StabilityVerdict::Unstable;
  bool unstable_everywhere = false;
  double witness_n = 0.0;         // density where max Re lambda(n) is smallest
  double witness_max_real = 0.0;  // that smallest value
  std::size_t grid_points = 0;
  bool gain_sat_stabilizes = false;
  double gain_sat_witness_b = 0.0;  // |b| with negative-definite spectrum
  double gain_sat_max_real = 0.0;
};
InstabilityCertificate instability_certificate(const DimerParams& p, double n_max, std::size_t grid_points = 4001);

// --- time integration -------------------------------------------------------

SemiclassicalState integrate_semiclassical(const SemiclassicalState& s0, const DimerParams& p, Model model, double t_final,
                                           const SemiclassicalOptions& opts = {});
MeanFieldState integrate_mean_field(const MeanFieldState& s0, const DimerParams& p, double t_final);

class DynamicalInstabilityError : public std::runtime_error {
 public:
  DynamicalInstabilityError(const std::string& what, double time) : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

struct LangevinOptions {
  double t_max = 100.0;
  double dt = 1e-3;
  double burn_in = 0.0;          // discarded before the first sample
  double sample_interval = 0.1;  // rounded to a whole number of steps
  double noise_scale = 1.0;      // 0 gives the deterministic equations
  double overflow_guard = 1e6;
  Model model = Model::NonlinearHop;
  SemiclassicalOptions semiclassical;
  std::optional<SemiclassicalState> initial;  // default: lasing fixed point, else a small seed
};

struct Trajectory {
  std::vector<double> times;  // measured from the end of the burn-in
  std::vector<SemiclassicalState> states;
};

// Euler-Maruyama for
//   da = f_a dt + sqrt(kappa_a) dW_a,  db = f_b dt + sqrt(kappa_b) dW_b,
// where each complex increment dW has independent real and imaginary parts
// of variance dt/2, so that <dW dW*> = dt. Throws std::invalid_argument if
// dt does not resolve the fastest rate by a factor 20, and
// DynamicalInstabilityError when an amplitude exceeds overflow_guard.
Trajectory langevin_simulate(const DimerParams& p, std::uint64_t seed, const LangevinOptions& opts);

// Member i uses counter_seed(seed, i).
std::vector<Trajectory> langevin_ensemble(const DimerParams& p, std::uint64_t seed, std::size_t count, const LangevinOptions& opts);

struct PhaseDiffusionOptions {
  std::size_t min_trajectories = 100;
  std::size_t bootstrap_samples = 200;
  std::uint64_t bootstrap_seed = 1;
  // Maximum relative change of the ensemble density between the first and
  // second half of the window.
  double stationarity_tol = 0.1;
};

struct PhaseDiffusionEstimate {
  double diffusion = 0.0;  // slope of <(phi(t) - phi(0))^2>
  double standard_error = 0.0;
  std::vector<double> times;
  std::vector<double> msd;
  std::size_t trajectories = 0;
};

// Phase of mode a, unwrapped along each trajectory; least-squares slope of
// the ensemble mean-squared displacement over the final half of the window.
PhaseDiffusionEstimate phase_diffusion_estimate(const std::vector<Trajectory>& trajectories, const PhaseDiffusionOptions& opts = {});

// MSD slope of the linearized phase equations with the noise convention of
// langevin_simulate: (kappa_a / rho_a^2) r^2 / (1 - r)^2 with r = kappa_b / kappa_a.
double linearized_phase_diffusion(const DimerParams& p);

// --- exact vs mean field -----------------------------------------------------

struct ScanOptions {
  // A point counts as converged when the population on the top truncation
  // level of either mode is below this.
  double edge_tol = 1e-3;
  // Unconverged points are re-solved with both truncations scaled by
  // `growth`, at most this many times.
  int max_refinements = 4;
  double growth = 1.4;
  Index dense_threshold = 1024;
  double solver_tol = 1e-10;
};

struct ScanPoint {
  DimerParams params;
  int dim_a = 0;
  int dim_b = 0;
  double n_exact = 0.0;
  double n_mean_field = 0.0;
  double error = 0.0;  // |n_exact - n_mean_field|
  double edge_population = 0.0;
  bool converged = false;
  double hop_expectation = 0.0;  // <a^dag b + b^dag a>, zero in steady state
  double seconds = 0.0;
};

// ceil(3 n + 10) per mode, with n the expected mode occupation.
std::array<int, 2> default_dims(const DimerParams& p);

// `dims` may be empty (default_dims for every point) or match `grid`. The
// starting truncation comes from the mean-field split, which underestimates
// the exact photon number, hence the refinement loop.
std::vector<ScanPoint> mf_vs_exact_scan(const std::vector<DimerParams>& grid, const std::vector<std::array<int, 2>>& dims,
                                        const ScanOptions& opts = {});

struct PowerLawFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  std::size_t points = 0;
};
// log|error| against log n_exact over converged points with non-zero error.
PowerLawFit fit_error_scaling(const std::vector<ScanPoint>& points);

}  // namespace symbreak::dimer
