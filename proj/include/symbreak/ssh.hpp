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
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "symbreak/lindblad.hpp"

namespace symbreak::ssh {

// Where the extra loss `gamma` acts. Pumped is the sublattice carrying the
// gain and the edge mode (odd sites); Lossy is the even-site sublattice,
// where gamma only renormalizes kappa.
enum class ExtraLossSite { Pumped, Lossy };

// Driven-dissipative SSH chain with Kerr interactions. Sites are numbered
// 1..N (0-based index i-1 in every vector). Odd sites form sublattice A and
// receive incoherent gain eta^2 kappa; even sites form sublattice B with loss
// kappa. Bonds alternate J (1 + delta), J (1 - delta), starting from site 1,
// so the chain is topological (edge mode on the left) for delta < 0.
struct SSHParams {
  int N = 5;
  double J = 1.0;
  double delta = -0.5;
  double U = 1.0;
  double kappa = 1.0;
  double eta = 0.1;
  double gamma = 0.0;
  ExtraLossSite extra_loss_site = ExtraLossSite::Pumped;
  // Kerr term on sublattice A only instead of every site.
  bool kerr_on_pumped_only = false;

  void validate() const;
  bool topological() const { return delta < 0.0; }
  // Edge-mode amplitude ratio per unit cell, (1 + delta) / (1 - delta).
  double xi() const;
  // eta = eta' xi^2.
  double eta_prime() const;

  static double delta_from_xi(double xi);
};

// True for sublattice A (odd sites, 1-based).
inline bool is_pumped_site(int zero_based) { return zero_based % 2 == 0; }

struct ModeDecomposition {
  Eigen::VectorXd energies;           // ascending
  Eigen::MatrixXcd wavefunctions;     // column alpha is psi_alpha over sites
  std::vector<int> chiral_partner;    // alpha -> -alpha
  std::optional<int> zero_mode_index;  // set when exactly one zero mode exists
  double unitarity_error = 0.0;
  double pairing_error = 0.0;

  // psi_alpha[i] (0-based site).
  cplx psi(int alpha, int site) const { return wavefunctions(site, alpha); }
};

struct ChiralModel {
  Eigen::MatrixXcd hamiltonian;  // single-particle matrix h, H = a^dag h a
  Eigen::VectorXd chiral;        // +1 on A, -1 on B
  ModeDecomposition modes;
};

// Hopping matrix of an open chain with `sites` sites and alternating bonds
// -J (1 + delta), -J (1 - delta). Works for any length; build_ssh adds the
// odd-N requirement.
Eigen::MatrixXcd ssh_hopping_matrix(int sites, double J, double delta);

// Alternating +1/-1 starting with +1 on the first site.
Eigen::VectorXd sublattice_signs(int sites);

// Diagonalizes a chiral-symmetric h. Negative-energy modes are built from the
// positive ones as S psi so the pairing is exact; zero modes are projected
// onto one sublattice. Throws std::invalid_argument if S h S != -h.
ModeDecomposition decompose_chiral(const Eigen::MatrixXcd& h, const Eigen::VectorXd& chiral, double zero_tol = 1e-9);

// Throws std::invalid_argument for even N or invalid parameters.
ChiralModel build_ssh(const SSHParams& p);

// psi_0[i] = sqrt(1 - xi^2) sin(pi i / 2) xi^((i-1)/2), renormalized on the
// finite chain. Throws std::domain_error outside the topological phase.
Eigen::VectorXd edge_wavefunction(const SSHParams& p);

// Lindblad model with per-site truncation `dim`.
OpenSystem build_ssh_system(const SSHParams& p, int dim);

// Frobenius norm of the difference between the superoperators built from the
// site-basis jumps {sqrt(eta^2 kappa) a_i^dag (i in A), sqrt(kappa) a_j (j in B)}
// and the mode-basis jumps {1/2 sqrt(eta^2 kappa) (d^dag + U d^dag U^dag),
// 1/2 sqrt(kappa) (d - U d U^dag)} over every mode. The Hamiltonian is
// a^dag h a in both. Throws std::length_error when dim^sites exceeds
// `max_hilbert_dim`.
double dissipator_mode_identity_check(const Eigen::MatrixXcd& h, const Eigen::VectorXd& chiral, double kappa, double eta,
                                      int dim, Index max_hilbert_dim = 256);
double dissipator_mode_identity_check(const SSHParams& p, int dim, Index max_hilbert_dim = 256);

// Random nearest-and-beyond-neighbour chiral Hamiltonian on `sites` sites
// (only A-B couplings, complex amplitudes). Deterministic in `seed`.
Eigen::MatrixXcd random_chiral_hamiltonian(int sites, unsigned long long seed);

// Mode occupations <d_alpha^dag d_alpha> of the Gaussian steady state of the
// non-interacting chain, from the Lyapunov equation for <a_i^dag a_j>.
// Throws std::domain_error if the linear dynamics has no steady state.
struct ThermalResult {
  Eigen::VectorXd energies;
  Eigen::VectorXd occupations;
  Eigen::MatrixXcd correlations;
};
ThermalResult thermal_mode_occupations(const Eigen::MatrixXcd& h, const Eigen::VectorXd& chiral, double kappa, double eta);

inline double thermal_occupation(double eta) { return eta * eta / (1.0 - eta * eta); }

// Semiclassical equations on v = (a_1, b_1, a_2, ..., a_last):
//   da_i/dt = -i J (1 + delta) b_i - i J (1 - delta) b_{i-1} - i U |a_i|^2 a_i + kappa eta^2 / 2 a_i
//   db_i/dt = -i J (1 + delta) a_i - i J (1 - delta) a_{i+1} - i U |b_i|^2 b_i - kappa / 2 b_i
// with missing neighbours set to zero. The hopping sign is the opposite of
// ssh_hopping_matrix; the two differ by the gauge b -> -b. gamma adds -gamma/2
// on its sublattice.
Eigen::VectorXcd semiclassical_rhs(const Eigen::VectorXcd& v, const SSHParams& p);

// D(v) with dv/dt = D(v) v.
Eigen::MatrixXcd dynamical_matrix(const Eigen::VectorXcd& v, const SSHParams& p);

// Dense-output integration with dopri5 (rtol = atol = tol). Samples at every
// time in `times` (increasing, starting at or after 0).
std::vector<Eigen::VectorXcd> integrate_semiclassical(const SSHParams& p, const Eigen::VectorXcd& v0,
                                                      const std::vector<double>& times, double tol = 1e-10);

class LimitCycleError : public std::runtime_error {
 public:
  LimitCycleError(const std::string& what, double residual) : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

struct LimitCycleOptions {
  double tol = 1e-8;
  int max_iterations = 200;
  std::optional<Eigen::VectorXcd> initial_guess;
  // Fallback integration length in units of 1 / (kappa eta^2).
  double fallback_time = 400.0;
  // Amplitudes above this are treated as divergence.
  double divergence_amplitude = 1e8;
};

struct LimitCycle {
  Eigen::VectorXcd d0;
  double lambda = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool from_newton = true;
  Eigen::VectorXcd floquet_multipliers;  // excluding the trivial phase multiplier
  bool stable = false;
};

// Solves D(d0) d0 = i lambda d0 with Im(first significant component) = 0.
// Seeded from the self-consistent mean-field edge mode unless an initial guess
// is given. Throws LimitCycleError when neither Newton nor the integration
// fallback converges (in particular for U = 0, where the edge mode grows
// without bound).
LimitCycle limit_cycle_solve(const SSHParams& p, const LimitCycleOptions& options = {});

// Floquet multipliers of the orbit e^{i lambda t} d0 over one period. The
// first entry is the trivial phase mode (closest to 1); the rest are sorted
// by decreasing modulus.
Eigen::VectorXcd floquet_multipliers(const SSHParams& p, const Eigen::VectorXcd& d0, double lambda);

// Frequency of the strongest spectral peak of uniformly sampled complex data
// (Hann window, parabolic refinement on the log magnitude). Sign follows
// exp(i omega t).
double fft_peak_frequency(const std::vector<cplx>& samples, double dt);

struct EdgeModeSolution {
  Eigen::VectorXcd psi;        // normalized, gauge-fixed
  Eigen::VectorXd onsite;      // Delta_i = s |psi_i|^2
  double energy = 0.0;
  double b_overlap = 0.0;      // sum over B sites of |psi_i|^2
  int iterations = 0;
};

struct OverlapPoint {
  double s = 0.0;
  double b_overlap = 0.0;
  double energy = 0.0;
};

struct MeanFieldOptions {
  double mixing = 0.5;
  double tol = 1e-10;
  int max_iterations = 10000;
  double bisection_tol = 1e-8;
  double s_max = 4.0;
  int curve_points = 81;
};

// Fixed point of Delta_i = s |psi_i|^2 with psi the edge eigenvector of
// h + diag(Delta). The edge eigenvector is tracked by overlap from s = 0.
EdgeModeSolution self_consistent_edge_mode(const SSHParams& p, double s, const MeanFieldOptions& options = {});

struct MeanFieldResult {
  double s = 0.0;  // U |d0|^2
  EdgeModeSolution edge;
  std::vector<OverlapPoint> curve;  // on [0, s_max] or up to branch_end
  // Set when the fixed point stops converging before s_max, which happens
  // once the edge level merges with the bulk band.
  std::optional<double> branch_end;
};

// Bisection on s for b_overlap(s) = eta^2. Throws std::domain_error with the
// attained range if eta^2 is not bracketed on the computed curve.
MeanFieldResult mean_field_self_consistent(const SSHParams& p, const MeanFieldOptions& options = {});

struct QuantumSteadyState {
  DensityMatrix rho;
  Eigen::VectorXd site_density;
  double total_density = 0.0;
  double fidelity = 0.0;
  double edge_population = 0.0;
  double residual = 0.0;
};

struct QuantumOptions {
  // At dim 3 the top level holds the physical two-photon weight (~xi^2), so
  // this only catches runaway gain; convergence is certified separately by
  // truncation_convergence.
  double edge_tol = 0.05;
  double solver_tol = 1e-9;
  bool check_degeneracy = false;
  Index dense_threshold = 1024;
};

// Exact steady state within per-site truncation `dim` (N <= 7, dim <= 4).
// Throws SolverError when the truncation edge carries more than edge_tol.
QuantumSteadyState quantum_steady_state(const SSHParams& p, int dim, const QuantumOptions& options = {});

struct TruncationCheck {
  double fidelity_change = 0.0;  // |F(dim + 1) - F(dim)|
  double density_change = 0.0;   // max_i |<n_i>(dim + 1) - <n_i>(dim)|
};

// Compares the steady state at `dim` with the one at dim + 1.
TruncationCheck truncation_convergence(const SSHParams& p, int dim, const QuantumOptions& options = {});

// <psi1| rho |psi1> with |psi1> = d0^dag |0>, d0 the zero mode of build_ssh.
double fock_fidelity(const DensityMatrix& rho, const SSHParams& p);

struct RatePrediction {
  double rho0 = 0.0;
  double rho1 = 0.0;
  double rho2 = 0.0;
};
RatePrediction rate_equation_prediction(double xi);

// Single-mode model  L = -i[Delta n + U/2 n^2, .] + kappa_g D[a^dag] + kappa_l D[a] + gamma D[a^2].
struct SingleModeParams {
  double kappa_g = 1.0;
  double kappa_l = 0.0;
  double gamma = 1.0;
  double Delta = 0.0;
  double U = 0.0;
};

struct SingleModeResult {
  DensityMatrix rho;
  double fidelity = 0.0;  // <1| rho |1>
  double root_fidelity = 0.0;  // sqrt(<1| rho |1>)
  double edge_population = 0.0;
  int dim = 0;
  bool converged = false;  // truncation edge below tolerance
};

// Doubles the truncation from `min_dim` until the top level carries less than
// edge_tol, up to max_dim.
SingleModeResult single_mode_steady_state(const SingleModeParams& p, int min_dim = 8, int max_dim = 256,
                                          double edge_tol = 1e-10);

struct NoGoPoint {
  double gamma_ratio = 0.0;
  double loss_ratio = 0.0;
  double fidelity = 0.0;       // <1| rho |1>
  double root_fidelity = 0.0;  // sqrt(<1| rho |1>)
  bool flagged = false;
};

struct NoGoScan {
  std::vector<NoGoPoint> surface;
  NoGoPoint best;
};

NoGoScan single_mode_no_go_scan(const std::vector<double>& gamma_ratios, const std::vector<double>& loss_ratios,
                                int min_dim = 8);

// Largest entrywise difference between the steady states of two single-mode
// models, solved on the full operator space (no symmetry sectors).
double single_mode_parameter_independence(const SingleModeParams& p, const SingleModeParams& q, int dim);

struct AddedLossOptions {
  int dim = 3;
  int optimizer_budget = 80;
  // Starting point and box for (kappa, eta, xi).
  double kappa0 = 1.0, eta0 = 1e-2, xi0 = 0.1;
  double xi_min = 1e-3, xi_max = 0.6;
  bool optimize_each = false;
};

struct AddedLossPoint {
  double gamma = 0.0;
  double infidelity = 0.0;
  double kappa = 0.0, eta = 0.0, xi = 0.0;
  bool flagged = false;
};

struct AddedLossScan {
  std::vector<AddedLossPoint> points;
  bool monotone = false;
  std::optional<double> slope;  // log-log fit over gamma > 0 (optimize_each only)
};

// Optimizes (kappa, eta, xi) with Nelder-Mead at the smallest gamma
// (or at every gamma with optimize_each), holding J and U from `base`.
AddedLossScan added_loss_scan(const SSHParams& base, const std::vector<double>& gammas,
                              const AddedLossOptions& options = {});

// sum_{alpha != 0} |<0| d_alpha d_0 H_int d_0^dag d_0^dag |0>| = 2 U sum_{alpha != 0} |sum_i psi_alpha[i] psi_0[i]^3|.
double mode_overlap_scaling(const SSHParams& p);

}  // namespace symbreak::ssh
