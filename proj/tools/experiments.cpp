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


#include "experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <numeric>
#include <random>

#include <fmt/format.h>

#include "symbreak/parallel.hpp"
#include "symbreak/pt_dimer.hpp"
#include "symbreak/ssh.hpp"

#ifndef SYMBREAK_GIT_REVISION
#define SYMBREAK_GIT_REVISION "unknown"
#endif

namespace symbreak::cli {

namespace {

using dimer::DimerParams;
using ssh::SSHParams;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

KeySpec real_key(std::string name, std::string def, std::string help, bool non_negative = true) {
  return {std::move(name), ValueKind::Real, std::move(def), std::move(help), non_negative};
}
KeySpec int_key(std::string name, std::string def, std::string help) {
  return {std::move(name), ValueKind::Integer, std::move(def), std::move(help), true};
}
KeySpec list_key(std::string name, std::optional<std::string> def, std::string help, bool non_negative = true) {
  return {std::move(name), ValueKind::RealList, std::move(def), std::move(help), non_negative};
}
KeySpec flag_key(std::string name, std::string def, std::string help) {
  return {std::move(name), ValueKind::Flag, std::move(def), std::move(help), false};
}

bool all_negative_real(const std::vector<cplx>& ev) {
  return std::all_of(ev.begin(), ev.end(), [](cplx z) { return z.real() < 0.0; });
}

// Least-squares slope of log y against log x.
std::optional<double> loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k] > 0.0 && y[k] > 0.0 && std::isfinite(x[k]) && std::isfinite(y[k])) {
      lx.push_back(std::log(x[k]));
      ly.push_back(std::log(y[k]));
    }
  }
  if (lx.size() < 2) return std::nullopt;
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / static_cast<double>(lx.size());
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(ly.size());
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxx += (lx[k] - mx) * (lx[k] - mx);
    sxy += (lx[k] - mx) * (ly[k] - my);
  }
  if (sxx == 0.0) return std::nullopt;
  return sxy / sxx;
}

nlohmann::json optional_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

// --- PT dimer ----------------------------------------------------------------

ResultTable run_pt_threshold(const ExperimentConfig& cfg) {
  ResultTable t({"J", "n_mf", "stable", "branch", "n_ode", "ode_rel_error"});
  const auto grid = cfg.reals("J-grid");
  const double t_final = cfg.real("t-final");
  std::size_t lasing_points = 0, exists_mismatch = 0;
  double worst_ode = 0.0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    DimerParams p;
    p.J = grid[k];
    p.kappa_a = cfg.real("kappa-a");
    p.kappa_b = cfg.real("kappa-b");
    p.n_star = cfg.real("n-star");
    p.validate();
    const auto mf = dimer::mean_field_steady_state(p);
    const bool lasing = mf.branch == dimer::Branch::Lasing;
    lasing_points += lasing;
    if (lasing != (2.0 * p.J < std::sqrt(p.kappa_a * p.kappa_b))) ++exists_mismatch;

    bool stable = false;
    if (lasing) {
      const auto db = dimer::density_block_spectrum(p);
      stable = std::all_of(db.numeric.begin(), db.numeric.end(), [](cplx z) { return z.real() < 0.0; });
    } else {
      stable = all_negative_real(dimer::jacobian_spectrum(dimer::SemiclassicalState{}, p, dimer::Model::NonlinearHop));
    }

    std::mt19937_64 rng(counter_seed(cfg.seed, k));
    std::uniform_real_distribution<double> amp(0.2, 2.0);
    const dimer::SemiclassicalState s0{cplx(amp(rng), amp(rng)), cplx(amp(rng), amp(rng))};
    const auto s1 = dimer::integrate_semiclassical(s0, p, dimer::Model::NonlinearHop, t_final);
    const double n_ode = s1.density();
    double rel = kNaN;
    if (lasing) {
      rel = std::abs(n_ode - mf.n_total) / mf.n_total;
      worst_ode = std::max(worst_ode, rel);
    }
    t.add_row({p.J, mf.n_total, stable, dimer::branch_name(mf.branch), n_ode, rel});
  }
  t.summary["lasing_points"] = lasing_points;
  t.summary["threshold_J"] = std::sqrt(cfg.real("kappa-a") * cfg.real("kappa-b")) / 2.0;
  t.summary["branch_existence_mismatches"] = exists_mismatch;
  t.summary["max_ode_rel_error"] = worst_ode;
  return t;
}

ResultTable run_pt_mf_vs_exact(const ExperimentConfig& cfg) {
  ResultTable t({"n_star", "J", "dim_a", "dim_b", "n_exact", "n_mf", "error", "edge_population", "converged", "seconds"});
  std::vector<DimerParams> grid;
  for (double n_star : cfg.reals("n-star")) {
    DimerParams p;
    p.J = cfg.real("J");
    p.kappa_a = cfg.real("kappa-a");
    p.kappa_b = cfg.real("kappa-b");
    p.n_star = n_star;
    p.validate();
    grid.push_back(p);
  }
  dimer::ScanOptions opts;
  opts.edge_tol = cfg.real("edge-tol");
  const auto points = dimer::mf_vs_exact_scan(grid, {}, opts);
  for (const auto& pt : points) {
    t.add_row({pt.params.n_star, pt.params.J, static_cast<long long>(pt.dim_a), static_cast<long long>(pt.dim_b), pt.n_exact,
               pt.n_mean_field, pt.error, pt.edge_population, pt.converged, pt.seconds});
  }
  if (std::count_if(points.begin(), points.end(), [](const auto& p) { return p.converged && p.error > 0.0; }) >= 2) {
    const auto fit = dimer::fit_error_scaling(points);
    t.summary["error_slope"] = fit.slope;
    t.summary["error_slope_stderr"] = fit.slope_stderr;
    t.summary["fit_points"] = fit.points;
  } else {
    t.summary["error_slope"] = nullptr;
  }
  return t;
}

ResultTable run_pt_phase_diffusion(const ExperimentConfig& cfg) {
  ResultTable t({"r", "kappa_b", "J", "n_star", "diffusion", "diffusion_stderr", "diffusion_linear", "trajectories"});
  const double kappa_a = cfg.real("kappa-a");
  const double r0 = cfg.real("pump-ratio");
  const double rho_a2 = cfg.real("rho-a-sq");
  if (r0 <= 1.0) throw ConfigError("'pump-ratio' must exceed 1 (lasing regime)");
  dimer::LangevinOptions lo;
  lo.t_max = cfg.real("t-max");
  lo.dt = cfg.real("dt");
  lo.burn_in = cfg.real("burn-in");
  lo.sample_interval = cfg.real("sample-interval");
  const auto count = static_cast<std::size_t>(cfg.integer("trajectories"));
  dimer::PhaseDiffusionOptions po;
  po.min_trajectories = std::min<std::size_t>(count, po.min_trajectories);
  po.bootstrap_seed = cfg.seed;

  std::vector<double> rs, ds, dl;
  for (double r : cfg.reals("r")) {
    if (r <= 0.0 || r >= 1.0) throw ConfigError("'r' entries must lie in (0, 1)");
    DimerParams p;
    p.kappa_a = kappa_a;
    p.kappa_b = r * kappa_a;
    p.J = std::sqrt(p.kappa_a * p.kappa_b) / (2.0 * r0);
    // Fixes rho_a^2 = 2 n* kappa_b / (kappa_a + kappa_b) (r0 - 1) across r.
    p.n_star = rho_a2 * (p.kappa_a + p.kappa_b) / (2.0 * p.kappa_b * (r0 - 1.0));
    p.validate();
    const auto ens = dimer::langevin_ensemble(p, counter_seed(cfg.seed, rs.size()), count, lo);
    const auto est = dimer::phase_diffusion_estimate(ens, po);
    const double lin = dimer::linearized_phase_diffusion(p);
    t.add_row({r, p.kappa_b, p.J, p.n_star, est.diffusion, est.standard_error, lin, static_cast<long long>(est.trajectories)});
    rs.push_back(r);
    ds.push_back(est.diffusion);
    dl.push_back(lin);
  }
  if (rs.size() >= 2) {
    const auto shape = [](double r) { return r * r / ((1.0 - r) * (1.0 - r)); };
    t.summary["ratio_measured"] = ds.back() / ds.front();
    t.summary["ratio_predicted"] = shape(rs.back()) / shape(rs.front());
  }
  return t;
}

ResultTable run_pt_gain_sat_compare(const ExperimentConfig& cfg) {
  ResultTable t({"delta", "n", "hop_max_re", "gain_sat_max_re"});
  const double n_max = cfg.real("n-max");
  const double n_min = cfg.real("n-min");
  const auto points = static_cast<std::size_t>(cfg.integer("points"));
  if (n_min <= 0.0 || n_max <= n_min || points < 2) throw ConfigError("need 0 < n-min < n-max and points >= 2");
  nlohmann::json certs = nlohmann::json::array();
  for (double delta : cfg.reals("delta")) {
    DimerParams p;
    p.J = cfg.real("J");
    p.kappa_a = p.kappa_b = cfg.real("kappa");
    p.n_star = cfg.real("n-star");
    p.delta = delta;
    p.validate();
    for (std::size_t k = 0; k < points; ++k) {
      const double n = n_min * std::pow(n_max / n_min, static_cast<double>(k) / static_cast<double>(points - 1));
      const auto ev = dimer::detuned_hop_eigenvalues(p, n);
      const Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(dimer::detuned_gain_sat_matrix(p, std::sqrt(n)));
      t.add_row({delta, n, std::max(ev[0].real(), ev[1].real()), es.eigenvalues().real().maxCoeff()});
    }
    const auto cert = dimer::instability_certificate(p, n_max);
    certs.push_back({{"delta", delta},
                     {"hop_verdict", dimer::verdict_name(cert.hop_verdict)},
                     {"hop_unstable_everywhere", cert.unstable_everywhere},
                     {"hop_min_max_real", cert.witness_max_real},
                     {"hop_witness_n", cert.witness_n},
                     {"gain_sat_stabilizes", cert.gain_sat_stabilizes},
                     {"gain_sat_witness_b", cert.gain_sat_witness_b},
                     {"gain_sat_max_real", cert.gain_sat_max_real}});
  }
  t.summary["certificates"] = certs;
  return t;
}

// --- SSH chain -----------------------------------------------------------------

SSHParams ssh_params(const ExperimentConfig& cfg) {
  SSHParams p;
  p.N = static_cast<int>(cfg.integer("N"));
  p.J = cfg.real("J");
  if (cfg.params.contains("delta")) p.delta = cfg.real("delta");
  if (cfg.params.contains("U")) p.U = cfg.real("U");
  if (cfg.params.contains("kappa")) p.kappa = cfg.real("kappa");
  if (cfg.params.contains("eta")) p.eta = cfg.real("eta");
  return p;
}

ResultTable run_ssh_limit_cycle(const ExperimentConfig& cfg) {
  ResultTable t({"site", "re_d0", "im_d0", "abs_d0"});
  const SSHParams p = ssh_params(cfg);
  p.validate();
  const auto lc = ssh::limit_cycle_solve(p);
  for (Index i = 0; i < lc.d0.size(); ++i) {
    t.add_row({static_cast<long long>(i + 1), lc.d0[i].real(), lc.d0[i].imag(), std::abs(lc.d0[i])});
  }

  // Independent frequency estimate from a long free integration started off
  // the cycle.
  const double dt = cfg.real("fft-dt");
  const double t0 = cfg.real("fft-start");
  const auto samples = static_cast<std::size_t>(cfg.integer("fft-samples"));
  Eigen::VectorXcd v0 = 0.8 * lc.d0;
  v0[std::min<Index>(1, v0.size() - 1)] += 0.5 * lc.d0.norm();
  std::vector<double> times(samples);
  for (std::size_t k = 0; k < samples; ++k) times[k] = t0 + static_cast<double>(k) * dt;
  const auto path = ssh::integrate_semiclassical(p, v0, times);
  std::vector<cplx> signal;
  signal.reserve(path.size());
  for (const auto& v : path) signal.push_back(v[0]);
  const double omega = ssh::fft_peak_frequency(signal, dt);

  const double max_mu = lc.floquet_multipliers.size() ? lc.floquet_multipliers.cwiseAbs().maxCoeff() : 0.0;
  t.summary["lambda"] = lc.lambda;
  t.summary["residual"] = lc.residual;
  t.summary["newton_iterations"] = lc.iterations;
  t.summary["from_newton"] = lc.from_newton;
  t.summary["fft_frequency"] = omega;
  t.summary["frequency_rel_diff"] = std::abs(omega - lc.lambda) / std::abs(lc.lambda);
  t.summary["max_floquet_modulus"] = max_mu;
  t.summary["stable"] = lc.stable;
  if (!lc.stable) throw PhysicsError(fmt::format("limit cycle is unstable (largest Floquet modulus {:.6g})", max_mu));
  return t;
}

ResultTable run_ssh_mf_overlap(const ExperimentConfig& cfg) {
  ResultTable t({"s", "b_overlap", "energy"});
  const SSHParams p = ssh_params(cfg);
  p.validate();
  ssh::MeanFieldOptions mo;
  mo.s_max = cfg.real("s-max");
  mo.curve_points = static_cast<int>(cfg.integer("curve-points"));
  const auto mf = ssh::mean_field_self_consistent(p, mo);
  for (const auto& pt : mf.curve) t.add_row({pt.s, pt.b_overlap, pt.energy});
  t.summary["s"] = mf.s;
  t.summary["b_overlap"] = mf.edge.b_overlap;
  t.summary["target"] = p.eta * p.eta;
  t.summary["energy"] = mf.edge.energy;
  t.summary["branch_end"] = optional_json(mf.branch_end);
  return t;
}

ResultTable run_ssh_fock_fidelity(const ExperimentConfig& cfg) {
  ResultTable t({"xi", "eta", "fidelity", "infidelity", "total_density", "edge_population", "rate_infidelity", "residual"});
  const int dim = static_cast<int>(cfg.integer("dim"));
  std::vector<double> xs, ys;
  for (double xi : cfg.reals("xi")) {
    if (xi <= 0.0 || xi >= 1.0) throw ConfigError("'xi' entries must lie in (0, 1)");
    SSHParams p = ssh_params(cfg);
    p.delta = SSHParams::delta_from_xi(xi);
    p.eta = cfg.real("eta-prime") * xi * xi;
    p.validate();
    const auto q = ssh::quantum_steady_state(p, dim);
    const auto rate = ssh::rate_equation_prediction(xi);
    t.add_row({xi, p.eta, q.fidelity, 1.0 - q.fidelity, q.total_density, q.edge_population, 1.0 - rate.rho1, q.residual});
    xs.push_back(xi);
    ys.push_back(1.0 - q.fidelity);
  }
  t.summary["infidelity_slope"] = optional_json(loglog_slope(xs, ys));
  return t;
}

ResultTable run_ssh_no_go(const ExperimentConfig& cfg) {
  ResultTable t({"gamma_ratio", "loss_ratio", "fidelity", "root_fidelity", "flagged"});
  const auto scan = ssh::single_mode_no_go_scan(cfg.reals("gamma-grid"), cfg.reals("loss-grid"),
                                                static_cast<int>(cfg.integer("min-dim")));
  for (const auto& pt : scan.surface) t.add_row({pt.gamma_ratio, pt.loss_ratio, pt.fidelity, pt.root_fidelity, pt.flagged});
  t.summary["best_gamma_ratio"] = scan.best.gamma_ratio;
  t.summary["best_loss_ratio"] = scan.best.loss_ratio;
  t.summary["best_fidelity"] = scan.best.fidelity;
  t.summary["best_root_fidelity"] = scan.best.root_fidelity;
  return t;
}

ResultTable run_ssh_added_loss(const ExperimentConfig& cfg) {
  ResultTable t({"gamma", "infidelity", "kappa", "eta", "xi", "flagged"});
  SSHParams base;
  base.N = static_cast<int>(cfg.integer("N"));
  base.J = cfg.real("J");
  base.U = cfg.real("U");
  ssh::AddedLossOptions ao;
  ao.dim = static_cast<int>(cfg.integer("dim"));
  ao.optimizer_budget = static_cast<int>(cfg.integer("budget"));
  ao.optimize_each = cfg.flag("optimize-each");
  ao.kappa0 = cfg.real("kappa0");
  ao.eta0 = cfg.real("eta0");
  ao.xi0 = cfg.real("xi0");
  const auto scan = ssh::added_loss_scan(base, cfg.reals("gamma"), ao);
  for (const auto& pt : scan.points) t.add_row({pt.gamma, pt.infidelity, pt.kappa, pt.eta, pt.xi, pt.flagged});
  t.summary["monotone"] = scan.monotone;
  t.summary["slope"] = optional_json(scan.slope);
  return t;
}

ResultTable run_dissipator_identity(const ExperimentConfig& cfg) {
  ResultTable t({"index", "case", "sites", "error"});
  const SSHParams p = ssh_params(cfg);
  p.validate();
  const int dim = static_cast<int>(cfg.integer("dim"));
  double worst = ssh::dissipator_mode_identity_check(p, dim);
  t.add_row({0LL, std::string("ssh"), static_cast<long long>(p.N), worst});
  const int sites = static_cast<int>(cfg.integer("random-sites"));
  const long long count = cfg.integer("random-count");
  for (long long k = 0; k < count; ++k) {
    const auto h = ssh::random_chiral_hamiltonian(sites, counter_seed(cfg.seed, static_cast<std::uint64_t>(k)));
    const double err = ssh::dissipator_mode_identity_check(h, ssh::sublattice_signs(sites), p.kappa, p.eta, dim);
    worst = std::max(worst, err);
    t.add_row({k + 1, std::string("random"), static_cast<long long>(sites), err});
  }
  t.summary["max_error"] = worst;
  return t;
}

std::vector<Experiment> build_registry() {
  using K = PlotSpec::Kind;
  std::vector<Experiment> r;
  r.push_back({"pt-threshold",
               "PT dimer: mean-field lasing density versus hopping across the threshold 2J = sqrt(kappa_a kappa_b)",
               {list_key("J-grid", "0.1:3.0:0.05", "hopping amplitudes J (rate units)"),
                real_key("kappa-a", "4", "loss rate on mode a"),
                real_key("kappa-b", "1.5", "gain rate on mode b"),
                real_key("n-star", "5", "nonlinear hopping density scale n*"),
                real_key("t-final", "400", "integration time of the amplitude equations")},
               {K::Line, "Lasing density vs hopping", "J", {"n_mf", "n_ode"}, "", false, false},
               run_pt_threshold});
  r.push_back({"pt-mf-vs-exact",
               "PT dimer: exact Lindblad photon number against mean field, error versus photon number",
               {list_key("n-star", "5,10", "density scales n*, one exact solve each"),
                real_key("J", "0.9421009058", "hopping amplitude"),
                real_key("kappa-a", "4", "loss rate on mode a"),
                real_key("kappa-b", "1.5", "gain rate on mode b"),
                real_key("edge-tol", "1e-3", "largest accepted population on the top truncation level")},
               {K::Line, "Mean-field error vs photon number", "n_exact", {"error"}, "", true, true},
               run_pt_mf_vs_exact});
  r.push_back({"pt-phase-diffusion",
               "PT dimer: Langevin phase diffusion of the lasing mode versus gain/loss ratio r",
               {list_key("r", "0.1,0.2", "gain/loss ratios kappa_b / kappa_a in (0, 1)"),
                real_key("kappa-a", "1", "loss rate on mode a"),
                real_key("pump-ratio", "2", "sqrt(kappa_a kappa_b) / (2 J), held fixed"),
                real_key("rho-a-sq", "50", "mode-a intensity rho_a^2, held fixed"),
                int_key("trajectories", "200", "ensemble size"),
                real_key("t-max", "200", "sampling window length"),
                real_key("dt", "0.02", "Euler-Maruyama step"),
                real_key("burn-in", "20", "discarded transient"),
                real_key("sample-interval", "0.5", "spacing of recorded samples")},
               {K::Line, "Phase diffusion vs r", "r", {"diffusion", "diffusion_linear"}, "", false, true},
               run_pt_phase_diffusion});
  r.push_back({"pt-gain-sat-compare",
               "Detuned dimer: growth rate versus density for density-dependent hopping and for gain saturation",
               {list_key("delta", "0.1,0.3,1.0", "detunings"),
                real_key("J", "1", "hopping amplitude"),
                real_key("kappa", "1", "balanced gain and loss rate"),
                real_key("n-star", "1", "density scale n*"),
                real_key("n-min", "1e-3", "smallest density on the log grid"),
                real_key("n-max", "1e4", "largest density on the log grid"),
                int_key("points", "121", "grid points per detuning")},
               {K::Line, "Largest growth rate vs density", "n", {"hop_max_re", "gain_sat_max_re"}, "delta", true, false},
               run_pt_gain_sat_compare});
  r.push_back({"ssh-limit-cycle",
               "SSH laser: self-consistent edge-mode limit cycle, frequency and Floquet stability",
               {int_key("N", "11", "number of sites (odd)"),
                real_key("J", "1", "hopping amplitude"),
                real_key("delta", "-0.65", "dimerization; negative is topological", false),
                real_key("U", "0.001", "Kerr nonlinearity"),
                real_key("kappa", "1", "loss rate"),
                real_key("eta", "0.2", "pump-to-loss amplitude ratio"),
                real_key("fft-start", "600", "start of the FFT window"),
                real_key("fft-dt", "0.05", "FFT sample spacing"),
                int_key("fft-samples", "16384", "FFT window length")},
               {K::Line, "Edge-mode amplitude", "site", {"abs_d0"}, "", false, true},
               run_ssh_limit_cycle});
  r.push_back({"ssh-mf-overlap",
               "SSH laser: self-consistent mean-field edge mode, B-sublattice overlap versus interaction strength",
               {int_key("N", "21", "number of sites (odd)"),
                real_key("J", "1", "hopping amplitude"),
                real_key("delta", "-0.4", "dimerization; negative is topological", false),
                real_key("U", "1", "Kerr nonlinearity"),
                real_key("eta", "0.1", "pump-to-loss amplitude ratio"),
                real_key("s-max", "4", "largest U |d0|^2 on the curve"),
                int_key("curve-points", "81", "curve samples")},
               {K::Line, "B-sublattice overlap of the edge mode", "s", {"b_overlap"}, "", false, false},
               run_ssh_mf_overlap});
  r.push_back({"ssh-fock-fidelity",
               "SSH chain: single-photon Fock-state fidelity of the exact steady state versus localization length",
               {list_key("xi", std::nullopt, "edge-mode localization ratios in (0, 1)"),
                int_key("N", "5", "number of sites (odd)"),
                real_key("J", "1", "hopping amplitude"),
                real_key("U", "1", "Kerr nonlinearity"),
                real_key("kappa", "1", "loss rate"),
                real_key("eta-prime", "1", "pump parameter, eta = eta-prime xi^2"),
                int_key("dim", "3", "Fock truncation per site")},
               {K::Line, "Fock-state infidelity vs xi", "xi", {"infidelity", "rate_infidelity"}, "", true, true},
               run_ssh_fock_fidelity});
  r.push_back({"ssh-no-go",
               "Single-mode gain, loss and two-photon loss: best single-photon fidelity over rate ratios",
               {list_key("gamma-grid", "log:1e-2:1e2:41", "two-photon loss ratios gamma / kappa_g"),
                list_key("loss-grid", "0,0.1,0.3,1", "single-photon loss ratios kappa_l / kappa_g"),
                int_key("min-dim", "8", "initial Fock truncation")},
               {K::Heatmap, "Single-photon fidelity", "gamma_ratio", {"loss_ratio", "fidelity"}, "", true, false},
               run_ssh_no_go});
  r.push_back({"ssh-added-loss",
               "SSH chain: Fock-state infidelity versus unwanted extra loss at optimized pump and localization",
               {list_key("gamma", "0,0.01,0.03,0.1", "extra loss rates"),
                int_key("N", "5", "number of sites (odd)"),
                real_key("J", "1", "hopping amplitude"),
                real_key("U", "1", "Kerr nonlinearity"),
                int_key("dim", "3", "Fock truncation per site"),
                int_key("budget", "40", "objective evaluations per optimization"),
                flag_key("optimize-each", "false", "re-optimize at every gamma"),
                real_key("kappa0", "1", "optimizer start: loss rate"),
                real_key("eta0", "0.01", "optimizer start: pump ratio"),
                real_key("xi0", "0.1", "optimizer start: localization ratio")},
               {K::Line, "Infidelity vs extra loss", "gamma", {"infidelity"}, "", true, true},
               run_ssh_added_loss});
  r.push_back({"dissipator-identity",
               "Chiral chain: site-basis against mode-basis gain/loss dissipators",
               {int_key("N", "3", "sites of the SSH case"),
                real_key("J", "1", "hopping amplitude"),
                real_key("delta", "-0.5", "dimerization", false),
                real_key("kappa", "1", "loss rate"),
                real_key("eta", "0.3", "pump-to-loss amplitude ratio"),
                int_key("dim", "2", "Fock truncation per site"),
                int_key("random-sites", "4", "sites of the random chiral Hamiltonians"),
                int_key("random-count", "10", "number of random Hamiltonians")},
               {K::Line, "Dissipator identity error", "index", {"error"}, "", false, true},
               run_dissipator_identity});
  return r;
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

const std::vector<Experiment>& registry() {
  static const std::vector<Experiment> r = build_registry();
  return r;
}

const Experiment* find_experiment(const std::string& name) {
  for (const auto& e : registry())
    if (e.name == name) return &e;
  return nullptr;
}

std::vector<std::string> experiment_names() {
  std::vector<std::string> names;
  for (const auto& e : registry()) names.push_back(e.name);
  return names;
}

std::string git_revision() { return SYMBREAK_GIT_REVISION; }

RunOutcome run_experiment(const Experiment& experiment, const ExperimentConfig& config) {
  RunOutcome out;
  const auto start = std::chrono::steady_clock::now();
  try {
    out.table = experiment.run(config);
  } catch (const ConfigError&) {
    throw;
  } catch (const PhysicsError& e) {
    throw PhysicsError(experiment.name + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(experiment.name + ": " + e.what());
  } catch (const std::exception& e) {
    throw PhysicsError(experiment.name + ": " + e.what());
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const nlohmann::json canonical = config.canonical();
  out.metadata = {{"experiment", experiment.name},
                  {"reproduces", experiment.reproduces},
                  {"params", config.params},
                  {"seed", config.seed},
                  {"git_revision", git_revision()},
                  {"config_hash", sha256_hex(canonical.dump())},
                  {"runtime_seconds", seconds},
                  {"timestamp", utc_timestamp()},
                  {"threads", worker_count()},
                  {"columns", out.table.columns()},
                  {"rows", out.table.rows().size()},
                  {"summary", out.table.summary}};

  std::filesystem::create_directories(config.output_dir);
  const auto write = [&](OutputFormat f, const std::function<void(std::ostream&)>& body) {
    const auto path = config.output_dir / (experiment.name + "." + format_name(f));
    std::ofstream file(path, std::ios::binary);
    if (!file) throw ConfigError("cannot write '" + path.string() + "'");
    body(file);
    if (!file) throw ConfigError("write failed for '" + path.string() + "'");
    out.files.push_back(path);
  };
  for (OutputFormat f : config.formats) {
    switch (f) {
      case OutputFormat::Csv:
        write(f, [&](std::ostream& os) { write_csv(os, out.table); });
        break;
      case OutputFormat::Json:
        write(f, [&](std::ostream& os) { os << out.metadata.dump(2) << '\n'; });
        break;
      case OutputFormat::Svg:
        write(f, [&](std::ostream& os) { write_svg(os, out.table, experiment.plot); });
        break;
    }
  }
  return out;
}

}  // namespace symbreak::cli
