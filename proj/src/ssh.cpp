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


#include "symbreak/ssh.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include <boost/numeric/odeint.hpp>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <unsupported/Eigen/FFT>
#include <unsupported/Eigen/MatrixFunctions>

#include "symbreak/parallel.hpp"

namespace symbreak::ssh {

namespace {

constexpr double kPi = std::numbers::pi;

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

// Index of the first component whose magnitude is not negligible.
Index gauge_index(const Eigen::VectorXcd& v) {
  const double cutoff = 1e-6 * v.cwiseAbs().maxCoeff();
  for (Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > cutoff) return i;
  }
  return 0;
}

void fix_gauge(Eigen::VectorXcd& v) {
  if (v.size() == 0 || v.cwiseAbs().maxCoeff() == 0.0) return;
  const cplx c = v[gauge_index(v)];
  v *= std::conj(c) / std::abs(c);
}

std::vector<SparseOperator> site_annihilators(const FockSpace& space) {
  std::vector<SparseOperator> ops;
  for (int m = 0; m < space.num_modes(); ++m) ops.push_back(annihilation(space, m));
  return ops;
}

// sum_ij h_ij a_i^dag a_j.
SparseOperator quadratic_hamiltonian(const Eigen::MatrixXcd& h, const std::vector<SparseOperator>& a) {
  const FockSpace& space = a.front().space();
  SparseOperator H = zero_operator(space);
  for (Index i = 0; i < h.rows(); ++i) {
    for (Index j = 0; j < h.cols(); ++j) {
      if (std::abs(h(i, j)) == 0.0) continue;
      H = H + a[i].adjoint() * a[j] * h(i, j);
    }
  }
  return H;
}

// sum_i w_i a_i.
SparseOperator mode_operator(const std::vector<SparseOperator>& a, const Eigen::VectorXcd& w) {
  std::vector<cplx> coeff(w.data(), w.data() + w.size());
  return compose(a, coeff);
}

// Gain, loss and extra loss rates per site.
struct Rates {
  Eigen::VectorXd gain;
  Eigen::VectorXd loss;
};

Rates site_rates(const SSHParams& p) {
  Rates r{Eigen::VectorXd::Zero(p.N), Eigen::VectorXd::Zero(p.N)};
  for (int i = 0; i < p.N; ++i) {
    const bool pumped = is_pumped_site(i);
    if (pumped) {
      r.gain[i] = p.eta * p.eta * p.kappa;
    } else {
      r.loss[i] = p.kappa;
    }
    if (pumped == (p.extra_loss_site == ExtraLossSite::Pumped)) r.loss[i] += p.gamma;
  }
  return r;
}

double kerr_strength(const SSHParams& p, int site) {
  return (p.kerr_on_pumped_only && !is_pumped_site(site)) ? 0.0 : p.U;
}

// Hopping matrix in the gauge of the semiclassical equations.
Eigen::MatrixXcd semiclassical_hopping(const SSHParams& p) { return -ssh_hopping_matrix(p.N, p.J, p.delta); }

Eigen::VectorXd net_growth(const SSHParams& p) {
  const Rates r = site_rates(p);
  return 0.5 * (r.gain - r.loss);
}

}  // namespace

void SSHParams::validate() const {
  if (N < 3 || N % 2 == 0) throw std::invalid_argument("SSHParams: N must be odd and >= 3, got " + std::to_string(N));
  if (!(std::abs(delta) < 1.0)) throw std::invalid_argument("SSHParams: delta must lie in (-1, 1)");
  if (!finite_nonneg(J) || !finite_nonneg(U) || !finite_nonneg(kappa) || !finite_nonneg(gamma) || !finite_nonneg(eta)) {
    throw std::invalid_argument("SSHParams: J, U, kappa, gamma and eta must be finite and non-negative");
  }
}

double SSHParams::xi() const { return (1.0 + delta) / (1.0 - delta); }

double SSHParams::eta_prime() const {
  const double x = xi();
  return eta / (x * x);
}

double SSHParams::delta_from_xi(double xi) {
  if (!(xi > 0.0) || !std::isfinite(xi)) throw std::invalid_argument("delta_from_xi: xi must be positive");
  return (xi - 1.0) / (xi + 1.0);
}

Eigen::MatrixXcd ssh_hopping_matrix(int sites, double J, double delta) {
  if (sites < 2) throw std::invalid_argument("ssh_hopping_matrix: need at least two sites");
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(sites, sites);
  for (int i = 0; i + 1 < sites; ++i) {
    const double t = -J * (i % 2 == 0 ? 1.0 + delta : 1.0 - delta);
    h(i, i + 1) = t;
    h(i + 1, i) = t;
  }
  return h;
}

Eigen::VectorXd sublattice_signs(int sites) {
  Eigen::VectorXd s(sites);
  for (int i = 0; i < sites; ++i) s[i] = is_pumped_site(i) ? 1.0 : -1.0;
  return s;
}

ModeDecomposition decompose_chiral(const Eigen::MatrixXcd& h, const Eigen::VectorXd& chiral, double zero_tol) {
  const Index n = h.rows();
  if (h.cols() != n || chiral.size() != n) throw std::invalid_argument("decompose_chiral: shape mismatch");
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((h - h.adjoint()).norm() > 1e-12 * scale) throw std::invalid_argument("decompose_chiral: h is not Hermitian");
  const Eigen::MatrixXcd S = chiral.cast<cplx>().asDiagonal();
  if ((S * h * S + h).norm() > 1e-12 * scale) throw std::invalid_argument("decompose_chiral: h is not chiral symmetric");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  const Eigen::VectorXd& ev = es.eigenvalues();
  std::vector<Index> positive, zero;
  for (Index k = 0; k < n; ++k) {
    if (ev[k] > zero_tol * scale) {
      positive.push_back(k);
    } else if (ev[k] >= -zero_tol * scale) {
      zero.push_back(k);
    }
  }
  const Index npos = static_cast<Index>(positive.size());
  const Index nzero = static_cast<Index>(zero.size());
  if (2 * npos + nzero != n) throw std::runtime_error("decompose_chiral: spectrum is not symmetric");

  ModeDecomposition out;
  out.energies.resize(n);
  out.wavefunctions.resize(n, n);
  out.chiral_partner.assign(static_cast<size_t>(n), 0);

  // Zero modes: diagonalize the chiral operator inside the null space so each
  // basis vector lives on one sublattice.
  Eigen::MatrixXcd zero_basis(n, nzero);
  if (nzero > 0) {
    Eigen::MatrixXcd Z(n, nzero);
    for (Index k = 0; k < nzero; ++k) Z.col(k) = es.eigenvectors().col(zero[k]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> cs(Z.adjoint() * S * Z);
    zero_basis = Z * cs.eigenvectors();
    for (Index k = 0; k < nzero; ++k) {
      Eigen::VectorXcd v = zero_basis.col(k);
      const double sign = cs.eigenvalues()[k] >= 0.0 ? 1.0 : -1.0;
      v = 0.5 * (v + sign * (S * v));
      v.normalize();
      fix_gauge(v);
      zero_basis.col(k) = v;
    }
  }

  // Order: -eps_max ... -eps_min, zeros, eps_min ... eps_max.
  for (Index k = 0; k < npos; ++k) {
    Eigen::VectorXcd v = es.eigenvectors().col(positive[k]);
    fix_gauge(v);
    const Index plus = npos + nzero + k;
    const Index minus = npos - 1 - k;
    out.energies[plus] = ev[positive[k]];
    out.energies[minus] = -ev[positive[k]];
    out.wavefunctions.col(plus) = v;
    out.wavefunctions.col(minus) = S * v;
    out.chiral_partner[plus] = static_cast<int>(minus);
    out.chiral_partner[minus] = static_cast<int>(plus);
  }
  for (Index k = 0; k < nzero; ++k) {
    const Index idx = npos + k;
    out.energies[idx] = 0.0;
    out.wavefunctions.col(idx) = zero_basis.col(k);
    out.chiral_partner[idx] = static_cast<int>(idx);
  }
  if (nzero == 1) out.zero_mode_index = static_cast<int>(npos);

  out.unitarity_error = (out.wavefunctions.adjoint() * out.wavefunctions - Eigen::MatrixXcd::Identity(n, n)).norm();
  double pairing = 0.0;
  for (Index k = 0; k < n; ++k) {
    const Index partner = out.chiral_partner[k];
    pairing = std::max(pairing, (out.wavefunctions.col(partner) - S * out.wavefunctions.col(k)).norm());
  }
  out.pairing_error = pairing;
  return out;
}

ChiralModel build_ssh(const SSHParams& p) {
  p.validate();
  ChiralModel m;
  m.hamiltonian = ssh_hopping_matrix(p.N, p.J, p.delta);
  m.chiral = sublattice_signs(p.N);
  m.modes = decompose_chiral(m.hamiltonian, m.chiral);
  if (!m.modes.zero_mode_index && p.J > 0.0) throw std::runtime_error("build_ssh: expected a single zero mode");
  return m;
}

Eigen::VectorXd edge_wavefunction(const SSHParams& p) {
  p.validate();
  if (!p.topological()) throw std::domain_error("edge_wavefunction: chain is not in the topological phase (delta >= 0)");
  const double xi = p.xi();
  Eigen::VectorXd psi = Eigen::VectorXd::Zero(p.N);
  for (int k = 0; k < p.N; k += 2) {
    const int cell = k / 2;
    psi[k] = std::sqrt(1.0 - xi * xi) * (cell % 2 == 0 ? 1.0 : -1.0) * std::pow(xi, cell);
  }
  return psi / psi.norm();
}

OpenSystem build_ssh_system(const SSHParams& p, int dim) {
  p.validate();
  FockSpace space(std::vector<int>(static_cast<size_t>(p.N), dim));
  const auto a = site_annihilators(space);
  SparseOperator H = quadratic_hamiltonian(ssh_hopping_matrix(p.N, p.J, p.delta), a);
  for (int i = 0; i < p.N; ++i) {
    const double u = kerr_strength(p, i);
    if (u == 0.0) continue;
    const SparseOperator n = number(space, i);
    H = H + n * (n - identity(space)) * cplx(0.5 * u);
  }
  OpenSystem sys{H, {}};
  const Rates r = site_rates(p);
  for (int i = 0; i < p.N; ++i) {
    if (r.gain[i] > 0.0) sys.jumps.push_back(a[i].adjoint() * cplx(std::sqrt(r.gain[i])));
    if (r.loss[i] > 0.0) sys.jumps.push_back(a[i] * cplx(std::sqrt(r.loss[i])));
  }
  return sys;
}

double dissipator_mode_identity_check(const Eigen::MatrixXcd& h, const Eigen::VectorXd& chiral, double kappa, double eta,
                                      int dim, Index max_hilbert_dim) {
  const int sites = static_cast<int>(h.rows());
  if (std::pow(static_cast<double>(dim), sites) > static_cast<double>(max_hilbert_dim)) {
    throw std::length_error("dissipator_mode_identity_check: Hilbert space exceeds the memory guard");
  }
  const ModeDecomposition modes = decompose_chiral(h, chiral);
  FockSpace space(std::vector<int>(static_cast<size_t>(sites), dim));
  const auto a = site_annihilators(space);
  const SparseOperator H = quadratic_hamiltonian(h, a);

  const double g = std::sqrt(eta * eta * kappa);
  const double l = std::sqrt(kappa);
  std::vector<SparseOperator> site_jumps, mode_jumps;
  for (int i = 0; i < sites; ++i) {
    if (chiral[i] > 0) {
      site_jumps.push_back(a[i].adjoint() * cplx(g));
    } else {
      site_jumps.push_back(a[i] * cplx(l));
    }
  }
  for (int alpha = 0; alpha < sites; ++alpha) {
    // d = sum_i conj(psi_alpha[i]) a_i and U d U^dag flips the B amplitudes.
    const Eigen::VectorXcd w = modes.wavefunctions.col(alpha).conjugate();
    const Eigen::VectorXcd w_flipped = chiral.cast<cplx>().cwiseProduct(w);
    const SparseOperator d = mode_operator(a, w);
    const SparseOperator ud = mode_operator(a, w_flipped);
    mode_jumps.push_back((d.adjoint() + ud.adjoint()) * cplx(0.5 * g));
    mode_jumps.push_back((d - ud) * cplx(0.5 * l));
  }
  const Liouvillian site = build_liouvillian(H, site_jumps);
  const Liouvillian mode = build_liouvillian(H, mode_jumps);
  return SparseMatrix(site.superop() - mode.superop()).norm();
}

double dissipator_mode_identity_check(const SSHParams& p, int dim, Index max_hilbert_dim) {
  p.validate();
  return dissipator_mode_identity_check(ssh_hopping_matrix(p.N, p.J, p.delta), sublattice_signs(p.N), p.kappa, p.eta, dim,
                                        max_hilbert_dim);
}

Eigen::MatrixXcd random_chiral_hamiltonian(int sites, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(sites, sites);
  for (int i = 0; i < sites; ++i) {
    for (int j = i + 1; j < sites; ++j) {
      if (is_pumped_site(i) == is_pumped_site(j)) continue;
      const cplx t(gauss(rng), gauss(rng));
      h(i, j) = t;
      h(j, i) = std::conj(t);
    }
  }
  return h;
}

ThermalResult thermal_mode_occupations(const Eigen::MatrixXcd& h, const Eigen::VectorXd& chiral, double kappa, double eta) {
  const Index n = h.rows();
  const ModeDecomposition modes = decompose_chiral(h, chiral);
  Eigen::VectorXd gain(n), loss(n);
  for (Index i = 0; i < n; ++i) {
    gain[i] = chiral[i] > 0 ? eta * eta * kappa : 0.0;
    loss[i] = chiral[i] > 0 ? 0.0 : kappa;
  }
  // d a / dt = X a + noise,  X = -i h - (loss - gain) / 2.
  const Eigen::MatrixXcd X = -cplx(0, 1) * h - (0.5 * (loss - gain)).cast<cplx>().asDiagonal().toDenseMatrix();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> xs(X, false);
  if (xs.eigenvalues().real().maxCoeff() >= 0.0) {
    throw std::domain_error("thermal_mode_occupations: linear dynamics has no steady state");
  }
  // M_ij = <a_i^dag a_j> obeys conj(X) M + M X^T + diag(gain) = 0.
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
  Eigen::MatrixXcd A(n * n, n * n);
  for (Index r = 0; r < n; ++r) {
    for (Index c = 0; c < n; ++c) A.block(r * n, c * n, n, n) = X(r, c) * I + (r == c ? Eigen::MatrixXcd(X.conjugate()) : Eigen::MatrixXcd::Zero(n, n));
  }
  Eigen::MatrixXcd G = gain.cast<cplx>().asDiagonal();
  Eigen::VectorXcd rhs = -Eigen::Map<Eigen::VectorXcd>(G.data(), n * n);
  Eigen::VectorXcd m = A.partialPivLu().solve(rhs);
  ThermalResult out;
  out.correlations = Eigen::Map<Eigen::MatrixXcd>(m.data(), n, n);
  out.energies = modes.energies;
  out.occupations.resize(n);
  for (Index alpha = 0; alpha < n; ++alpha) {
    const Eigen::VectorXcd w = modes.wavefunctions.col(alpha);
    out.occupations[alpha] = (w.transpose() * out.correlations * w.conjugate()).value().real();
  }
  return out;
}

Eigen::MatrixXcd dynamical_matrix(const Eigen::VectorXcd& v, const SSHParams& p) {
  if (v.size() != p.N) throw std::invalid_argument("dynamical_matrix: state has wrong length");
  Eigen::MatrixXcd D = -cplx(0, 1) * semiclassical_hopping(p);
  const Eigen::VectorXd g = net_growth(p);
  for (int i = 0; i < p.N; ++i) D(i, i) += cplx(g[i], -kerr_strength(p, i) * std::norm(v[i]));
  return D;
}

Eigen::VectorXcd semiclassical_rhs(const Eigen::VectorXcd& v, const SSHParams& p) {
  if (v.size() != p.N) throw std::invalid_argument("semiclassical_rhs: state has wrong length");
  const Eigen::VectorXd g = net_growth(p);
  Eigen::VectorXcd out(p.N);
  for (int i = 0; i < p.N; ++i) {
    cplx hop = 0.0;
    if (i > 0) hop += p.J * ((i - 1) % 2 == 0 ? 1.0 + p.delta : 1.0 - p.delta) * v[i - 1];
    if (i + 1 < p.N) hop += p.J * (i % 2 == 0 ? 1.0 + p.delta : 1.0 - p.delta) * v[i + 1];
    out[i] = -cplx(0, 1) * (hop + kerr_strength(p, i) * std::norm(v[i]) * v[i]) + g[i] * v[i];
  }
  return out;
}

namespace odeint = boost::numeric::odeint;

std::vector<Eigen::VectorXcd> integrate_semiclassical(const SSHParams& p, const Eigen::VectorXcd& v0,
                                                      const std::vector<double>& times, double tol) {
  if (v0.size() != p.N) throw std::invalid_argument("integrate_semiclassical: state has wrong length");
  if (times.empty()) return {};
  if (times.front() < 0.0 || !std::is_sorted(times.begin(), times.end())) {
    throw std::invalid_argument("integrate_semiclassical: times must be increasing and non-negative");
  }
  using State = std::vector<double>;
  const int n = p.N;
  auto pack = [n](const Eigen::VectorXcd& v) {
    State x(2 * static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      x[2 * i] = v[i].real();
      x[2 * i + 1] = v[i].imag();
    }
    return x;
  };
  auto unpack = [n](const State& x) {
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) v[i] = cplx(x[2 * i], x[2 * i + 1]);
    return v;
  };
  auto sys = [&](const State& x, State& dxdt, double) {
    const Eigen::VectorXcd d = semiclassical_rhs(unpack(x), p);
    dxdt = pack(d);
  };
  std::vector<Eigen::VectorXcd> out;
  out.reserve(times.size());
  State x = pack(v0);
  std::vector<double> grid;
  if (times.front() > 0.0) grid.push_back(0.0);
  grid.insert(grid.end(), times.begin(), times.end());
  const bool skip_first = times.front() > 0.0;
  bool first = true;
  auto observer = [&](const State& s, double) {
    if (first && skip_first) {
      first = false;
      return;
    }
    first = false;
    out.push_back(unpack(s));
  };
  const double dt0 = grid.size() > 1 ? std::max(1e-6, (grid[1] - grid[0]) * 0.1) : 1e-3;
  odeint::integrate_times(odeint::make_dense_output(tol, tol, odeint::runge_kutta_dopri5<State>()), sys, x, grid.begin(),
                          grid.end(), dt0, observer);
  return out;
}

namespace {

// Real Jacobian of w -> D(w) w - i lambda w at w = d, columns (Re d, Im d).
Eigen::MatrixXd rotating_jacobian(const SSHParams& p, const Eigen::VectorXcd& d, double lambda) {
  const int n = p.N;
  Eigen::MatrixXcd lin = -cplx(0, 1) * semiclassical_hopping(p);
  const Eigen::VectorXd g = net_growth(p);
  for (int i = 0; i < n; ++i) lin(i, i) += g[i] - cplx(0, lambda);
  Eigen::MatrixXd Jm = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXcd col_x = lin.col(j);
    Eigen::VectorXcd col_y = cplx(0, 1) * lin.col(j);
    const double u = kerr_strength(p, j);
    const double x = d[j].real(), y = d[j].imag();
    // d/dx and d/dy of -i u |d|^2 d.
    col_x[j] += -cplx(0, 1) * u * (2.0 * x * d[j] + std::norm(d[j]));
    col_y[j] += -cplx(0, 1) * u * (2.0 * y * d[j] + cplx(0, 1) * std::norm(d[j]));
    for (int i = 0; i < n; ++i) {
      Jm(i, j) = col_x[i].real();
      Jm(n + i, j) = col_x[i].imag();
      Jm(i, n + j) = col_y[i].real();
      Jm(n + i, n + j) = col_y[i].imag();
    }
  }
  return Jm;
}

Eigen::VectorXcd cycle_residual(const SSHParams& p, const Eigen::VectorXcd& d, double lambda) {
  return dynamical_matrix(d, p) * d - cplx(0, lambda) * d;
}

struct NewtonOutcome {
  Eigen::VectorXcd d;
  double lambda = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

NewtonOutcome newton_cycle(const SSHParams& p, Eigen::VectorXcd d, double lambda, const LimitCycleOptions& opt) {
  const int n = p.N;
  fix_gauge(d);
  const Index gi = gauge_index(d);
  const double seed_norm = d.norm();
  auto merit = [&](const Eigen::VectorXcd& dd, double lam) {
    return std::hypot(cycle_residual(p, dd, lam).norm(), dd[gi].imag());
  };
  NewtonOutcome out{d, lambda, merit(d, lambda), 0, false};
  for (int it = 0; it < opt.max_iterations; ++it) {
    out.iterations = it;
    if (out.residual <= opt.tol) break;
    Eigen::MatrixXd Jm = Eigen::MatrixXd::Zero(2 * n + 1, 2 * n + 1);
    Jm.topLeftCorner(2 * n, 2 * n) = rotating_jacobian(p, out.d, out.lambda);
    for (int i = 0; i < n; ++i) {
      const cplx c = -cplx(0, 1) * out.d[i];
      Jm(i, 2 * n) = c.real();
      Jm(n + i, 2 * n) = c.imag();
    }
    Jm(2 * n, n + gi) = 1.0;
    const Eigen::VectorXcd r = cycle_residual(p, out.d, out.lambda);
    Eigen::VectorXd F(2 * n + 1);
    F << r.real(), r.imag(), out.d[gi].imag();
    const Eigen::VectorXd step = Jm.fullPivLu().solve(-F);
    double t = 1.0;
    bool accepted = false;
    for (int k = 0; k < 30; ++k, t *= 0.5) {
      Eigen::VectorXcd trial = out.d;
      for (int i = 0; i < n; ++i) trial[i] += t * cplx(step[i], step[n + i]);
      const double lam = out.lambda + t * step[2 * n];
      const double m = merit(trial, lam);
      if (m < out.residual) {
        out.d = trial;
        out.lambda = lam;
        out.residual = m;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  out.residual = cycle_residual(p, out.d, out.lambda).norm();
  // The origin solves the equation trivially; it is not a cycle.
  out.converged = out.residual <= opt.tol && out.d.norm() > 1e-6 * std::max(1.0, seed_norm) && std::isfinite(out.lambda);
  if (out.d[gi].real() < 0.0) out.d = -out.d;
  return out;
}

}  // namespace

Eigen::VectorXcd floquet_multipliers(const SSHParams& p, const Eigen::VectorXcd& d0, double lambda) {
  const Eigen::MatrixXd M = rotating_jacobian(p, d0, lambda);
  // The rotating-frame flow is autonomous and the rotation is the identity
  // after one period, so the monodromy matrix is exp(M T).
  const double period = std::abs(lambda) > 1e-12 ? 2.0 * kPi / std::abs(lambda) : 1.0;
  const Eigen::MatrixXd monodromy = (M * period).exp();
  Eigen::EigenSolver<Eigen::MatrixXd> es(monodromy, false);
  std::vector<cplx> mu(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  auto trivial = std::min_element(mu.begin(), mu.end(), [](cplx x, cplx y) { return std::abs(x - 1.0) < std::abs(y - 1.0); });
  std::iter_swap(mu.begin(), trivial);
  std::sort(mu.begin() + 1, mu.end(), [](cplx x, cplx y) { return std::abs(x) > std::abs(y); });
  return Eigen::Map<Eigen::VectorXcd>(mu.data(), static_cast<Index>(mu.size()));
}

LimitCycle limit_cycle_solve(const SSHParams& p, const LimitCycleOptions& options) {
  p.validate();
  const ChiralModel model = build_ssh(p);
  const Eigen::MatrixXcd S = model.chiral.cast<cplx>().asDiagonal();

  Eigen::VectorXcd seed;
  double lambda0 = 0.0;
  if (options.initial_guess) {
    seed = *options.initial_guess;
    if (seed.size() != p.N) throw std::invalid_argument("limit_cycle_solve: initial guess has wrong length");
    const Eigen::VectorXcd Dd = dynamical_matrix(seed, p) * seed;
    lambda0 = (seed.dot(Dd) / seed.squaredNorm()).imag();
  } else {
    try {
      const MeanFieldResult mf = mean_field_self_consistent(p);
      // The mean-field problem uses h, the semiclassical equations use -h;
      // the sublattice gauge maps one onto the other.
      seed = S * mf.edge.psi * std::sqrt(mf.s / std::max(p.U, 1e-300));
      lambda0 = -mf.edge.energy;
    } catch (const std::exception&) {
      seed = model.modes.wavefunctions.col(model.modes.zero_mode_index.value_or(0));
      lambda0 = 0.0;
    }
  }

  LimitCycle out;
  NewtonOutcome nt = newton_cycle(p, seed, lambda0, options);
  out.from_newton = true;
  if (!nt.converged) {
    out.from_newton = false;
    const double rate = p.kappa * p.eta * p.eta;
    const double t_end = options.fallback_time / (rate > 0.0 ? rate : std::max(p.kappa, 1e-3));
    Eigen::VectorXcd start = nt.d.allFinite() && nt.d.norm() > 1e-8 ? nt.d : seed;
    if (start.norm() < 1e-8) start = model.modes.wavefunctions.col(model.modes.zero_mode_index.value_or(0));
    std::vector<Eigen::VectorXcd> path;
    try {
      path = integrate_semiclassical(p, start, {t_end}, 1e-9);
    } catch (const std::exception&) {
      throw LimitCycleError("limit_cycle_solve: integration fallback failed", nt.residual);
    }
    const Eigen::VectorXcd& v = path.back();
    if (!v.allFinite() || v.cwiseAbs().maxCoeff() > options.divergence_amplitude) {
      throw LimitCycleError("limit_cycle_solve: amplitude diverges, no finite limit cycle", nt.residual);
    }
    const Eigen::VectorXcd Dv = dynamical_matrix(v, p) * v;
    const double lam = (v.dot(Dv) / v.squaredNorm()).imag();
    nt = newton_cycle(p, v, lam, options);
    if (!nt.converged) {
      throw LimitCycleError("limit_cycle_solve: no convergence, best residual " + std::to_string(nt.residual), nt.residual);
    }
  }
  out.d0 = nt.d;
  out.lambda = nt.lambda;
  out.residual = nt.residual;
  out.iterations = nt.iterations;
  const Eigen::VectorXcd mu = floquet_multipliers(p, out.d0, out.lambda);
  out.floquet_multipliers = mu.tail(mu.size() - 1);
  out.stable = out.floquet_multipliers.size() == 0 || out.floquet_multipliers.cwiseAbs().maxCoeff() < 1.0;
  return out;
}

double fft_peak_frequency(const std::vector<cplx>& samples, double dt) {
  const size_t n = samples.size();
  if (n < 8 || !(dt > 0.0)) throw std::invalid_argument("fft_peak_frequency: need at least 8 samples and dt > 0");
  size_t m = 1;
  while (m < 4 * n) m <<= 1;
  std::vector<cplx> buf(m, cplx(0.0));
  for (size_t k = 0; k < n; ++k) {
    const double w = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(k) / static_cast<double>(n - 1));
    buf[k] = w * samples[k];
  }
  Eigen::FFT<double> fft;
  std::vector<cplx> spec;
  fft.fwd(spec, buf);
  size_t best = 0;
  for (size_t k = 1; k < m; ++k) {
    if (std::abs(spec[k]) > std::abs(spec[best])) best = k;
  }
  const double lm = std::log(std::abs(spec[(best + m - 1) % m]) + 1e-300);
  const double l0 = std::log(std::abs(spec[best]) + 1e-300);
  const double lp = std::log(std::abs(spec[(best + 1) % m]) + 1e-300);
  const double denom = lm - 2.0 * l0 + lp;
  const double shift = denom != 0.0 ? 0.5 * (lm - lp) / denom : 0.0;
  double k = static_cast<double>(best) + shift;
  if (k > 0.5 * static_cast<double>(m)) k -= static_cast<double>(m);
  return 2.0 * kPi * k / (static_cast<double>(m) * dt);
}

namespace {

EdgeModeSolution solve_edge(const SSHParams& p, const Eigen::MatrixXcd& h, double s, Eigen::VectorXcd psi,
                            const MeanFieldOptions& opt) {
  const int n = p.N;
  Eigen::VectorXd onsite = s * psi.cwiseAbs2();
  EdgeModeSolution out;
  for (int it = 1; it <= opt.max_iterations; ++it) {
    Eigen::MatrixXcd m = h;
    m.diagonal() += onsite.cast<cplx>();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    Index pick = 0;
    double best = -1.0;
    for (Index k = 0; k < n; ++k) {
      const double ov = std::abs(psi.dot(es.eigenvectors().col(k)));
      if (ov > best) {
        best = ov;
        pick = k;
      }
    }
    psi = es.eigenvectors().col(pick);
    const Eigen::VectorXd target = s * psi.cwiseAbs2();
    const double change = (target - onsite).cwiseAbs().maxCoeff();
    out.energy = es.eigenvalues()[pick];
    if (change < opt.tol) {
      out.iterations = it;
      fix_gauge(psi);
      out.psi = psi;
      out.onsite = target;
      double b = 0.0;
      for (int i = 0; i < n; ++i) {
        if (!is_pumped_site(i)) b += std::norm(psi[i]);
      }
      out.b_overlap = b;
      return out;
    }
    onsite = (1.0 - opt.mixing) * onsite + opt.mixing * target;
  }
  throw SolverError("self_consistent_edge_mode: fixed-point iteration did not converge at s = " + std::to_string(s), 0.0);
}

Eigen::VectorXcd zero_mode(const ChiralModel& m) {
  return m.modes.wavefunctions.col(m.modes.zero_mode_index.value());
}

}  // namespace

EdgeModeSolution self_consistent_edge_mode(const SSHParams& p, double s, const MeanFieldOptions& options) {
  const ChiralModel model = build_ssh(p);
  if (!(s >= 0.0)) throw std::invalid_argument("self_consistent_edge_mode: s must be non-negative");
  // Continuation from s = 0 keeps track of the edge branch.
  const int steps = std::max(1, static_cast<int>(std::ceil(s / 0.05)));
  Eigen::VectorXcd psi = zero_mode(model);
  EdgeModeSolution sol;
  for (int k = 1; k <= steps; ++k) {
    sol = solve_edge(p, model.hamiltonian, s * k / steps, psi, options);
    psi = sol.psi;
  }
  if (s == 0.0) sol = solve_edge(p, model.hamiltonian, 0.0, psi, options);
  return sol;
}

MeanFieldResult mean_field_self_consistent(const SSHParams& p, const MeanFieldOptions& options) {
  const ChiralModel model = build_ssh(p);
  if (options.curve_points < 2) throw std::invalid_argument("mean_field_self_consistent: need at least two curve points");
  const double target = p.eta * p.eta;
  MeanFieldResult out;
  std::vector<EdgeModeSolution> sols;
  Eigen::VectorXcd psi = zero_mode(model);
  const double ds = options.s_max / (options.curve_points - 1);
  const int sub = std::max(1, static_cast<int>(std::ceil(ds / 0.05)));
  for (int k = 0; k < options.curve_points; ++k) {
    const double s = ds * k;
    EdgeModeSolution sol;
    try {
      if (k == 0) {
        sol = solve_edge(p, model.hamiltonian, 0.0, psi, options);
      } else {
        for (int j = 1; j <= sub; ++j) {
          sol = solve_edge(p, model.hamiltonian, ds * (k - 1) + ds * j / sub, psi, options);
          psi = sol.psi;
        }
      }
    } catch (const SolverError&) {
      // The edge branch has merged with the bulk band.
      out.branch_end = out.curve.back().s;
      break;
    }
    psi = sol.psi;
    out.curve.push_back({s, sol.b_overlap, sol.energy});
    sols.push_back(sol);
  }
  int bracket = -1;
  for (size_t k = 0; k + 1 < out.curve.size(); ++k) {
    if ((out.curve[k].b_overlap - target) * (out.curve[k + 1].b_overlap - target) <= 0.0) {
      bracket = static_cast<int>(k);
      break;
    }
  }
  if (bracket < 0) {
    double lo = out.curve.front().b_overlap, hi = lo;
    for (const auto& c : out.curve) {
      lo = std::min(lo, c.b_overlap);
      hi = std::max(hi, c.b_overlap);
    }
    std::ostringstream msg;
    msg << "mean_field_self_consistent: B overlap " << target << " not reached; attained range [" << lo << ", " << hi
        << "] on s in [0, " << out.curve.back().s << "]";
    throw std::domain_error(msg.str());
  }
  double a = out.curve[bracket].s, b = out.curve[bracket + 1].s;
  EdgeModeSolution left = sols[bracket];
  EdgeModeSolution best = std::abs(left.b_overlap - target) < std::abs(sols[bracket + 1].b_overlap - target) ? left : sols[bracket + 1];
  double best_s = best.psi.isApprox(left.psi) ? a : b;
  for (int it = 0; it < 200 && std::abs(best.b_overlap - target) > options.bisection_tol && b - a > 1e-15; ++it) {
    const double mid = 0.5 * (a + b);
    const EdgeModeSolution sol = solve_edge(p, model.hamiltonian, mid, left.psi, options);
    if (std::abs(sol.b_overlap - target) < std::abs(best.b_overlap - target)) {
      best = sol;
      best_s = mid;
    }
    if ((sol.b_overlap - target) * (left.b_overlap - target) > 0.0) {
      a = mid;
      left = sol;
    } else {
      b = mid;
    }
  }
  out.s = best_s;
  out.edge = best;
  return out;
}

TruncationCheck truncation_convergence(const SSHParams& p, int dim, const QuantumOptions& options) {
  const QuantumSteadyState lo = quantum_steady_state(p, dim, options);
  const QuantumSteadyState hi = quantum_steady_state(p, dim + 1, options);
  return {std::abs(hi.fidelity - lo.fidelity), (hi.site_density - lo.site_density).cwiseAbs().maxCoeff()};
}

double fock_fidelity(const DensityMatrix& rho, const SSHParams& p) {
  const ChiralModel model = build_ssh(p);
  const FockSpace& space = rho.space();
  if (space.num_modes() != p.N) throw std::invalid_argument("fock_fidelity: density matrix has wrong number of sites");
  const Eigen::VectorXcd w = zero_mode(model);
  Eigen::VectorXcd psi1 = Eigen::VectorXcd::Zero(space.total_dim());
  for (int i = 0; i < p.N; ++i) psi1[space.stride(i)] = w[i];
  return (psi1.adjoint() * rho.matrix() * psi1).value().real();
}

QuantumSteadyState quantum_steady_state(const SSHParams& p, int dim, const QuantumOptions& options) {
  p.validate();
  if (p.N > 7 || dim > 4 || dim < 2) throw std::invalid_argument("quantum_steady_state: requires N <= 7 and 2 <= dim <= 4");
  const OpenSystem sys = build_ssh_system(p, dim);
  const Liouvillian L = sys.liouvillian();
  SteadyStateOptions so;
  so.tol = options.solver_tol;
  so.check_degeneracy = options.check_degeneracy;
  so.dense_threshold = options.dense_threshold;
  so.charges = sys.space().total_number();
  SteadyStateResult res = solve_steady_state(L, so);
  QuantumSteadyState out{res.rho, Eigen::VectorXd::Zero(p.N), 0.0, 0.0, 0.0, res.residual};
  for (int i = 0; i < p.N; ++i) out.site_density[i] = expectation(out.rho, number(sys.space(), i)).real();
  out.total_density = out.site_density.sum();
  out.edge_population = truncation_edge_population(out.rho);
  if (out.edge_population > options.edge_tol) {
    std::ostringstream msg;
    msg << "quantum_steady_state: truncation edge carries " << out.edge_population
        << " (dim " << dim << "); the state is not converged or the dynamics is unstable";
    throw SolverError(msg.str(), out.edge_population);
  }
  out.fidelity = fock_fidelity(out.rho, p);
  return out;
}

RatePrediction rate_equation_prediction(double xi) {
  if (!(xi > 0.0 && xi < 1.0)) throw std::invalid_argument("rate_equation_prediction: xi must lie in (0, 1)");
  const double x2 = xi * xi;
  RatePrediction r;
  r.rho0 = x2 / (1.0 + 3.0 * x2);
  r.rho2 = r.rho0;
  r.rho1 = 1.0 - 2.0 * r.rho0;
  return r;
}

namespace {

DensityMatrix single_mode_solve(const SingleModeParams& p, int dim, bool use_charges) {
  FockSpace space({dim});
  const SparseOperator a = annihilation(space, 0);
  const SparseOperator n = number(space, 0);
  const SparseOperator H = n * cplx(p.Delta) + n * n * cplx(0.5 * p.U);
  std::vector<SparseOperator> jumps;
  if (p.kappa_g > 0.0) jumps.push_back(a.adjoint() * cplx(std::sqrt(p.kappa_g)));
  if (p.kappa_l > 0.0) jumps.push_back(a * cplx(std::sqrt(p.kappa_l)));
  if (p.gamma > 0.0) jumps.push_back(a * a * cplx(std::sqrt(p.gamma)));
  SteadyStateOptions so;
  so.check_degeneracy = false;
  so.tol = 1e-9;
  if (use_charges) so.charges = space.total_number();
  return solve_steady_state(build_liouvillian(H, jumps), so).rho;
}

}  // namespace

SingleModeResult single_mode_steady_state(const SingleModeParams& p, int min_dim, int max_dim, double edge_tol) {
  if (!finite_nonneg(p.kappa_g) || !finite_nonneg(p.kappa_l) || !finite_nonneg(p.gamma)) {
    throw std::invalid_argument("single_mode_steady_state: rates must be non-negative");
  }
  if (min_dim < 2 || max_dim < min_dim) throw std::invalid_argument("single_mode_steady_state: bad truncation range");
  int dim = min_dim;
  while (true) {
    DensityMatrix rho = single_mode_solve(p, dim, true);
    const double edge = rho.matrix()(dim - 1, dim - 1).real();
    const bool ok = edge < edge_tol;
    if (ok || dim >= max_dim) {
      const double f = rho.matrix()(1, 1).real();
      SingleModeResult out{rho, f, std::sqrt(std::max(0.0, f)), edge, dim, ok};
      return out;
    }
    dim = std::min(2 * dim, max_dim);
  }
}

NoGoScan single_mode_no_go_scan(const std::vector<double>& gamma_ratios, const std::vector<double>& loss_ratios, int min_dim) {
  if (min_dim < 8) throw std::invalid_argument("single_mode_no_go_scan: truncation must be at least 8");
  NoGoScan scan;
  scan.surface.resize(gamma_ratios.size() * loss_ratios.size());
  parallel_for(scan.surface.size(), [&](size_t k) {
    const size_t gi = k / loss_ratios.size();
    const size_t li = k % loss_ratios.size();
    SingleModeParams sp{1.0, loss_ratios[li], gamma_ratios[gi], 0.0, 0.0};
    NoGoPoint pt{gamma_ratios[gi], loss_ratios[li], 0.0, 0.0, true};
    if (sp.gamma > 0.0 || sp.kappa_l > 0.0) {
      const SingleModeResult r = single_mode_steady_state(sp, min_dim);
      pt.fidelity = r.fidelity;
      pt.root_fidelity = r.root_fidelity;
      pt.flagged = !r.converged;
    }
    scan.surface[k] = pt;
  });
  bool found = false;
  for (const auto& pt : scan.surface) {
    if (pt.flagged) continue;
    if (!found || pt.fidelity > scan.best.fidelity) {
      scan.best = pt;
      found = true;
    }
  }
  return scan;
}

double single_mode_parameter_independence(const SingleModeParams& p, const SingleModeParams& q, int dim) {
  const DensityMatrix a = single_mode_solve(p, dim, false);
  const DensityMatrix b = single_mode_solve(q, dim, false);
  return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff();
}

namespace {

double infidelity_at(const SSHParams& base, double kappa, double eta, double xi, double gamma, int dim, bool* flagged) {
  SSHParams p = base;
  p.kappa = kappa;
  p.eta = eta;
  p.delta = SSHParams::delta_from_xi(xi);
  p.gamma = gamma;
  try {
    return 1.0 - quantum_steady_state(p, dim).fidelity;
  } catch (const std::exception&) {
    if (flagged) *flagged = true;
    return 1.0;
  }
}

// Nelder-Mead on a box-clamped objective.
std::pair<Eigen::VectorXd, double> nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd x0,
                                               double step, int budget, int* evaluations) {
  const Index n = x0.size();
  std::vector<Eigen::VectorXd> simplex{x0};
  for (Index i = 0; i < n; ++i) {
    Eigen::VectorXd x = x0;
    x[i] += step;
    simplex.push_back(x);
  }
  std::vector<double> fv;
  int evals = 0;
  auto eval = [&](const Eigen::VectorXd& x) {
    ++evals;
    return f(x);
  };
  for (const auto& x : simplex) fv.push_back(eval(x));
  while (evals < budget) {
    std::vector<size_t> order(simplex.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(), [&](size_t i, size_t j) { return fv[i] < fv[j]; });
    std::vector<Eigen::VectorXd> s2;
    std::vector<double> f2;
    for (size_t i : order) {
      s2.push_back(simplex[i]);
      f2.push_back(fv[i]);
    }
    simplex = s2;
    fv = f2;
    if (std::abs(fv.back() - fv.front()) <= 1e-12 * std::max(1e-300, std::abs(fv.front()))) break;
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (Index i = 0; i < n; ++i) centroid += simplex[i];
    centroid /= static_cast<double>(n);
    const Eigen::VectorXd xr = centroid + (centroid - simplex.back());
    const double fr = eval(xr);
    if (fr < fv.front()) {
      const Eigen::VectorXd xe = centroid + 2.0 * (centroid - simplex.back());
      const double fe = eval(xe);
      if (fe < fr) {
        simplex.back() = xe;
        fv.back() = fe;
      } else {
        simplex.back() = xr;
        fv.back() = fr;
      }
    } else if (fr < fv[n - 1]) {
      simplex.back() = xr;
      fv.back() = fr;
    } else {
      const bool outside = fr < fv.back();
      const Eigen::VectorXd xc = outside ? Eigen::VectorXd(centroid + 0.5 * (xr - centroid))
                                         : Eigen::VectorXd(centroid + 0.5 * (simplex.back() - centroid));
      const double fc = eval(xc);
      if (fc < std::min(fr, fv.back())) {
        simplex.back() = xc;
        fv.back() = fc;
      } else {
        for (size_t i = 1; i < simplex.size(); ++i) {
          simplex[i] = simplex.front() + 0.5 * (simplex[i] - simplex.front());
          fv[i] = eval(simplex[i]);
        }
      }
    }
  }
  const size_t best = static_cast<size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
  if (evaluations) *evaluations = evals;
  return {simplex[best], fv[best]};
}

}  // namespace

AddedLossScan added_loss_scan(const SSHParams& base, const std::vector<double>& gammas, const AddedLossOptions& options) {
  base.validate();
  if (gammas.empty()) throw std::invalid_argument("added_loss_scan: empty gamma grid");
  for (double g : gammas) {
    if (!finite_nonneg(g)) throw std::invalid_argument("added_loss_scan: gamma must be non-negative");
  }
  const double lx_min = std::log(options.xi_min), lx_max = std::log(options.xi_max);
  auto unpack = [&](const Eigen::VectorXd& x) {
    return std::array<double, 3>{std::exp(std::clamp(x[0], -7.0, 3.0)), std::exp(std::clamp(x[1], -12.0, -0.1)),
                                 std::exp(std::clamp(x[2], lx_min, lx_max))};
  };
  auto optimize = [&](double gamma, AddedLossPoint& pt) {
    Eigen::VectorXd x0(3);
    x0 << std::log(options.kappa0), std::log(options.eta0), std::log(options.xi0);
    int evals = 0;
    auto objective = [&](const Eigen::VectorXd& x) {
      const auto v = unpack(x);
      return infidelity_at(base, v[0], v[1], v[2], gamma, options.dim, nullptr);
    };
    auto [xbest, fbest] = nelder_mead(objective, x0, 0.7, options.optimizer_budget, &evals);
    const auto v = unpack(xbest);
    pt.kappa = v[0];
    pt.eta = v[1];
    pt.xi = v[2];
    pt.infidelity = fbest;
    pt.flagged = evals >= options.optimizer_budget || fbest >= 1.0;
  };

  AddedLossScan scan;
  scan.points.resize(gammas.size());
  if (options.optimize_each) {
    parallel_for(gammas.size(), [&](size_t k) {
      scan.points[k].gamma = gammas[k];
      optimize(gammas[k], scan.points[k]);
    });
  } else {
    // Parameters tuned for the least perturbed system, then held fixed.
    AddedLossPoint ref;
    optimize(*std::min_element(gammas.begin(), gammas.end()), ref);
    parallel_for(gammas.size(), [&](size_t k) {
      AddedLossPoint pt = ref;
      pt.gamma = gammas[k];
      bool flagged = false;
      pt.infidelity = infidelity_at(base, ref.kappa, ref.eta, ref.xi, gammas[k], options.dim, &flagged);
      pt.flagged = flagged;
      scan.points[k] = pt;
    });
  }
  std::vector<size_t> order(gammas.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&](size_t i, size_t j) { return gammas[i] < gammas[j]; });
  scan.monotone = true;
  for (size_t k = 1; k < order.size(); ++k) {
    const double prev = scan.points[order[k - 1]].infidelity;
    if (scan.points[order[k]].infidelity < prev - 1e-9 * std::max(1.0, prev)) scan.monotone = false;
  }
  if (options.optimize_each) {
    std::vector<double> lx, ly;
    for (const auto& pt : scan.points) {
      if (pt.gamma > 0.0 && pt.infidelity > 0.0) {
        lx.push_back(std::log(pt.gamma / base.U));
        ly.push_back(std::log(pt.infidelity));
      }
    }
    if (lx.size() >= 2) {
      const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
      const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
      double sxy = 0.0, sxx = 0.0;
      for (size_t k = 0; k < lx.size(); ++k) {
        sxy += (lx[k] - mx) * (ly[k] - my);
        sxx += (lx[k] - mx) * (lx[k] - mx);
      }
      if (sxx > 0.0) scan.slope = sxy / sxx;
    }
  }
  return scan;
}

double mode_overlap_scaling(const SSHParams& p) {
  const ChiralModel model = build_ssh(p);
  const int z = model.modes.zero_mode_index.value();
  const Eigen::VectorXcd w0 = model.modes.wavefunctions.col(z);
  double total = 0.0;
  for (int alpha = 0; alpha < p.N; ++alpha) {
    if (alpha == z) continue;
    cplx acc = 0.0;
    for (int i = 0; i < p.N; ++i) {
      if (kerr_strength(p, i) == 0.0) continue;
      acc += std::conj(model.modes.wavefunctions(i, alpha)) * w0[i] * std::norm(w0[i]);
    }
    total += std::abs(acc);
  }
  return 2.0 * p.U * total;
}

}  // namespace symbreak::ssh
