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


#include <doctest.h>

#include <cmath>
#include <numbers>

#include "symbreak/ssh.hpp"

using namespace symbreak;
using namespace symbreak::ssh;

TEST_SUITE("chiral-ssh") {

TEST_CASE("parameter conventions") {
  SSHParams p;
  p.delta = SSHParams::delta_from_xi(0.1);
  CHECK(p.xi() == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(p.topological());
  p.N = 4;
  CHECK_THROWS_AS(build_ssh(p), std::invalid_argument);
  p.N = 5;
  p.kappa = -1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  CHECK(is_pumped_site(0));
  CHECK_FALSE(is_pumped_site(1));
}

TEST_CASE("chiral pairing and the zero mode") {
  SSHParams p;
  p.N = 21;
  p.delta = SSHParams::delta_from_xi(0.3);
  const ChiralModel m = build_ssh(p);
  const auto& md = m.modes;
  CHECK(md.unitarity_error < 1e-12);
  CHECK(md.pairing_error < 1e-12);
  REQUIRE(md.zero_mode_index.has_value());
  const int z = *md.zero_mode_index;
  CHECK(std::abs(md.energies[z]) < 1e-12);
  for (int a = 0; a < p.N; ++a) {
    CHECK(md.energies[md.chiral_partner[a]] == doctest::Approx(-md.energies[a]).epsilon(1e-12));
  }
  // The zero mode lives on sublattice A only.
  double on_b = 0.0;
  for (int i = 1; i < p.N; i += 2) on_b += std::norm(md.psi(z, i));
  CHECK(on_b < 1e-24);
  // and matches the analytic edge state xi^((i-1)/2) on odd sites.
  const Eigen::VectorXd edge = edge_wavefunction(p);
  CHECK(std::abs(md.wavefunctions.col(z).dot(edge.cast<cplx>())) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(edge[2] / edge[0]) == doctest::Approx(0.3).epsilon(1e-12));

  SSHParams trivial = p;
  trivial.delta = 0.4;
  CHECK_THROWS_AS(edge_wavefunction(trivial), std::domain_error);
}

TEST_CASE("mirror reflection maps delta to -delta for odd chains") {
  const Eigen::MatrixXcd h1 = ssh_hopping_matrix(7, 1.0, 0.35);
  const Eigen::MatrixXcd h2 = ssh_hopping_matrix(7, 1.0, -0.35);
  const Eigen::MatrixXcd flipped = h2.colwise().reverse().rowwise().reverse();
  CHECK((h1 - flipped).norm() < 1e-15);
}

TEST_CASE("site and mode dissipators agree") {
  SSHParams p;
  p.N = 3;
  p.eta = 0.3;
  CHECK(dissipator_mode_identity_check(p, 2) < 1e-10);
  for (unsigned long long seed = 0; seed < 4; ++seed) {
    const Eigen::MatrixXcd h = random_chiral_hamiltonian(4, seed);
    const Eigen::VectorXd s = sublattice_signs(4);
    CHECK((s.asDiagonal() * h * s.asDiagonal() + h).norm() < 1e-14);
    CHECK(dissipator_mode_identity_check(h, s, 0.6, 0.5, 2) < 1e-10);
  }
  CHECK_THROWS_AS(dissipator_mode_identity_check(random_chiral_hamiltonian(9, 1), sublattice_signs(9), 1, 0.1, 2),
                  std::length_error);
}

TEST_CASE("gapped linear chain thermalizes every mode") {
  const double eta = 0.1;
  const ThermalResult th = thermal_mode_occupations(ssh_hopping_matrix(10, 1.0, 0.5), sublattice_signs(10), 1e-4, eta);
  CHECK((th.occupations.array() - thermal_occupation(eta)).abs().maxCoeff() < 1e-6);
}

TEST_CASE("semiclassical right-hand side and dynamical matrix") {
  SSHParams p;
  p.N = 7;
  p.U = 0.3;
  p.gamma = 0.2;
  Eigen::VectorXcd v(p.N);
  for (int i = 0; i < p.N; ++i) v[i] = cplx(std::cos(1.3 * i), std::sin(0.7 * i + 0.2));
  CHECK((semiclassical_rhs(v, p) - dynamical_matrix(v, p) * v).norm() < 1e-13);
  // With kappa = 0 the dynamics conserves the norm.
  SSHParams closed = p;
  closed.kappa = 0.0;
  closed.gamma = 0.0;
  CHECK(std::abs(v.dot(semiclassical_rhs(v, closed)).real()) < 1e-13);
}

TEST_CASE("FFT peak frequency of a pure tone") {
  const double omega = -1.2345, dt = 0.05;
  std::vector<cplx> s;
  for (int k = 0; k < 8192; ++k) s.push_back(std::polar(1.0, omega * k * dt));
  CHECK(fft_peak_frequency(s, dt) == doctest::Approx(omega).epsilon(1e-4));
}

TEST_CASE("limit cycle of the weakly interacting laser") {
  SSHParams p;
  p.N = 11;
  p.U = 0.001;
  p.delta = -0.65;
  p.eta = 0.2;
  const LimitCycle lc = limit_cycle_solve(p);
  CHECK(lc.residual < 1e-8);
  CHECK(lc.stable);
  CHECK(lc.floquet_multipliers.cwiseAbs().maxCoeff() < 1.0);
  // D(d0) d0 = i lambda d0, checked directly.
  CHECK((dynamical_matrix(lc.d0, p) * lc.d0 - cplx(0.0, lc.lambda) * lc.d0).norm() / lc.d0.norm() < 1e-8);
  p.U = 0.0;
  CHECK_THROWS_AS(limit_cycle_solve(p), LimitCycleError);
}

TEST_CASE("mean-field overlap curve") {
  SSHParams p;
  p.N = 21;
  p.delta = -0.4;
  p.eta = 0.1;
  const auto r = mean_field_self_consistent(p);
  REQUIRE(r.curve.size() > 5);
  CHECK(r.curve[0].b_overlap < 1e-20);
  for (size_t k = 1; k < 5; ++k) CHECK(r.curve[k].b_overlap > r.curve[k - 1].b_overlap);
  CHECK(r.edge.b_overlap == doctest::Approx(0.01).epsilon(1e-6));
  // Self-consistency: the onsite potential reproduces the edge eigenvector.
  const ChiralModel m = build_ssh(p);
  Eigen::MatrixXcd h = m.hamiltonian;
  for (int i = 0; i < p.N; ++i) h(i, i) += r.s * std::norm(r.edge.psi[i]);
  CHECK((h * r.edge.psi - r.edge.energy * r.edge.psi).norm() < 1e-8);
  p.eta = 0.9;
  CHECK_THROWS_AS(mean_field_self_consistent(p), std::domain_error);
}

TEST_CASE("rate equations") {
  for (double xi : {0.3, 0.1, 0.01}) {
    const auto r = rate_equation_prediction(xi);
    CHECK(r.rho0 + r.rho1 + r.rho2 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.rho0 == doctest::Approx(xi * xi / (1 + 3 * xi * xi)).epsilon(1e-14));
  }
}

TEST_CASE("exact steady state of a short chain") {
  SSHParams p;
  p.N = 3;
  p.delta = SSHParams::delta_from_xi(0.2);
  p.eta = 0.04;
  const auto q = quantum_steady_state(p, 3);
  CHECK(q.rho.diagnose().valid);
  CHECK(q.site_density.sum() == doctest::Approx(q.total_density).epsilon(1e-12));
  CHECK(q.fidelity > 0.5);
  CHECK(q.fidelity <= 1.0 + 1e-12);
  CHECK(q.residual < 1e-9);
  CHECK(fock_fidelity(q.rho, p) == doctest::Approx(q.fidelity).epsilon(1e-12));
  const auto tc = truncation_convergence(p, 3);
  CHECK(tc.fidelity_change < 0.05);
}

TEST_CASE("single-mode model") {
  // Gain and loss only: thermal populations with ratio g/l.
  SingleModeParams p{0.3, 1.0, 0.0, 0.0, 0.0};
  const auto r = single_mode_steady_state(p);
  CHECK(r.converged);
  CHECK(r.fidelity == doctest::Approx(0.7 * 0.3).epsilon(1e-8));
  CHECK(r.root_fidelity == doctest::Approx(std::sqrt(r.fidelity)).epsilon(1e-14));
  SingleModeParams a{1.0, 0.1, 0.8, 0.0, 0.0}, b{1.0, 0.1, 0.8, 2.3, -0.7};
  CHECK(single_mode_parameter_independence(a, b, 12) < 1e-10);
}

TEST_CASE("edge-mode overlap scales linearly in xi") {
  const auto value = [](double xi) {
    SSHParams p;
    p.N = 11;
    p.delta = SSHParams::delta_from_xi(xi);
    return mode_overlap_scaling(p);
  };
  const double ratio = value(0.05) / value(0.1);
  CHECK(ratio == doctest::Approx(0.5).epsilon(0.05));
}

}  // TEST_SUITE
