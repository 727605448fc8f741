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
#include <cstdlib>
#include <random>

#include "symbreak/parallel.hpp"
#include "symbreak/pt_dimer.hpp"

using namespace symbreak;
using namespace symbreak::dimer;

namespace {

DimerParams random_lasing(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DimerParams p;
  p.kappa_a = 1.0 + 4.0 * u(rng);
  p.kappa_b = 0.2 + 0.7 * p.kappa_a * u(rng);
  p.J = std::sqrt(p.kappa_a * p.kappa_b) / (2.0 * (1.05 + 2.0 * u(rng)));
  p.n_star = 1.0 + 10.0 * u(rng);
  return p;
}

}  // namespace

TEST_SUITE("pt-dimer") {

TEST_CASE("parameter validation") {
  DimerParams p;
  p.kappa_a = -1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = DimerParams{};
  p.n_star = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  CHECK_NOTHROW(p.validate(false));
  CHECK(parse_model(model_name(Model::DetunedGainSat)) == Model::DetunedGainSat);
}

TEST_CASE("lasing fixed point solves the amplitude equations") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 20; ++k) {
    const DimerParams p = random_lasing(rng);
    const auto fp = lasing_fixed_point(p, Model::NonlinearHop);
    REQUIRE(fp.has_value());
    const auto d = semiclassical_rhs(*fp, p, Model::NonlinearHop);
    CHECK(std::abs(d.a) + std::abs(d.b) < 1e-12);
    // Lasing density n = 2 n* (sqrt(ka kb) / (2 J) - 1).
    CHECK(fp->density() == doctest::Approx(2.0 * p.n_star * (p.threshold_ratio() - 1.0)).epsilon(1e-12));
  }
}

TEST_CASE("no lasing branch above threshold") {
  DimerParams p;
  p.J = 1.3;  // 2J > sqrt(6)
  CHECK_FALSE(p.lasing());
  CHECK_FALSE(lasing_fixed_point(p, Model::NonlinearHop).has_value());
  CHECK(mean_field_steady_state(p).branch == Branch::Trivial);
}

TEST_CASE("density-block spectrum matches the closed form") {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 20; ++k) {
    const DimerParams p = random_lasing(rng);
    const auto s = density_block_spectrum(p);
    REQUIRE(s.closed_form.has_value());
    for (int i = 0; i < 2; ++i) CHECK(std::abs(s.numeric[i] - (*s.closed_form)[i]) < 1e-8);
  }
}

TEST_CASE("exact moment equations from the Liouvillian") {
  DimerParams p;
  p.J = 0.8;
  p.n_star = 3.0;
  const OpenSystem sys = build_dimer_model(p, 8, 8);
  const Liouvillian l = sys.liouvillian();
  const DimerObservables obs = dimer_observables(sys.space());
  // Random states supported below the truncation edge, so the truncated
  // operators act like the untruncated ones.
  const FockSpace small({7, 7});
  const SparseOperator f = identity(sys.space()) + (obs.n_a + obs.n_b) * cplx(1.0 / (2.0 * p.n_star));
  for (unsigned long long seed = 0; seed < 5; ++seed) {
    const DensityMatrix r7 = random_density_matrix(small, seed);
    Eigen::MatrixXcd big = Eigen::MatrixXcd::Zero(64, 64);
    for (Index i = 0; i < 49; ++i)
      for (Index j = 0; j < 49; ++j) big((i / 7) * 8 + i % 7, (j / 7) * 8 + j % 7) = r7.matrix()(i, j);
    const DensityMatrix rho(sys.space(), big);
    const double na = expectation(rho, obs.n_a).real(), nb = expectation(rho, obs.n_b).real();
    const double c = expectation(rho, obs.current).real();
    const double fc = expectation(rho, f * obs.current).real();
    const double fdiff = expectation(rho, f * (obs.n_a - obs.n_b)).real();
    CHECK(moment_rhs(rho, l, obs.n_a).real() == doctest::Approx(-p.J * fc - p.kappa_a * na).epsilon(1e-10));
    CHECK(moment_rhs(rho, l, obs.n_b).real() == doctest::Approx(p.J * fc + p.kappa_b * nb + p.kappa_b).epsilon(1e-10));
    CHECK(moment_rhs(rho, l, obs.current).real() ==
          doctest::Approx(2.0 * p.J * fdiff - 0.5 * (p.kappa_a - p.kappa_b) * c).epsilon(1e-10));
  }
}

TEST_CASE("mean-field equations relax to their fixed point") {
  DimerParams p;
  const auto fp = mean_field_fixed_point(p);
  REQUIRE(fp.has_value());
  const auto r = mean_field_rhs(*fp, p);
  CHECK(std::abs(r.n_a) + std::abs(r.n_b) + std::abs(r.c) < 1e-10);
  const auto end = integrate_mean_field({0.5, 0.5, 0.0}, p, 200.0);
  CHECK(end.n_a == doctest::Approx(fp->n_a).epsilon(1e-6));
  CHECK(end.c == doctest::Approx(fp->c).epsilon(1e-6));
  // Jacobian by finite differences.
  const Eigen::Matrix3d jac = mean_field_jacobian(*fp, p);
  const double h = 1e-6;
  for (int k = 0; k < 3; ++k) {
    MeanFieldState up = *fp, dn = *fp;
    double* pu = k == 0 ? &up.n_a : k == 1 ? &up.n_b : &up.c;
    double* pd = k == 0 ? &dn.n_a : k == 1 ? &dn.n_b : &dn.c;
    *pu += h;
    *pd -= h;
    const auto fu = mean_field_rhs(up, p), fd = mean_field_rhs(dn, p);
    CHECK(jac(0, k) == doctest::Approx((fu.n_a - fd.n_a) / (2 * h)).epsilon(1e-6));
    CHECK(jac(2, k) == doctest::Approx((fu.c - fd.c) / (2 * h)).epsilon(1e-6));
  }
}

TEST_CASE("detuned hopping is unstable at every density, gain saturation is not") {
  for (double delta : {0.1, 0.3, 1.0}) {
    DimerParams p;
    p.J = 1.0;
    p.kappa_a = p.kappa_b = 1.0;
    p.n_star = 1.0;
    p.delta = delta;
    for (double n : {0.0, 1.0, 37.0, 1e4}) {
      const auto closed = detuned_hop_eigenvalues(p, n);
      const Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(detuned_hop_matrix(p, n));
      double worst = 1.0;
      for (const auto& c : closed) {
        double best = 1e9;
        for (Index i = 0; i < 2; ++i) best = std::min(best, std::abs(es.eigenvalues()[i] - c));
        worst = std::min(worst, best);
        CHECK(best < 1e-10);
      }
      (void)worst;
    }
    const auto cert = instability_certificate(p, 1e4);
    CHECK(cert.unstable_everywhere);
    CHECK(cert.witness_max_real > 0.0);
    CHECK(cert.gain_sat_stabilizes);
  }
}

TEST_CASE("Langevin ensembles are reproducible and thread-count independent") {
  DimerParams p;
  p.kappa_a = 1.0;
  p.kappa_b = 0.2;
  p.J = std::sqrt(0.2) / 4.0;
  p.n_star = 30.0;
  LangevinOptions o;
  o.t_max = 5.0;
  o.dt = 0.01;
  o.sample_interval = 0.5;
  const auto a = langevin_ensemble(p, 9, 6, o);
  setenv("SYMBREAK_THREADS", "1", 1);
  const auto b = langevin_ensemble(p, 9, 6, o);
  unsetenv("SYMBREAK_THREADS");
  REQUIRE(a.size() == b.size());
  for (size_t k = 0; k < a.size(); ++k) {
    REQUIRE(a[k].states.size() == b[k].states.size());
    for (size_t t = 0; t < a[k].states.size(); ++t) {
      CHECK(a[k].states[t].a == b[k].states[t].a);
      CHECK(a[k].states[t].b == b[k].states[t].b);
    }
  }
  CHECK(a[0].states.back().a != a[1].states.back().a);
  const auto single = langevin_simulate(p, counter_seed(9, 2), o);
  CHECK(single.states.back().a == a[2].states.back().a);
}

TEST_CASE("noise-free Langevin follows the deterministic fixed point") {
  DimerParams p;
  p.kappa_a = 1.0;
  p.kappa_b = 0.3;
  p.J = std::sqrt(0.3) / 3.0;
  p.n_star = 4.0;
  LangevinOptions o;
  o.noise_scale = 0.0;
  o.t_max = 2.0;
  o.dt = 1e-3;
  const auto fp = lasing_fixed_point(p, Model::NonlinearHop);
  const auto tr = langevin_simulate(p, 1, o);
  CHECK(tr.states.back().density() == doctest::Approx(fp->density()).epsilon(1e-9));
  o.dt = 0.5;
  CHECK_THROWS_AS(langevin_simulate(p, 1, o), std::invalid_argument);
}

TEST_CASE("linearized phase diffusion scales as r^2/(1-r)^2 / rho_a^2") {
  const auto diffusion = [](double r, double n_star) {
    DimerParams p;
    p.kappa_a = 1.0;
    p.kappa_b = r;
    p.J = std::sqrt(r) / 4.0;
    p.n_star = n_star;
    return std::make_pair(linearized_phase_diffusion(p), std::norm(lasing_fixed_point(p, Model::NonlinearHop)->a));
  };
  const auto [d1, rho1] = diffusion(0.1, 10.0);
  const auto [d2, rho2] = diffusion(0.2, 10.0);
  const auto shape = [](double r) { return r * r / ((1 - r) * (1 - r)); };
  CHECK(d2 * rho2 / (d1 * rho1) == doctest::Approx(shape(0.2) / shape(0.1)).epsilon(1e-12));
  const auto [d3, rho3] = diffusion(0.1, 20.0);
  CHECK(d3 * rho3 == doctest::Approx(d1 * rho1).epsilon(1e-12));
}

TEST_CASE("phase diffusion estimate on synthetic random walks") {
  // Phases performing a random walk with known diffusion constant.
  const double D = 0.02, dt = 0.1;
  std::vector<Trajectory> ens;
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0.0, std::sqrt(D * dt));
  for (int k = 0; k < 400; ++k) {
    Trajectory t;
    double phi = 0.0;
    for (int s = 0; s < 200; ++s) {
      t.times.push_back(s * dt);
      t.states.push_back({std::polar(3.0, phi), std::polar(1.0, phi)});
      phi += g(rng);
    }
    ens.push_back(std::move(t));
  }
  const auto est = phase_diffusion_estimate(ens);
  CHECK(est.diffusion == doctest::Approx(D).epsilon(0.15));
  CHECK(est.standard_error > 0.0);
}

}  // TEST_SUITE
