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

#include "symbreak/lindblad.hpp"

using namespace symbreak;

namespace {

// Single mode with gain rate g and loss rate l.
Liouvillian gain_loss_mode(int dim, double g, double l, double omega = 0.7) {
  FockSpace space({dim});
  const auto a = annihilation(space, 0);
  return build_liouvillian(number(space, 0) * cplx(omega), {a * cplx(std::sqrt(l)), a.adjoint() * cplx(std::sqrt(g))});
}

Eigen::VectorXcd vec_row_major(const Eigen::MatrixXcd& m) {
  Eigen::VectorXcd v(m.size());
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) v[i * m.cols() + j] = m(i, j);
  return v;
}

Liouvillian driven_pair(int dim) {
  FockSpace space({dim, dim});
  const auto a = annihilation(space, 0), b = annihilation(space, 1);
  const auto h = (a.adjoint() * b + b.adjoint() * a) * cplx(0.8) + number(space, 0) * number(space, 0) * cplx(0.3);
  return build_liouvillian(h, {a * cplx(1.1), b.adjoint() * cplx(0.4), b * cplx(0.9)});
}

}  // namespace

TEST_SUITE("lindblad") {

TEST_CASE("superoperator matches the matrix-form action") {
  const Liouvillian l = driven_pair(3);
  for (unsigned long long seed = 0; seed < 4; ++seed) {
    const DensityMatrix rho = random_density_matrix(l.space(), seed);
    const Eigen::VectorXcd lhs = l.superop() * vec_row_major(rho.matrix());
    CHECK((lhs - vec_row_major(l.apply(rho.matrix()))).norm() < 1e-12);
  }
}

TEST_CASE("dynamics preserves trace and Hermiticity") {
  const Liouvillian l = driven_pair(3);
  for (unsigned long long seed = 10; seed < 15; ++seed) {
    const Eigen::MatrixXcd d = l.apply(random_density_matrix(l.space(), seed).matrix());
    CHECK(std::abs(d.trace()) < 1e-12);
    CHECK((d - d.adjoint()).norm() < 1e-12);
  }
}

TEST_CASE("adjoint action is the Heisenberg dual") {
  const Liouvillian l = driven_pair(3);
  const DensityMatrix rho = random_density_matrix(l.space(), 21);
  const DensityMatrix o = random_density_matrix(l.space(), 22);  // any operator will do
  const cplx schrodinger = (o.matrix() * l.apply(rho.matrix())).trace();
  const cplx heisenberg = (l.apply_adjoint(o.matrix()) * rho.matrix()).trace();
  CHECK(std::abs(schrodinger - heisenberg) < 1e-12);
  const SparseOperator n = number(l.space(), 0);
  CHECK(std::abs(moment_rhs(rho, l, n) - (n.dense() * l.apply(rho.matrix())).trace()) < 1e-12);
}

TEST_CASE("gain and loss give a geometric steady state") {
  // Detailed balance of the birth-death chain: p(n+1)/p(n) = g/l.
  const double g = 0.3, l = 1.0;
  const DensityMatrix rho = steady_state(gain_loss_mode(30, g, l));
  const Eigen::VectorXd p = rho.populations();
  for (int n = 0; n < 10; ++n) CHECK(p[n + 1] / p[n] == doctest::Approx(g / l).epsilon(1e-9));
  const double nbar = (number(rho.space(), 0).dense() * rho.matrix()).trace().real();
  CHECK(nbar == doctest::Approx(g / (l - g)).epsilon(1e-8));
  CHECK(rho.diagnose().valid);
}

TEST_CASE("charge-restricted, dense and sparse paths agree") {
  const Liouvillian l = driven_pair(5);
  SteadyStateOptions full;
  const auto r_full = solve_steady_state(l, full);
  CHECK(r_full.dense_path);

  SteadyStateOptions sparse;
  sparse.dense_threshold = 10;
  sparse.check_degeneracy = true;
  const auto r_sparse = solve_steady_state(l, sparse);
  CHECK_FALSE(r_sparse.dense_path);
  CHECK(trace_distance(r_full.rho, r_sparse.rho) < 1e-9);
  CHECK(r_sparse.gap_estimate > 1e-6);
  CHECK(r_sparse.residual < 1e-10);

  SteadyStateOptions mid;
  mid.dense_threshold = 1000;
  mid.charges = l.space().total_number();
  const auto r_block = solve_steady_state(l, mid);
  CHECK(r_block.solved_dimension < l.space().total_dim() * l.space().total_dim());
  CHECK(trace_distance(r_full.rho, r_block.rho) < 1e-9);
}

TEST_CASE("restricted superoperator is a block of the full one") {
  const Liouvillian l = driven_pair(3);
  const auto charge = l.space().total_number();
  const Index d = l.space().total_dim();
  std::vector<Index> pairs;
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j)
      if (charge[i] == charge[j]) pairs.push_back(i * d + j);
  double leakage = -1.0;
  const SparseMatrix block = l.restricted_superop(pairs, &leakage);
  CHECK(leakage < 1e-12);
  const Eigen::MatrixXcd full(l.superop());
  double err = 0.0;
  for (size_t r = 0; r < pairs.size(); ++r)
    for (size_t c = 0; c < pairs.size(); ++c) err = std::max(err, std::abs(full(pairs[r], pairs[c]) - block.coeff(r, c)));
  CHECK(err < 1e-14);
}

TEST_CASE("invalid charges are rejected") {
  const Liouvillian l = driven_pair(3);
  SteadyStateOptions o;
  std::vector<int> bad(static_cast<size_t>(l.space().total_dim()), 0);
  bad[1] = 1;
  o.charges = bad;
  CHECK_THROWS_AS(solve_steady_state(l, o), std::invalid_argument);
  CHECK_THROWS_AS(build_liouvillian(annihilation(l.space(), 0), {}), std::invalid_argument);
}

TEST_CASE("closed systems have a degenerate null space") {
  FockSpace space({3});
  const Liouvillian l = build_liouvillian(number(space, 0), {});
  CHECK_THROWS_AS(solve_steady_state(l), DegenerateSteadyStateError);
  SteadyStateOptions o;
  o.allow_degenerate = true;
  const auto r = solve_steady_state(l, o);
  CHECK(r.degenerate);
  CHECK(r.basis.size() >= 3);
}

TEST_CASE("evolution reproduces exponential decay") {
  FockSpace space({3});
  const double kappa = 0.7;
  const Liouvillian l = build_liouvillian(number(space, 0), {annihilation(space, 0) * cplx(std::sqrt(kappa))});
  const auto path = evolve(l, DensityMatrix::basis_state(space, 1), {0.0, 0.5, 2.0, 5.0});
  for (double t : {0.0, 0.5, 2.0, 5.0}) {
    const size_t k = t == 0.0 ? 0 : t == 0.5 ? 1 : t == 2.0 ? 2 : 3;
    CHECK(path[k].populations()[1] == doctest::Approx(std::exp(-kappa * t)).epsilon(1e-9));
    CHECK(std::abs(path[k].trace() - 1.0) < 1e-10);
  }
}

TEST_CASE("evolution relaxes to the steady state") {
  const Liouvillian l = gain_loss_mode(12, 0.2, 1.0);
  const auto rho_ss = steady_state(l);
  const auto path = evolve(l, DensityMatrix::vacuum(l.space()), {60.0});
  CHECK(trace_distance(path.back(), rho_ss) < 1e-8);
}

TEST_CASE("random density matrices are valid states") {
  FockSpace space({3, 2});
  for (int rank : {1, 2, -1}) {
    const auto rho = random_density_matrix(space, 5, rank);
    const auto diag = rho.diagnose();
    CHECK(diag.valid);
    CHECK(diag.min_eigenvalue > -1e-12);
  }
  CHECK(truncation_edge_population(DensityMatrix::vacuum(space)) == 0.0);
  CHECK(truncation_edge_population(DensityMatrix::basis_state(space, space.total_dim() - 1)) == doctest::Approx(1.0));
}

}  // TEST_SUITE
