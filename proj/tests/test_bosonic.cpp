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

#include <array>
#include <random>

#include "symbreak/bosonic.hpp"

using namespace symbreak;

TEST_SUITE("bosonic") {

TEST_CASE("basis ordering puts mode 0 slowest") {
  FockSpace space({3, 4, 2});
  CHECK(space.total_dim() == 24);
  CHECK(space.stride(0) == 8);
  CHECK(space.stride(1) == 2);
  CHECK(space.stride(2) == 1);
  const std::array<int, 3> occ{2, 1, 1};
  const Index idx = space.index_of(occ);
  CHECK(idx == 2 * 8 + 1 * 2 + 1);
  CHECK(space.occupations(idx) == std::vector<int>{2, 1, 1});
  for (Index s = 0; s < space.total_dim(); ++s) CHECK(space.index_of(space.occupations(s)) == s);
}

TEST_CASE("invalid spaces and occupations are rejected") {
  CHECK_THROWS_AS(FockSpace({}), std::invalid_argument);
  CHECK_THROWS_AS(FockSpace({3, 1}), std::invalid_argument);
  FockSpace space({2, 2});
  const std::array<int, 2> bad{0, 2};
  CHECK_THROWS_AS(space.index_of(bad), std::out_of_range);
  CHECK_THROWS_AS(annihilation(space, 2), std::out_of_range);
}

TEST_CASE("ladder operators") {
  FockSpace space({5, 3});
  const auto a = annihilation(space, 0);
  const auto ad = creation(space, 0);
  const Eigen::MatrixXcd comm = commutator(a, ad).dense();
  for (Index s = 0; s < space.total_dim(); ++s) {
    // [a, a^dag] = 1 except on the top level, where it is 1 - d.
    const double expected = space.occupation(s, 0) == 4 ? -4.0 : 1.0;
    CHECK(std::abs(comm(s, s) - expected) < 1e-12);
  }
  CHECK((number(space, 0).dense() - (ad * a).dense()).norm() < 1e-12);
  CHECK((ad.dense() - a.dense().adjoint()).norm() < 1e-15);
  CHECK(number(space, 1).is_hermitian());

  // a |n> = sqrt(n) |n - 1> on basis states.
  const std::array<int, 2> occ{3, 2}, lower{2, 2};
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(space.total_dim());
  psi[space.index_of(occ)] = 1.0;
  const Eigen::VectorXcd out = a.apply(psi);
  CHECK(std::abs(out[space.index_of(lower)] - std::sqrt(3.0)) < 1e-14);
  CHECK(std::abs(out.norm() - std::sqrt(3.0)) < 1e-14);
}

TEST_CASE("operators on different modes commute") {
  FockSpace space({3, 3, 2});
  for (int m = 0; m < 3; ++m)
    for (int k = 0; k < 3; ++k) {
      if (m == k) continue;
      CHECK(commutator(annihilation(space, m), creation(space, k)).matrix().norm() < 1e-14);
    }
}

TEST_CASE("total number charge matches the number operators") {
  FockSpace space({3, 2, 4});
  const auto charge = space.total_number();
  const Eigen::MatrixXcd n = (number(space, 0) + number(space, 1) + number(space, 2)).dense();
  for (Index s = 0; s < space.total_dim(); ++s) CHECK(std::abs(n(s, s) - double(charge[s])) < 1e-14);
}

TEST_CASE("compose and product are linear and associative") {
  FockSpace space({3, 3});
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  const std::vector<SparseOperator> ops{annihilation(space, 0), creation(space, 1), number(space, 0)};
  const std::vector<cplx> c{{g(rng), g(rng)}, {g(rng), g(rng)}, {g(rng), g(rng)}};
  const Eigen::MatrixXcd direct = c[0] * ops[0].dense() + c[1] * ops[1].dense() + c[2] * ops[2].dense();
  CHECK((compose(ops, c).dense() - direct).norm() < 1e-13);
  CHECK((product(ops).dense() - ops[0].dense() * ops[1].dense() * ops[2].dense()).norm() < 1e-12);
  CHECK_THROWS_AS(ops[0] + annihilation(FockSpace({2, 3}), 0), std::invalid_argument);
}

TEST_CASE("embed places a local matrix on one mode") {
  FockSpace space({2, 3});
  SparseMatrix local(3, 3);
  local.insert(0, 2) = cplx(0.5, -1.0);
  const Eigen::MatrixXcd full = embed(space, 1, local).dense();
  Eigen::MatrixXcd expected = Eigen::MatrixXcd::Zero(6, 6);
  for (int i = 0; i < 2; ++i) expected(3 * i + 0, 3 * i + 2) = cplx(0.5, -1.0);
  CHECK((full - expected).norm() < 1e-15);
}

}  // TEST_SUITE
