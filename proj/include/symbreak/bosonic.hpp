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

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace symbreak {

using cplx = std::complex<double>;
using SparseMatrix = Eigen::SparseMatrix<cplx>;
using Index = Eigen::Index;

// Truncated multi-mode bosonic Hilbert space.
//
// Basis ordering: a basis state |n_0, n_1, ..., n_{M-1}> has flat index
// sum_m n_m * stride_m with stride_{M-1} = 1, i.e. mode 0 is the slowest
// index. Every tensor embedding in the library uses this ordering.
class FockSpace {
 public:
  explicit FockSpace(std::vector<int> mode_dims);

  int num_modes() const { return static_cast<int>(dims_.size()); }
  int dim(int mode) const;
  Index total_dim() const { return total_; }
  Index stride(int mode) const { return strides_.at(static_cast<size_t>(mode)); }
  const std::vector<int>& mode_dims() const { return dims_; }

  int occupation(Index state, int mode) const;
  std::vector<int> occupations(Index state) const;
  Index index_of(std::span<const int> occupations) const;

  // Total photon number of each basis state; a U(1) charge for Liouvillians
  // whose Hamiltonian conserves excitation number.
  std::vector<int> total_number() const;

  bool operator==(const FockSpace& other) const { return dims_ == other.dims_; }

 private:
  std::vector<int> dims_;
  std::vector<Index> strides_;
  Index total_ = 1;
};

// Complex sparse matrix bound to a FockSpace. Immutable once built; all
// algebra returns new operators.
class SparseOperator {
 public:
  SparseOperator(FockSpace space, SparseMatrix entries);

  const FockSpace& space() const { return space_; }
  const SparseMatrix& matrix() const { return entries_; }
  Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(entries_); }

  SparseOperator adjoint() const;
  bool is_hermitian(double tol = 1e-12) const;
  double hermiticity_error() const;

  Eigen::VectorXcd apply(const Eigen::VectorXcd& psi) const;

  SparseOperator operator+(const SparseOperator& rhs) const;
  SparseOperator operator-(const SparseOperator& rhs) const;
  SparseOperator operator*(const SparseOperator& rhs) const;
  SparseOperator operator*(cplx scale) const;
  friend SparseOperator operator*(cplx scale, const SparseOperator& op) { return op * scale; }

 private:
  void require_same_space(const SparseOperator& rhs) const;

  FockSpace space_;
  SparseMatrix entries_;
};

SparseOperator identity(const FockSpace& space);
SparseOperator zero_operator(const FockSpace& space);
SparseOperator annihilation(const FockSpace& space, int mode);
SparseOperator creation(const FockSpace& space, int mode);
SparseOperator number(const FockSpace& space, int mode);

// Single-mode matrix `local` (dim x dim of `mode`) embedded with identities
// on every other mode.
SparseOperator embed(const FockSpace& space, int mode, const SparseMatrix& local);

// sum_k coefficients[k] * ops[k]. All operators must share one space.
SparseOperator compose(std::span<const SparseOperator> ops, std::span<const cplx> coefficients);

// ops[0] * ops[1] * ... (operator product, left to right).
SparseOperator product(std::span<const SparseOperator> ops);

// Commutator [A, B].
SparseOperator commutator(const SparseOperator& a, const SparseOperator& b);

}  // namespace symbreak
