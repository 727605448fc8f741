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

#include "symbreak/bosonic.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace symbreak {

FockSpace::FockSpace(std::vector<int> mode_dims) : dims_(std::move(mode_dims)) {
  if (dims_.empty()) throw std::invalid_argument("FockSpace: at least one mode required");
  for (int d : dims_) {
    if (d < 2) throw std::invalid_argument("FockSpace: every mode dimension must be >= 2, got " + std::to_string(d));
  }
  strides_.assign(dims_.size(), 1);
  for (int m = num_modes() - 2; m >= 0; --m) strides_[m] = strides_[m + 1] * dims_[m + 1];
  total_ = strides_[0] * dims_[0];
}

int FockSpace::dim(int mode) const {
  if (mode < 0 || mode >= num_modes()) throw std::out_of_range("FockSpace: mode index out of range");
  return dims_[mode];
}

int FockSpace::occupation(Index state, int mode) const {
  return static_cast<int>((state / strides_[mode]) % dims_[mode]);
}

std::vector<int> FockSpace::occupations(Index state) const {
  std::vector<int> occ(dims_.size());
  for (int m = 0; m < num_modes(); ++m) occ[m] = occupation(state, m);
  return occ;
}

Index FockSpace::index_of(std::span<const int> occupations) const {
  if (static_cast<int>(occupations.size()) != num_modes()) throw std::invalid_argument("FockSpace: wrong number of occupations");
  Index idx = 0;
  for (int m = 0; m < num_modes(); ++m) {
    if (occupations[m] < 0 || occupations[m] >= dims_[m]) throw std::out_of_range("FockSpace: occupation outside truncation");
    idx += occupations[m] * strides_[m];
  }
  return idx;
}

std::vector<int> FockSpace::total_number() const {
  std::vector<int> n(static_cast<size_t>(total_), 0);
  for (Index s = 0; s < total_; ++s) {
    int sum = 0;
    for (int m = 0; m < num_modes(); ++m) sum += occupation(s, m);
    n[static_cast<size_t>(s)] = sum;
  }
  return n;
}

SparseOperator::SparseOperator(FockSpace space, SparseMatrix entries)
    : space_(std::move(space)), entries_(std::move(entries)) {
  if (entries_.rows() != space_.total_dim() || entries_.cols() != space_.total_dim()) {
    throw std::invalid_argument("SparseOperator: matrix shape does not match FockSpace");
  }
  entries_.makeCompressed();
}

void SparseOperator::require_same_space(const SparseOperator& rhs) const {
  if (!(space_ == rhs.space_)) throw std::invalid_argument("SparseOperator: operands live on different Fock spaces");
}

SparseOperator SparseOperator::adjoint() const { return {space_, SparseMatrix(entries_.adjoint())}; }

double SparseOperator::hermiticity_error() const {
  SparseMatrix diff = entries_ - SparseMatrix(entries_.adjoint());
  return diff.norm();
}

bool SparseOperator::is_hermitian(double tol) const { return hermiticity_error() < tol; }

Eigen::VectorXcd SparseOperator::apply(const Eigen::VectorXcd& psi) const {
  if (psi.size() != space_.total_dim()) throw std::invalid_argument("SparseOperator::apply: vector size mismatch");
  return entries_ * psi;
}

SparseOperator SparseOperator::operator+(const SparseOperator& rhs) const {
  require_same_space(rhs);
  return {space_, SparseMatrix(entries_ + rhs.entries_)};
}

SparseOperator SparseOperator::operator-(const SparseOperator& rhs) const {
  require_same_space(rhs);
  return {space_, SparseMatrix(entries_ - rhs.entries_)};
}

SparseOperator SparseOperator::operator*(const SparseOperator& rhs) const {
  require_same_space(rhs);
  SparseMatrix prod = (entries_ * rhs.entries_).pruned();
  return {space_, std::move(prod)};
}

SparseOperator SparseOperator::operator*(cplx scale) const {
  if (scale == cplx(0.0)) return zero_operator(space_);
  return {space_, SparseMatrix(entries_ * scale)};
}

SparseOperator identity(const FockSpace& space) {
  SparseMatrix id(space.total_dim(), space.total_dim());
  id.setIdentity();
  return {space, std::move(id)};
}

SparseOperator zero_operator(const FockSpace& space) {
  return {space, SparseMatrix(space.total_dim(), space.total_dim())};
}

SparseOperator embed(const FockSpace& space, int mode, const SparseMatrix& local) {
  const int d = space.dim(mode);
  if (local.rows() != d || local.cols() != d) throw std::invalid_argument("embed: local matrix has wrong dimension");
  // Column s couples only to rows that agree with it on every other mode.
  std::vector<Eigen::Triplet<cplx>> trips;
  const Index total = space.total_dim();
  trips.reserve(static_cast<size_t>(local.nonZeros() * (total / d)));
  const Index stride = space.stride(mode);
  for (Index s = 0; s < total; ++s) {
    const int n = space.occupation(s, mode);
    const Index base = s - n * stride;
    for (SparseMatrix::InnerIterator it(local, n); it; ++it) {
      trips.emplace_back(base + it.row() * stride, s, it.value());
    }
  }
  SparseMatrix m(total, total);
  m.setFromTriplets(trips.begin(), trips.end());
  return {space, std::move(m)};
}

SparseOperator annihilation(const FockSpace& space, int mode) {
  if (mode < 0 || mode >= space.num_modes()) throw std::out_of_range("annihilation: mode index out of range");
  const int d = space.dim(mode);
  SparseMatrix a(d, d);
  for (int n = 1; n < d; ++n) a.insert(n - 1, n) = std::sqrt(static_cast<double>(n));
  return embed(space, mode, a);
}

SparseOperator creation(const FockSpace& space, int mode) { return annihilation(space, mode).adjoint(); }

SparseOperator number(const FockSpace& space, int mode) {
  if (mode < 0 || mode >= space.num_modes()) throw std::out_of_range("number: mode index out of range");
  const int d = space.dim(mode);
  SparseMatrix n(d, d);
  for (int k = 1; k < d; ++k) n.insert(k, k) = static_cast<double>(k);
  return embed(space, mode, n);
}

SparseOperator compose(std::span<const SparseOperator> ops, std::span<const cplx> coefficients) {
  if (ops.size() != coefficients.size()) throw std::invalid_argument("compose: ops and coefficients differ in length");
  if (ops.empty()) throw std::invalid_argument("compose: empty operator list");
  const FockSpace& space = ops.front().space();
  SparseMatrix acc(space.total_dim(), space.total_dim());
  for (size_t k = 0; k < ops.size(); ++k) {
    if (!(ops[k].space() == space)) throw std::invalid_argument("compose: operators live on different Fock spaces");
    if (coefficients[k] != cplx(0.0)) acc += coefficients[k] * ops[k].matrix();
  }
  return {space, acc.pruned()};
}

SparseOperator product(std::span<const SparseOperator> ops) {
  if (ops.empty()) throw std::invalid_argument("product: empty operator list");
  SparseOperator acc = ops.front();
  for (size_t k = 1; k < ops.size(); ++k) acc = acc * ops[k];
  return acc;
}

SparseOperator commutator(const SparseOperator& a, const SparseOperator& b) { return a * b - b * a; }

}  // namespace symbreak
