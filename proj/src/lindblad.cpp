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

#include "symbreak/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/SVD>
#include <umfpack.h>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace symbreak {

namespace {

using RowMajorMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double one_norm(const SparseMatrix& m) {
  double best = 0.0;
  for (Index c = 0; c < m.outerSize(); ++c) {
    double sum = 0.0;
    for (SparseMatrix::InnerIterator it(m, c); it; ++it) sum += std::abs(it.value());
    best = std::max(best, sum);
  }
  return best;
}

Eigen::VectorXcd vectorize(const Eigen::MatrixXcd& rho) {
  RowMajorMatrix rm = rho;
  return Eigen::Map<const Eigen::VectorXcd>(rm.data(), rm.size());
}

Eigen::MatrixXcd unvectorize(const Eigen::VectorXcd& v, Index d) {
  return Eigen::Map<const RowMajorMatrix>(v.data(), d, d);
}

// Groups basis indices into blocks that the matrix never couples, so that
// eigenvalue checks on block-diagonal states stay cheap.
std::vector<std::vector<Index>> coupled_blocks(const Eigen::MatrixXcd& m) {
  const Index d = m.rows();
  std::vector<Index> parent(static_cast<size_t>(d));
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (Index j = 0; j < d; ++j) {
    for (Index i = 0; i < j; ++i) {
      if (m(i, j) != cplx(0.0) || m(j, i) != cplx(0.0)) parent[find(i)] = find(j);
    }
  }
  std::vector<std::vector<Index>> blocks;
  std::vector<Index> label(static_cast<size_t>(d), -1);
  for (Index i = 0; i < d; ++i) {
    const Index r = find(i);
    if (label[r] < 0) {
      label[r] = static_cast<Index>(blocks.size());
      blocks.emplace_back();
    }
    blocks[label[r]].push_back(i);
  }
  return blocks;
}

Eigen::VectorXd hermitian_eigenvalues(const Eigen::MatrixXcd& herm) {
  const auto blocks = coupled_blocks(herm);
  Eigen::VectorXd all(herm.rows());
  Index pos = 0;
  for (const auto& block : blocks) {
    const Index n = static_cast<Index>(block.size());
    Eigen::MatrixXcd sub(n, n);
    for (Index a = 0; a < n; ++a)
      for (Index b = 0; b < n; ++b) sub(a, b) = herm(block[a], block[b]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sub, Eigen::EigenvaluesOnly);
    all.segment(pos, n) = es.eigenvalues();
    pos += n;
  }
  return all;
}

}  // namespace

// --- DensityMatrix ---------------------------------------------------------

DensityMatrix::DensityMatrix(FockSpace space, Eigen::MatrixXcd matrix) : space_(std::move(space)), matrix_(std::move(matrix)) {
  if (matrix_.rows() != space_.total_dim() || matrix_.cols() != space_.total_dim()) {
    throw std::invalid_argument("DensityMatrix: matrix shape does not match FockSpace");
  }
}

DensityMatrix DensityMatrix::pure(const FockSpace& space, const Eigen::VectorXcd& psi) {
  if (psi.size() != space.total_dim()) throw std::invalid_argument("DensityMatrix::pure: state size mismatch");
  const double norm = psi.norm();
  if (norm == 0.0) throw std::invalid_argument("DensityMatrix::pure: zero state");
  Eigen::VectorXcd u = psi / norm;
  return {space, u * u.adjoint()};
}

DensityMatrix DensityMatrix::basis_state(const FockSpace& space, Index state) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(space.total_dim(), space.total_dim());
  m(state, state) = 1.0;
  return {space, std::move(m)};
}

DensityDiagnostics DensityMatrix::diagnose() const {
  DensityDiagnostics diag;
  diag.trace_error = std::abs(matrix_.trace() - cplx(1.0));
  diag.hermiticity_error = (matrix_ - matrix_.adjoint()).norm();
  Eigen::MatrixXcd herm = 0.5 * (matrix_ + matrix_.adjoint());
  diag.min_eigenvalue = hermitian_eigenvalues(herm).minCoeff();
  diag.valid = diag.trace_error < 1e-10 && diag.hermiticity_error < 1e-10 && diag.min_eigenvalue > -1e-8;
  return diag;
}

Eigen::VectorXd DensityMatrix::populations() const { return matrix_.diagonal().real(); }

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (!(rho.space() == sigma.space())) throw std::invalid_argument("trace_distance: mismatched spaces");
  Eigen::MatrixXcd diff = rho.matrix() - sigma.matrix();
  diff = 0.5 * (diff + diff.adjoint()).eval();
  return 0.5 * hermitian_eigenvalues(diff).cwiseAbs().sum();
}

// --- Liouvillian -----------------------------------------------------------

Liouvillian::Liouvillian(SparseOperator hamiltonian, std::vector<SparseOperator> jumps)
    : hamiltonian_(std::move(hamiltonian)), jumps_(std::move(jumps)), cache_(std::make_shared<Cache>()) {
  const FockSpace& sp = hamiltonian_.space();
  SparseMatrix decay(sp.total_dim(), sp.total_dim());
  double jump_scale = 0.0;
  for (const auto& l : jumps_) {
    if (!(l.space() == sp)) throw std::invalid_argument("Liouvillian: jump operator on a different Fock space");
    decay += SparseMatrix(l.matrix().adjoint()) * l.matrix();
    const double n1 = one_norm(l.matrix());
    jump_scale += n1 * n1;
  }
  effective_ = hamiltonian_.matrix() - cplx(0.0, 0.5) * decay;
  effective_.makeCompressed();
  scale_ = 2.0 * one_norm(hamiltonian_.matrix()) + 2.0 * jump_scale;
  if (scale_ == 0.0) scale_ = 1.0;
}

const SparseMatrix& Liouvillian::superop() const {
  std::call_once(cache_->once, [this] {
    const Index d = space().total_dim();
    SparseMatrix id(d, d);
    id.setIdentity();
    const SparseMatrix& h = hamiltonian_.matrix();
    SparseMatrix hT = h.transpose();
    SparseMatrix s = cplx(0.0, -1.0) * (SparseMatrix(Eigen::kroneckerProduct(h, id)) - SparseMatrix(Eigen::kroneckerProduct(id, hT)));
    for (const auto& jump : jumps_) {
      const SparseMatrix& l = jump.matrix();
      SparseMatrix ldl = SparseMatrix(l.adjoint()) * l;
      SparseMatrix ldlT = ldl.transpose();
      SparseMatrix lconj = l.conjugate();
      s += SparseMatrix(Eigen::kroneckerProduct(l, lconj));
      s -= 0.5 * SparseMatrix(Eigen::kroneckerProduct(ldl, id));
      s -= 0.5 * SparseMatrix(Eigen::kroneckerProduct(id, ldlT));
    }
    s.prune(cplx(0.0));
    s.makeCompressed();
    cache_->superop = std::move(s);
  });
  return cache_->superop;
}

SparseMatrix Liouvillian::restricted_superop(const std::vector<Index>& pairs, double* leakage) const {
  const Index d = space().total_dim();
  const Index n = static_cast<Index>(pairs.size());
  std::vector<int> position(static_cast<size_t>(d * d), -1);
  for (Index p = 0; p < n; ++p) position[pairs[p]] = static_cast<int>(p);

  std::vector<Eigen::Triplet<cplx>> trips;
  trips.reserve(static_cast<size_t>(n) * 12);
  double leak2 = 0.0;
  auto emit = [&](Index i, Index l, Index col, cplx v) {
    const int row = position[i * d + l];
    if (row < 0) {
      leak2 += std::norm(v);
      return;
    }
    trips.emplace_back(row, col, v);
  };
  const cplx minus_i(0.0, -1.0), plus_i(0.0, 1.0);
  for (Index col = 0; col < n; ++col) {
    const Index j = pairs[col] / d;
    const Index k = pairs[col] % d;
    // -i H_eff |j><k|
    for (SparseMatrix::InnerIterator it(effective_, j); it; ++it) emit(it.row(), k, col, minus_i * it.value());
    // +i |j><k| H_eff^dag   ->  <k| H_eff^dag = sum_l conj(H_eff(l, k)) <l|
    for (SparseMatrix::InnerIterator it(effective_, k); it; ++it) emit(j, it.row(), col, plus_i * std::conj(it.value()));
    // L |j><k| L^dag
    for (const auto& jump : jumps_) {
      const SparseMatrix& l = jump.matrix();
      for (SparseMatrix::InnerIterator a(l, j); a; ++a) {
        for (SparseMatrix::InnerIterator b(l, k); b; ++b) emit(a.row(), b.row(), col, a.value() * std::conj(b.value()));
      }
    }
  }
  SparseMatrix s(n, n);
  s.setFromTriplets(trips.begin(), trips.end());
  s.prune(cplx(0.0));
  s.makeCompressed();
  if (leakage != nullptr) *leakage = std::sqrt(leak2);
  return s;
}

Eigen::MatrixXcd Liouvillian::apply(const Eigen::MatrixXcd& rho) const {
  const cplx i1(0.0, 1.0);
  // rho H_eff^dag = (H_eff rho^dag)^dag and L rho L^dag = (L (L rho)^dag)^dag
  Eigen::MatrixXcd out = -i1 * (effective_ * rho);
  out += i1 * (effective_ * rho.adjoint()).adjoint();
  for (const auto& jump : jumps_) {
    const SparseMatrix& l = jump.matrix();
    Eigen::MatrixXcd lr = l * rho;
    out += (l * lr.adjoint()).adjoint();
  }
  return out;
}

Eigen::MatrixXcd Liouvillian::apply_adjoint(const Eigen::MatrixXcd& op) const {
  const cplx i1(0.0, 1.0);
  const SparseMatrix& h = hamiltonian_.matrix();
  Eigen::MatrixXcd out = i1 * (h * op - (h * op.adjoint()).adjoint());
  for (const auto& jump : jumps_) {
    const SparseMatrix& l = jump.matrix();
    SparseMatrix ld = l.adjoint();
    SparseMatrix ldl = ld * l;
    Eigen::MatrixXcd ol = (ld * op.adjoint()).adjoint();
    out += ld * ol;
    out -= 0.5 * (ldl * op + (ldl * op.adjoint()).adjoint());
  }
  return out;
}

Liouvillian build_liouvillian(const SparseOperator& hamiltonian, const std::vector<SparseOperator>& jumps) {
  if (!hamiltonian.is_hermitian(1e-12)) {
    std::ostringstream msg;
    msg << "build_liouvillian: Hamiltonian is not Hermitian (||H - H^dag|| = " << hamiltonian.hermiticity_error() << ")";
    throw std::invalid_argument(msg.str());
  }
  for (const auto& l : jumps) {
    if (!(l.space() == hamiltonian.space())) throw std::invalid_argument("build_liouvillian: jump operator on a different Fock space");
  }
  return Liouvillian(hamiltonian, jumps);
}

// --- steady state ----------------------------------------------------------

namespace {

std::vector<Index> sector_pairs(const FockSpace& space, const std::optional<std::vector<int>>& charges) {
  const Index d = space.total_dim();
  std::vector<Index> pairs;
  if (!charges) {
    pairs.resize(static_cast<size_t>(d * d));
    std::iota(pairs.begin(), pairs.end(), Index{0});
    return pairs;
  }
  if (static_cast<Index>(charges->size()) != d) throw std::invalid_argument("steady_state: charge vector has wrong length");
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j)
      if ((*charges)[i] == (*charges)[j]) pairs.push_back(i * d + j);
  return pairs;
}

Eigen::MatrixXcd to_matrix(const Eigen::VectorXcd& x, const std::vector<Index>& pairs, Index d) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  for (size_t p = 0; p < pairs.size(); ++p) m(pairs[p] / d, pairs[p] % d) = x[static_cast<Index>(p)];
  return m;
}

// Hermitian, trace-normalized version of a null vector.
Eigen::MatrixXcd normalize_state(Eigen::MatrixXcd m) {
  cplx tr = m.trace();
  if (std::abs(tr) < 1e-300) throw SolverError("steady_state: null vector has zero trace", 0.0);
  m /= tr;
  return 0.5 * (m + m.adjoint());
}

// Sparse complex LU backed by UMFPACK, with solves against M and M^dag.
class SparseComplexLu {
 public:
  explicit SparseComplexLu(const SparseMatrix& m) : m_(m) {
    m_.makeCompressed();
    const auto n = static_cast<int>(m_.rows());
    const double* ax = reinterpret_cast<const double*>(m_.valuePtr());
    int status = umfpack_zi_symbolic(n, n, m_.outerIndexPtr(), m_.innerIndexPtr(), ax, nullptr, &symbolic_, nullptr, nullptr);
    if (status == UMFPACK_OK) {
      status = umfpack_zi_numeric(m_.outerIndexPtr(), m_.innerIndexPtr(), ax, nullptr, symbolic_, &numeric_, nullptr, nullptr);
    }
    status_ = status;
  }
  ~SparseComplexLu() {
    if (numeric_ != nullptr) umfpack_zi_free_numeric(&numeric_);
    if (symbolic_ != nullptr) umfpack_zi_free_symbolic(&symbolic_);
  }
  SparseComplexLu(const SparseComplexLu&) = delete;
  SparseComplexLu& operator=(const SparseComplexLu&) = delete;

  // UMFPACK_WARNING_singular_matrix still yields a usable (if inaccurate)
  // factorization; only hard errors count as failure.
  bool ok() const { return status_ == UMFPACK_OK || status_ == UMFPACK_WARNING_singular_matrix; }
  int status() const { return status_; }

  Eigen::VectorXcd solve(const Eigen::VectorXcd& b) const { return run(UMFPACK_A, b); }
  Eigen::VectorXcd solve_adjoint(const Eigen::VectorXcd& b) const { return run(UMFPACK_At, b); }

 private:
  Eigen::VectorXcd run(int sys, const Eigen::VectorXcd& b) const {
    Eigen::VectorXcd x(b.size());
    umfpack_zi_solve(sys, m_.outerIndexPtr(), m_.innerIndexPtr(), reinterpret_cast<const double*>(m_.valuePtr()), nullptr,
                     reinterpret_cast<double*>(x.data()), nullptr, reinterpret_cast<const double*>(b.data()), nullptr,
                     numeric_, nullptr, nullptr);
    return x;
  }

  SparseMatrix m_;
  void* symbolic_ = nullptr;
  void* numeric_ = nullptr;
  int status_ = 0;
};

// Full SVD is used up to this size; above it the bordered LU is cheaper.
constexpr Index kFullSvdLimit = 900;

// Smallest singular value of a factorized square matrix M by inverse
// iteration on (M M^dag)^-1. For the bordered Liouvillian it vanishes
// exactly when the null space has dimension > 1.
template <typename Solve, typename SolveAdjoint>
double smallest_singular_value(const Solve& solve, const SolveAdjoint& solve_adjoint, Index n) {
  std::mt19937_64 rng(0x5eedULL);
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(n);
  for (Index k = 0; k < n; ++k) v(k) = cplx(g(rng), g(rng));
  v.normalize();
  double growth = 0.0;
  for (int it = 0; it < 12; ++it) {
    Eigen::VectorXcd y = solve_adjoint(v);
    Eigen::VectorXcd z = solve(y);
    growth = z.norm();
    if (!std::isfinite(growth)) return 0.0;
    v = z / growth;
  }
  return 1.0 / std::sqrt(growth);
}

// Null space of the dense restricted superoperator by SVD. Fills the
// degeneracy fields of `result` and returns the (unnormalized) state.
Eigen::MatrixXcd dense_null_space(const Eigen::MatrixXcd& dense, const std::vector<Index>& pairs, const FockSpace& space,
                                  const SteadyStateOptions& options, SteadyStateResult& result) {
  const Index n = dense.rows();
  const Index d = space.total_dim();
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(dense, Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double top = sv(0) > 0.0 ? sv(0) : 1.0;
  result.gap_estimate = n >= 2 ? sv(n - 2) / top : 1.0;
  int null_dim = 1;
  while (null_dim < n && sv(n - 1 - null_dim) / top < options.degeneracy_tol) ++null_dim;
  if (null_dim > 1 && options.check_degeneracy) {
    result.degenerate = true;
    if (!options.allow_degenerate) {
      throw DegenerateSteadyStateError("steady_state: degenerate null space (dimension " + std::to_string(null_dim) + ")",
                                       result.gap_estimate);
    }
    // Hermitian basis of the null space via Gram-Schmidt in the
    // Hilbert-Schmidt inner product.
    std::vector<Eigen::MatrixXcd> herm;
    for (int k = 0; k < null_dim; ++k) {
      Eigen::MatrixXcd x = to_matrix(svd.matrixV().col(n - 1 - k), pairs, d);
      herm.push_back(0.5 * (x + x.adjoint()));
      herm.push_back(cplx(0.0, -0.5) * (x - x.adjoint()));
    }
    std::vector<Eigen::MatrixXcd> ortho;
    for (auto& h : herm) {
      for (const auto& q : ortho) h -= (q.adjoint() * h).trace() * q;
      const double nm = h.norm();
      if (nm > 1e-8 && static_cast<int>(ortho.size()) < null_dim) ortho.push_back(h / nm);
    }
    result.basis.clear();
    for (const auto& q : ortho) {
      if (std::abs(q.trace()) > 1e-8) {
        result.basis.emplace_back(space, q / q.trace());
      } else {
        result.basis.emplace_back(space, q);
      }
    }
    if (!result.basis.empty() && std::abs(result.basis.front().trace()) > 1e-8) return result.basis.front().matrix();
  }
  return to_matrix(svd.matrixV().col(n - 1), pairs, d);
}

}  // namespace

SteadyStateResult solve_steady_state(const Liouvillian& liouvillian, const SteadyStateOptions& options) {
  const FockSpace& space = liouvillian.space();
  const Index d = space.total_dim();
  const std::vector<Index> pairs = sector_pairs(space, options.charges);
  const Index n = static_cast<Index>(pairs.size());

  double leakage = 0.0;
  SparseMatrix s = liouvillian.restricted_superop(pairs, &leakage);
  if (leakage > 1e-12 * liouvillian.scale()) {
    throw std::invalid_argument("steady_state: supplied charges are not a weak symmetry of the Liouvillian");
  }

  SteadyStateResult result{DensityMatrix::vacuum(space), 0.0, false, 0.0, {}, 0, false};
  result.solved_dimension = n;
  Eigen::MatrixXcd rho;

  auto fail_degenerate = [&](const std::string& what) {
    result.degenerate = true;
    if (!options.allow_degenerate) throw DegenerateSteadyStateError(what, result.gap_estimate);
  };

  if (n < options.dense_threshold && n <= kFullSvdLimit) {
    result.dense_path = true;
    rho = dense_null_space(Eigen::MatrixXcd(s), pairs, space, options, result);
  } else {
    // Replace the equation for rho(0,0) by the trace constraint. Rows of the
    // diagonal entries sum to zero (trace preservation), so no information
    // is lost when the steady state is unique.
    const Index r0 = static_cast<Index>(std::find(pairs.begin(), pairs.end(), Index{0}) - pairs.begin());
    std::vector<Eigen::Triplet<cplx>> trips;
    trips.reserve(static_cast<size_t>(s.nonZeros() + d));
    for (Index c = 0; c < s.outerSize(); ++c) {
      for (SparseMatrix::InnerIterator it(s, c); it; ++it) {
        if (it.row() != r0) trips.emplace_back(it.row(), it.col(), it.value());
      }
    }
    for (Index p = 0; p < n; ++p) {
      if (pairs[p] / d == pairs[p] % d) trips.emplace_back(r0, p, cplx(1.0));
    }
    SparseMatrix m(n, n);
    m.setFromTriplets(trips.begin(), trips.end());
    m.makeCompressed();
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
    rhs(r0) = 1.0;

    double mnorm = 0.0;
    for (Index c = 0; c < m.outerSize(); ++c)
      for (SparseMatrix::InnerIterator it(m, c); it; ++it) mnorm += std::norm(it.value());
    mnorm = std::sqrt(mnorm / static_cast<double>(n));

    if (n < options.dense_threshold) {
      // Mid-sized problems: dense LU of the bordered matrix. A full SVD at
      // this size costs minutes, so it is only computed when a degenerate
      // null space must be returned.
      result.dense_path = true;
      Eigen::MatrixXcd dm(m);
      Eigen::PartialPivLU<Eigen::MatrixXcd> lu(dm);
      Eigen::VectorXcd x = lu.solve(rhs);
      if (options.check_degeneracy) {
        result.gap_estimate =
            smallest_singular_value([&](const Eigen::VectorXcd& b) { return Eigen::VectorXcd(lu.solve(b)); },
                                    [&](const Eigen::VectorXcd& b) { return Eigen::VectorXcd(lu.adjoint().solve(b)); }, n) /
            mnorm;
        if (!x.allFinite() || result.gap_estimate < options.degeneracy_tol) {
          fail_degenerate("steady_state: near-singular bordered system; null space appears degenerate");
          rho = dense_null_space(Eigen::MatrixXcd(s), pairs, space, options, result);
        }
      }
      if (!result.degenerate) rho = to_matrix(x, pairs, d);
    } else {
      s.resize(0, 0);
      s.data().squeeze();
      SparseComplexLu lu(m);
      if (lu.status() == UMFPACK_ERROR_out_of_memory) {
        throw SolverError("steady_state: sparse factorization ran out of memory (" + std::to_string(n) + " unknowns)", 0.0);
      }
      if (!lu.ok()) {
        throw DegenerateSteadyStateError(
            "steady_state: sparse factorization failed (UMFPACK status " + std::to_string(lu.status()) + "); null space is likely degenerate",
            0.0);
      }
      Eigen::VectorXcd x = lu.solve(rhs);
      rho = to_matrix(x, pairs, d);
      if (options.check_degeneracy) {
        result.gap_estimate = smallest_singular_value([&](const Eigen::VectorXcd& b) { return lu.solve(b); },
                                                      [&](const Eigen::VectorXcd& b) { return lu.solve_adjoint(b); }, n) /
                              mnorm;
        if (result.gap_estimate < options.degeneracy_tol) {
          fail_degenerate("steady_state: near-singular bordered system; null space appears degenerate");
        }
      }
    }
  }

  rho = normalize_state(std::move(rho));
  result.rho = DensityMatrix(space, rho);
  result.residual = liouvillian.apply(rho).norm() / liouvillian.scale();
  if (!std::isfinite(result.residual) || result.residual > options.tol) {
    std::ostringstream msg;
    msg << "steady_state: residual " << result.residual << " exceeds tolerance " << options.tol;
    throw SolverError(msg.str(), result.residual);
  }
  return result;
}

DensityMatrix steady_state(const Liouvillian& liouvillian, double tol) {
  SteadyStateOptions opts;
  opts.tol = tol;
  return solve_steady_state(liouvillian, opts).rho;
}

// --- time evolution ---------------------------------------------------------

namespace {

// Krylov approximation of exp(t A) v with adaptive sub-stepping (after
// Sidje's Expokit expv).
class KrylovPropagator {
 public:
  KrylovPropagator(const Liouvillian& l, const EvolveOptions& opt) : l_(l), opt_(opt), d_(l.space().total_dim()) {}

  Eigen::VectorXcd matvec(const Eigen::VectorXcd& v) const { return vectorize(l_.apply(unvectorize(v, d_))); }

  Eigen::VectorXcd advance(Eigen::VectorXcd w, double span) const {
    const int m = std::max(2, std::min<int>(opt_.krylov_dim, static_cast<int>(w.size()) - 1));
    const double tol = opt_.tol;
    const double btol = 1e-7 * tol;
    const double gamma = 0.9, delta = 1.2;
    const double anorm = l_.scale();
    double t_now = 0.0;
    double beta = w.norm();
    if (beta == 0.0) return w;
    const double fact = std::pow((m + 1) / std::exp(1.0), m + 1) * std::sqrt(2.0 * M_PI * (m + 1));
    double t_new = (1.0 / anorm) * std::pow((fact * tol) / (4.0 * beta * anorm), 1.0 / m);
    {
      const double s = std::pow(10.0, std::floor(std::log10(t_new)) - 1);
      t_new = std::ceil(t_new / s) * s;
    }
    const Index n = w.size();
    while (t_now < span) {
      double t_step = std::min(span - t_now, t_new);
      Eigen::MatrixXcd v(n, m + 1);
      Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(m + 2, m + 2);
      v.col(0) = w / beta;
      int mb = m;
      int k1 = 2;
      for (int j = 0; j < m; ++j) {
        Eigen::VectorXcd p = matvec(v.col(j));
        for (int i = 0; i <= j; ++i) {
          h(i, j) = v.col(i).dot(p);
          p -= h(i, j) * v.col(i);
        }
        const double s = p.norm();
        if (s < btol) {
          k1 = 0;
          mb = j + 1;
          t_step = span - t_now;
          break;
        }
        h(j + 1, j) = s;
        v.col(j + 1) = p / s;
      }
      double avnorm = 0.0;
      if (k1 != 0) {
        h(m + 1, m) = 1.0;
        avnorm = matvec(v.col(m)).norm();
      }
      Eigen::MatrixXcd f;
      double err_loc = btol;
      double xm = 1.0 / m;
      for (int reject = 0;; ++reject) {
        const int mx = mb + k1;
        Eigen::MatrixXcd hs = t_step * h.topLeftCorner(mx, mx);
        f = hs.exp();
        if (k1 == 0) {
          err_loc = btol;
          break;
        }
        const double phi1 = std::abs(beta * f(m, 0));
        const double phi2 = std::abs(beta * f(m + 1, 0) * avnorm);
        if (phi1 > 10.0 * phi2) {
          err_loc = phi2;
          xm = 1.0 / m;
        } else if (phi1 > phi2) {
          err_loc = (phi1 * phi2) / (phi1 - phi2);
          xm = 1.0 / m;
        } else {
          err_loc = phi1;
          xm = 1.0 / (m - 1);
        }
        if (err_loc <= delta * t_step * tol) break;
        if (reject >= 20) throw SolverError("evolve: Krylov step rejected repeatedly", err_loc);
        t_step = gamma * t_step * std::pow(t_step * tol / err_loc, xm);
        const double s = std::pow(10.0, std::floor(std::log10(t_step)) - 1);
        t_step = std::ceil(t_step / s) * s;
        if (t_step < opt_.min_step) throw SolverError("evolve: step size underflow", err_loc);
      }
      const int mx = mb + std::max(0, k1 - 1);
      w = v.leftCols(mx) * (beta * f.col(0).head(mx));
      beta = w.norm();
      t_now += t_step;
      t_new = gamma * t_step * std::pow(t_step * tol / std::max(err_loc, 1e-300), xm);
      const double s = std::pow(10.0, std::floor(std::log10(t_new)) - 1);
      t_new = std::ceil(t_new / s) * s;
      if (!std::isfinite(beta)) throw SolverError("evolve: state diverged", beta);
    }
    return w;
  }

 private:
  const Liouvillian& l_;
  EvolveOptions opt_;
  Index d_;
};

}  // namespace

std::vector<DensityMatrix> evolve(const Liouvillian& liouvillian, const DensityMatrix& rho0, const std::vector<double>& t_grid,
                                  const EvolveOptions& options) {
  if (!(rho0.space() == liouvillian.space())) throw std::invalid_argument("evolve: rho0 lives on a different Fock space");
  if (t_grid.empty()) return {};
  if (t_grid.front() < 0.0) throw std::invalid_argument("evolve: t_grid must start at t >= 0");
  for (size_t k = 1; k < t_grid.size(); ++k) {
    if (!(t_grid[k] > t_grid[k - 1])) throw std::invalid_argument("evolve: t_grid must be strictly increasing");
  }
  KrylovPropagator prop(liouvillian, options);
  const Index d = liouvillian.space().total_dim();
  std::vector<DensityMatrix> out;
  out.reserve(t_grid.size());
  Eigen::VectorXcd w = vectorize(rho0.matrix());
  double t = 0.0;
  for (double target : t_grid) {
    if (target > t) w = prop.advance(std::move(w), target - t);
    t = target;
    out.emplace_back(liouvillian.space(), unvectorize(w, d));
  }
  return out;
}

// --- observables -----------------------------------------------------------

cplx expectation(const DensityMatrix& rho, const SparseOperator& op) {
  if (!(rho.space() == op.space())) throw std::invalid_argument("expectation: mismatched spaces");
  // Tr(rho O) = sum_{(j,i) in O} O(j, i) rho(i, j)
  cplx acc = 0.0;
  const SparseMatrix& o = op.matrix();
  for (Index i = 0; i < o.outerSize(); ++i) {
    for (SparseMatrix::InnerIterator it(o, i); it; ++it) acc += it.value() * rho.matrix()(i, it.row());
  }
  return acc;
}

cplx moment_rhs(const DensityMatrix& rho, const Liouvillian& liouvillian, const SparseOperator& op) {
  if (!(rho.space() == op.space()) || !(op.space() == liouvillian.space())) throw std::invalid_argument("moment_rhs: mismatched spaces");
  const cplx i1(0.0, 1.0);
  const SparseOperator& h = liouvillian.hamiltonian();
  SparseOperator gen = i1 * commutator(h, op);
  for (const auto& l : liouvillian.jumps()) {
    SparseOperator ld = l.adjoint();
    SparseOperator ldl = ld * l;
    gen = gen + ld * op * l - cplx(0.5) * (ldl * op + op * ldl);
  }
  return expectation(rho, gen);
}

double truncation_edge_population(const DensityMatrix& rho) {
  const FockSpace& sp = rho.space();
  double edge = 0.0;
  for (Index s = 0; s < sp.total_dim(); ++s) {
    for (int m = 0; m < sp.num_modes(); ++m) {
      if (sp.occupation(s, m) == sp.dim(m) - 1) {
        edge += rho.matrix()(s, s).real();
        break;
      }
    }
  }
  return edge;
}

DensityMatrix random_density_matrix(const FockSpace& space, unsigned long long seed, int rank) {
  const Index d = space.total_dim();
  const Index r = rank <= 0 ? d : std::min<Index>(rank, d);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXcd gm(d, r);
  for (Index j = 0; j < r; ++j)
    for (Index i = 0; i < d; ++i) gm(i, j) = cplx(g(rng), g(rng));
  Eigen::MatrixXcd rho = gm * gm.adjoint();
  rho /= rho.trace();
  return {space, 0.5 * (rho + rho.adjoint())};
}

}  // namespace symbreak
