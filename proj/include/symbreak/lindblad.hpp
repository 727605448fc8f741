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

#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "symbreak/bosonic.hpp"

namespace symbreak {

// Raised when an iterative or direct solve fails to reach its tolerance.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double residual) : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class DegenerateSteadyStateError : public SolverError {
 public:
  DegenerateSteadyStateError(const std::string& what, double gap) : SolverError(what, gap) {}
};

struct DensityDiagnostics {
  double trace_error = 0.0;
  double hermiticity_error = 0.0;
  double min_eigenvalue = 0.0;
  bool valid = false;
};

class DensityMatrix {
 public:
  DensityMatrix(FockSpace space, Eigen::MatrixXcd matrix);

  static DensityMatrix pure(const FockSpace& space, const Eigen::VectorXcd& psi);
  static DensityMatrix basis_state(const FockSpace& space, Index state);
  static DensityMatrix vacuum(const FockSpace& space) { return basis_state(space, 0); }

  const FockSpace& space() const { return space_; }
  const Eigen::MatrixXcd& matrix() const { return matrix_; }
  cplx trace() const { return matrix_.trace(); }

  // Checks trace 1 (1e-10), Hermiticity (1e-10) and positivity (-1e-8).
  DensityDiagnostics diagnose() const;

  // Diagonal of rho in the Fock basis (real part).
  Eigen::VectorXd populations() const;

 private:
  FockSpace space_;
  Eigen::MatrixXcd matrix_;
};

// 0.5 * || rho - sigma ||_1
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);

// Vectorization is row-major: vec(rho)[i * d + j] = rho(i, j). With this
// convention vec(A rho B) = (A kron B^T) vec(rho), so the superoperator is
//   -i (H kron 1 - 1 kron H^T)
//   + sum_k [ L_k kron conj(L_k) - 1/2 L_k^dag L_k kron 1 - 1/2 1 kron (L_k^dag L_k)^T ].
class Liouvillian {
 public:
  Liouvillian(SparseOperator hamiltonian, std::vector<SparseOperator> jumps);

  const FockSpace& space() const { return hamiltonian_.space(); }
  const SparseOperator& hamiltonian() const { return hamiltonian_; }
  const std::vector<SparseOperator>& jumps() const { return jumps_; }

  // Full d^2 x d^2 superoperator, assembled from Kronecker products on first
  // use. Thread-safe.
  const SparseMatrix& superop() const;

  // Superoperator restricted to the operator subspace spanned by |i><j| with
  // (i, j) in `pairs` (flat row-major indices). Assembled column by column
  // without forming the full matrix. `leakage` receives the Frobenius norm
  // of the image components that fall outside the subspace.
  SparseMatrix restricted_superop(const std::vector<Index>& pairs, double* leakage = nullptr) const;

  // L(rho) evaluated in matrix form.
  Eigen::MatrixXcd apply(const Eigen::MatrixXcd& rho) const;
  // Adjoint (Heisenberg-picture) action L^dag(O) = i[H, O] + sum_k (L_k^dag O L_k - 1/2 {L_k^dag L_k, O}).
  Eigen::MatrixXcd apply_adjoint(const Eigen::MatrixXcd& op) const;

  // Scale used for relative residuals: 2 ||H||_1 + 2 sum_k ||L_k||_1^2.
  double scale() const { return scale_; }

 private:
  SparseOperator hamiltonian_;
  std::vector<SparseOperator> jumps_;
  SparseMatrix effective_;  // H - i/2 sum_k L_k^dag L_k
  double scale_ = 0.0;

  struct Cache {
    std::once_flag once;
    SparseMatrix superop;
  };
  std::shared_ptr<Cache> cache_;
};

// Validates inputs (Hermitian H, shared space) and builds the Liouvillian.
Liouvillian build_liouvillian(const SparseOperator& hamiltonian, const std::vector<SparseOperator>& jumps);

// Hamiltonian plus jump operators as produced by the model builders.
struct OpenSystem {
  SparseOperator hamiltonian;
  std::vector<SparseOperator> jumps;

  const FockSpace& space() const { return hamiltonian.space(); }
  Liouvillian liouvillian() const { return build_liouvillian(hamiltonian, jumps); }
};

struct SteadyStateOptions {
  double tol = 1e-10;
  // Relative singular-value gap below which the null space counts as
  // degenerate.
  double degeneracy_tol = 1e-8;
  bool allow_degenerate = false;
  bool check_degeneracy = true;
  // Restricted superoperators with fewer rows than this use a dense SVD.
  Index dense_threshold = 4096;
  // Optional U(1) weak-symmetry charge per basis state. The steady state is
  // searched in the block rho(i, j) with charge[i] == charge[j].
  std::optional<std::vector<int>> charges;
};

struct SteadyStateResult {
  DensityMatrix rho;
  double residual = 0.0;  // ||L(rho)||_F / scale
  bool degenerate = false;
  double gap_estimate = 0.0;  // second-smallest relative singular value
  std::vector<DensityMatrix> basis;  // Hermitian null-space basis when degenerate
  Index solved_dimension = 0;
  bool dense_path = false;
};

SteadyStateResult solve_steady_state(const Liouvillian& liouvillian, const SteadyStateOptions& options = {});
DensityMatrix steady_state(const Liouvillian& liouvillian, double tol = 1e-10);

struct EvolveOptions {
  int krylov_dim = 30;
  double tol = 1e-12;
  double min_step = 1e-14;
};

// rho(t) for every t in t_grid (increasing, t_grid[0] >= 0), starting from
// rho0 at t = 0. Uses a Krylov exponential integrator on the vectorized
// master equation.
std::vector<DensityMatrix> evolve(const Liouvillian& liouvillian, const DensityMatrix& rho0, const std::vector<double>& t_grid,
                                  const EvolveOptions& options = {});

cplx expectation(const DensityMatrix& rho, const SparseOperator& op);

// d<O>/dt = Tr(rho L^dag(O)).
cplx moment_rhs(const DensityMatrix& rho, const Liouvillian& liouvillian, const SparseOperator& op);

// Probability weight on basis states where any mode sits at its top
// truncation level. Large values indicate an unconverged truncation or an
// unbounded instability.
double truncation_edge_population(const DensityMatrix& rho);

// Random density matrix rho = G G^dag / Tr with G complex Gaussian (rank
// `rank`). Deterministic in `seed`.
DensityMatrix random_density_matrix(const FockSpace& space, unsigned long long seed, int rank = -1);

}  // namespace symbreak
