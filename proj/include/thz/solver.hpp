// Copyright 2026 The thzsource Authors
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
#include <vector>

#include <Eigen/SparseLU>

#include "thz/qops.hpp"

namespace thz {

/// Validated density matrix: Hermitian and unit trace within 1e-9, minimum
/// eigenvalue above -1e-8.
class DensityMatrix {
 public:
  static constexpr double kHermitianTol = 1e-9;
  static constexpr double kTraceTol = 1e-9;
  static constexpr double kNegativityTol = 1e-8;

  DensityMatrix() = default;
  /// Validates `data`; throws NumericalError on violation.
  DensityMatrix(SpaceLayout layout, DenseMatrix data);

  const SpaceLayout& layout() const { return layout_; }
  const DenseMatrix& data() const { return data_; }
  Index dim() const { return data_.rows(); }

  /// Copy with eigenvalues in (-1e-8, 0) set to zero and the trace restored.
  DensityMatrix clipped() const;

  cplx expectation(const Operator& op) const { return op.expectation(data_); }

 private:
  SpaceLayout layout_;
  DenseMatrix data_;
};

struct SolveReport {
  double residual = 0.0;      // |L vec(rho)|_2
  double bound = 0.0;         // 1e-10 |L|_F
  double condition = 0.0;     // 1-norm estimate of the bordered system (largest diagonal block
                              // for the level-wise path); 0 if not computed
  bool dense_fallback = false;
  int block_iterations = 0;   // > 0 when the level-wise path was used
};

struct SteadyState {
  DensityMatrix rho;
  SolveReport report;
};

inline constexpr double kConditionLimit = 1e14;
inline constexpr double kResidualFactor = 1e-10;

/// Replace-one-row steady-state solver: the first equation of A x = 0 is
/// swapped for sum_i w_i x_ii = 1. The symbolic factorization is reused while
/// successive generators share a sparsity pattern. Not thread-safe.
///
/// With `levels` (one non-negative integer per vectorized entry) the bordered
/// system is first attempted by block Gauss-Seidel: the blocks on or below the
/// level diagonal are solved by forward substitution and the strictly-upper
/// blocks are iterated to convergence. This is exact when the upper blocks
/// are small, as for a generator rescaled in powers of a weak coupling; a
/// full sparse LU is the fallback.
class BorderedSolver {
 public:
  explicit BorderedSolver(Eigen::VectorXd trace_weights, std::vector<int> levels = {});
  ComplexVector solve(const SparseMatrix& a, SolveReport* report = nullptr);

 private:
  bool solve_by_levels(const SparseMatrix& m, ComplexVector& x, SolveReport& rep) const;

  Eigen::VectorXd weights_;
  std::vector<int> levels_;
  std::unique_ptr<Eigen::SparseLU<SparseMatrix>> lu_;
  std::vector<int> outer_;
  std::vector<int> inner_;
  bool analyzed_ = false;
};

SteadyState steady_state_report(const SuperOp& L);
DensityMatrix steady_state(const SuperOp& L);

/// Steady state of the similarity-transformed generator D^-1 L D with
/// D = diag(base^exponents). Returns the rescaled vector y = D^-1 vec(rho),
/// so tiny-but-structured entries keep full relative precision. The trace row
/// carries the true weights base^exponents(ii).
struct ScaledSteadyState {
  ComplexVector scaled;
  SolveReport report;
};
ScaledSteadyState steady_state_scaled(const SuperOp& L, const std::vector<int>& exponents,
                                      double base);

// --- time evolution -------------------------------------------------------

enum class Propagation {
  Adaptive,     // embedded Dormand-Prince 5(4)
  Exponential,  // dense matrix exponential of L per distinct step
};

struct EvolveOptions {
  Propagation method = Propagation::Adaptive;
  double rtol = 1e-10;
  double atol = 1e-14;
  double min_step = 1e-12;  // ps; smaller steps count as underflow
  long max_steps = 50'000'000;
};

/// e^{L tau} x0 at each tau (ascending, starting at or after 0).
std::vector<ComplexVector> evolve_vec(const SuperOp& L, const ComplexVector& x0,
                                      const std::vector<double>& taus,
                                      const EvolveOptions& opts = {});
std::vector<DenseMatrix> evolve(const SuperOp& L, const DenseMatrix& rho0,
                                const std::vector<double>& taus, const EvolveOptions& opts = {});

struct CorrelationTrace {
  std::vector<double> taus;
  std::vector<cplx> values;
};

enum class CorrelationKernel {
  FirstOrder,  // <left(0) right(tau)> = Tr[right e^{L tau}(rho left)]
  Intensity,   // <left(0) left(tau) right(tau) right(0)> = Tr[left right e^{L tau}(right rho left)]
};

CorrelationTrace two_time(const SuperOp& L, const DensityMatrix& rho_ss, const Operator& left,
                          const Operator& right, const std::vector<double>& taus,
                          CorrelationKernel kernel, const EvolveOptions& opts = {});

/// Nonzero Liouvillian eigenvalue with the largest real part, from a dense
/// eigendecomposition; the eigenvalue nearest zero is taken as the steady state.
cplx liouvillian_gap(const SuperOp& L);

/// Trace distance 0.5 |A - B|_1 of two Hermitian matrices.
double trace_distance(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace thz
