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

#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

// Labeled operators on composite Hilbert spaces and their Liouville-space
// generators. Density matrices are vectorized by stacking columns, so
// vec(A X B) = (B^T kron A) vec(X) throughout.
namespace thz {

using cplx = std::complex<double>;
using DenseMatrix = Eigen::MatrixXcd;
using SparseMatrix = Eigen::SparseMatrix<cplx>;
using ComplexVector = Eigen::VectorXcd;
using Index = Eigen::Index;

inline constexpr double kHermitianTolerance = 1e-12;

struct Factor {
  std::string name;
  Index dim = 0;

  friend bool operator==(const Factor&, const Factor&) = default;
};

/// Ordered tensor-factor layout; the first factor is the most significant
/// index of the product basis.
class SpaceLayout {
 public:
  SpaceLayout() = default;
  explicit SpaceLayout(std::vector<Factor> factors);

  const std::vector<Factor>& factors() const { return factors_; }
  Index total_dim() const { return total_dim_; }
  std::size_t index_of(std::string_view name) const;
  Index dim_of(std::string_view name) const;
  bool contains(std::string_view name) const;

  /// Stride of `name` in the flattened basis index.
  Index stride_of(std::string_view name) const;

  SpaceLayout extended(Factor factor) const;

  friend bool operator==(const SpaceLayout&, const SpaceLayout&) = default;

 private:
  std::vector<Factor> factors_;
  Index total_dim_ = 1;
};

/// Square operator on a SpaceLayout. Storage is dense below kDenseLimit and
/// sparse otherwise; the policy depends only on the dimension.
class Operator {
 public:
  static constexpr Index kDenseLimit = 64;

  Operator() = default;
  Operator(SpaceLayout layout, DenseMatrix data);
  Operator(SpaceLayout layout, SparseMatrix data);

  static Operator identity(const SpaceLayout& layout);
  static Operator zero(const SpaceLayout& layout);

  const SpaceLayout& layout() const { return layout_; }
  Index dim() const { return layout_.total_dim(); }
  bool is_dense() const { return std::holds_alternative<DenseMatrix>(data_); }

  DenseMatrix dense() const;
  SparseMatrix sparse() const;

  Operator adjoint() const;
  /// max |A - A^dagger| over all elements.
  double hermiticity_residual() const;
  bool is_hermitian(double tol = kHermitianTolerance) const {
    return hermiticity_residual() <= tol;
  }

  /// Tr(A rho).
  cplx expectation(const DenseMatrix& rho) const;

  Operator& operator+=(const Operator& rhs);
  Operator& operator-=(const Operator& rhs);
  Operator& operator*=(cplx scale);

  friend Operator operator+(Operator lhs, const Operator& rhs) { return lhs += rhs; }
  friend Operator operator-(Operator lhs, const Operator& rhs) { return lhs -= rhs; }
  friend Operator operator*(const Operator& lhs, const Operator& rhs);
  friend Operator operator*(cplx s, Operator op) { return op *= s; }
  friend Operator operator*(Operator op, cplx s) { return op *= s; }

 private:
  void check_same_layout(const Operator& rhs) const;

  SpaceLayout layout_;
  std::variant<DenseMatrix, SparseMatrix> data_;
};

/// Sparse generator acting on column-stacked density matrices of `layout`.
struct SuperOp {
  SpaceLayout layout;
  SparseMatrix data;

  Index hilbert_dim() const { return layout.total_dim(); }
  Index dim() const { return data.rows(); }
  DenseMatrix apply(const DenseMatrix& rho) const;
};

ComplexVector vectorize(const DenseMatrix& rho);
DenseMatrix unvectorize(const ComplexVector& v, Index dim);
/// Position of rho(row, col) inside vectorize(rho).
inline Index vec_index(Index row, Index col, Index dim) { return col * dim + row; }

/// I kron ... kron local_op kron ... kron I in layout order.
Operator embed(const DenseMatrix& local_op, std::string_view factor_name,
               const SpaceLayout& layout);

struct EigenSystem {
  Eigen::VectorXd values;  // ascending
  DenseMatrix vectors;     // columns; largest component of each real positive
};

/// Eigendecomposition of a Hermitian operator (always densified).
EigenSystem eig_hermitian(const Operator& op);

struct CollapseTerm {
  double rate = 0.0;
  Operator op;
};

/// L(rho) = -i[H, rho] + sum_k (rate_k / 2) (2 O rho O^+ - O^+O rho - rho O^+O).
SuperOp lindblad_super(const Operator& hamiltonian, std::span<const CollapseTerm> terms);

/// Local operators in the Fock / two-level bases.
namespace local {
DenseMatrix identity(Index dim);
/// Truncated annihilation operator on {|0>, ..., |dim-1>}.
DenseMatrix destroy(Index dim);
// Two-level operators in the basis (upper, lower): index 0 is the upper level.
DenseMatrix lowering();  // |lower><upper|
DenseMatrix raising();   // |upper><lower|
DenseMatrix pauli_z();   // diag(+1, -1)
}  // namespace local

}  // namespace thz
