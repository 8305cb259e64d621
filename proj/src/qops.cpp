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

#include "thz/qops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include <unsupported/Eigen/KroneckerProduct>

#include "thz/error.hpp"

namespace thz {

namespace {

SparseMatrix to_sparse(const DenseMatrix& m) {
  std::vector<Eigen::Triplet<cplx>> triplets;
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      if (m(i, j) != cplx{0.0, 0.0}) triplets.emplace_back(i, j, m(i, j));
    }
  }
  SparseMatrix s(m.rows(), m.cols());
  s.setFromTriplets(triplets.begin(), triplets.end());
  return s;
}

std::variant<DenseMatrix, SparseMatrix> normalize_storage(DenseMatrix m) {
  if (m.rows() < Operator::kDenseLimit) return m;
  return to_sparse(m);
}

std::variant<DenseMatrix, SparseMatrix> normalize_storage(SparseMatrix m) {
  if (m.rows() < Operator::kDenseLimit) return DenseMatrix(m);
  m.prune(cplx{0.0, 0.0});
  m.makeCompressed();
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// SpaceLayout

SpaceLayout::SpaceLayout(std::vector<Factor> factors) : factors_(std::move(factors)) {
  std::unordered_set<std::string> seen;
  for (const auto& f : factors_) {
    if (f.dim <= 0) throw DomainError("factor '" + f.name + "' must have positive dimension");
    if (!seen.insert(f.name).second) throw DomainError("duplicate factor name '" + f.name + "'");
    total_dim_ *= f.dim;
  }
}

std::size_t SpaceLayout::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (factors_[i].name == name) return i;
  }
  throw DomainError("unknown factor '" + std::string(name) + "'");
}

Index SpaceLayout::dim_of(std::string_view name) const { return factors_[index_of(name)].dim; }

bool SpaceLayout::contains(std::string_view name) const {
  return std::any_of(factors_.begin(), factors_.end(),
                     [&](const Factor& f) { return f.name == name; });
}

Index SpaceLayout::stride_of(std::string_view name) const {
  const std::size_t pos = index_of(name);
  Index stride = 1;
  for (std::size_t i = pos + 1; i < factors_.size(); ++i) stride *= factors_[i].dim;
  return stride;
}

SpaceLayout SpaceLayout::extended(Factor factor) const {
  auto factors = factors_;
  factors.push_back(std::move(factor));
  return SpaceLayout(std::move(factors));
}

// ---------------------------------------------------------------------------
// Operator

Operator::Operator(SpaceLayout layout, DenseMatrix data) : layout_(std::move(layout)) {
  if (data.rows() != layout_.total_dim() || data.cols() != layout_.total_dim()) {
    throw DomainError("operator shape does not match layout dimension");
  }
  data_ = normalize_storage(std::move(data));
}

Operator::Operator(SpaceLayout layout, SparseMatrix data) : layout_(std::move(layout)) {
  if (data.rows() != layout_.total_dim() || data.cols() != layout_.total_dim()) {
    throw DomainError("operator shape does not match layout dimension");
  }
  data_ = normalize_storage(std::move(data));
}

Operator Operator::identity(const SpaceLayout& layout) {
  SparseMatrix id(layout.total_dim(), layout.total_dim());
  id.setIdentity();
  return Operator(layout, std::move(id));
}

Operator Operator::zero(const SpaceLayout& layout) {
  return Operator(layout, SparseMatrix(layout.total_dim(), layout.total_dim()));
}

DenseMatrix Operator::dense() const {
  if (const auto* d = std::get_if<DenseMatrix>(&data_)) return *d;
  return DenseMatrix(std::get<SparseMatrix>(data_));
}

SparseMatrix Operator::sparse() const {
  if (const auto* s = std::get_if<SparseMatrix>(&data_)) return *s;
  return to_sparse(std::get<DenseMatrix>(data_));
}

Operator Operator::adjoint() const {
  if (const auto* d = std::get_if<DenseMatrix>(&data_)) return Operator(layout_, DenseMatrix(d->adjoint()));
  return Operator(layout_, SparseMatrix(std::get<SparseMatrix>(data_).adjoint()));
}

double Operator::hermiticity_residual() const {
  if (const auto* d = std::get_if<DenseMatrix>(&data_)) {
    return (*d - d->adjoint()).cwiseAbs().maxCoeff();
  }
  const auto& s = std::get<SparseMatrix>(data_);
  const SparseMatrix diff = s - SparseMatrix(s.adjoint());
  double worst = 0.0;
  for (Index k = 0; k < diff.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  }
  return worst;
}

cplx Operator::expectation(const DenseMatrix& rho) const {
  if (rho.rows() != dim() || rho.cols() != dim()) throw DomainError("density matrix shape mismatch");
  if (const auto* d = std::get_if<DenseMatrix>(&data_)) return d->cwiseProduct(rho.transpose()).sum();
  const auto& s = std::get<SparseMatrix>(data_);
  cplx acc{0.0, 0.0};
  for (Index k = 0; k < s.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(s, k); it; ++it) acc += it.value() * rho(it.col(), it.row());
  }
  return acc;
}

void Operator::check_same_layout(const Operator& rhs) const {
  if (!(layout_ == rhs.layout_)) throw DomainError("operator layouts differ");
}

Operator& Operator::operator+=(const Operator& rhs) {
  check_same_layout(rhs);
  if (auto* d = std::get_if<DenseMatrix>(&data_)) {
    *d += rhs.dense();
  } else {
    data_ = normalize_storage(SparseMatrix(std::get<SparseMatrix>(data_) + rhs.sparse()));
  }
  return *this;
}

Operator& Operator::operator-=(const Operator& rhs) {
  check_same_layout(rhs);
  if (auto* d = std::get_if<DenseMatrix>(&data_)) {
    *d -= rhs.dense();
  } else {
    data_ = normalize_storage(SparseMatrix(std::get<SparseMatrix>(data_) - rhs.sparse()));
  }
  return *this;
}

Operator& Operator::operator*=(cplx scale) {
  std::visit([&](auto& m) { m *= scale; }, data_);
  return *this;
}

Operator operator*(const Operator& lhs, const Operator& rhs) {
  lhs.check_same_layout(rhs);
  if (lhs.is_dense()) return Operator(lhs.layout_, DenseMatrix(lhs.dense() * rhs.dense()));
  return Operator(lhs.layout_, SparseMatrix(lhs.sparse() * rhs.sparse()));
}

// ---------------------------------------------------------------------------
// SuperOp and vectorization

ComplexVector vectorize(const DenseMatrix& rho) {
  return Eigen::Map<const ComplexVector>(rho.data(), rho.size());
}

DenseMatrix unvectorize(const ComplexVector& v, Index dim) {
  if (v.size() != dim * dim) throw DomainError("vector length is not dim^2");
  return Eigen::Map<const DenseMatrix>(v.data(), dim, dim);
}

DenseMatrix SuperOp::apply(const DenseMatrix& rho) const {
  if (rho.rows() != hilbert_dim() || rho.cols() != hilbert_dim()) {
    throw DomainError("density matrix shape does not match superoperator");
  }
  const ComplexVector out = data * vectorize(rho);
  return unvectorize(out, hilbert_dim());
}

// ---------------------------------------------------------------------------
// embed

Operator embed(const DenseMatrix& local_op, std::string_view factor_name, const SpaceLayout& layout) {
  const std::size_t pos = layout.index_of(factor_name);
  const Index d = layout.factors()[pos].dim;
  if (local_op.rows() != d || local_op.cols() != d) {
    throw DomainError("local operator dimension does not match factor '" + std::string(factor_name) + "'");
  }
  Index left = 1;
  for (std::size_t i = 0; i < pos; ++i) left *= layout.factors()[i].dim;
  const Index right = layout.stride_of(factor_name);

  std::vector<Eigen::Triplet<cplx>> triplets;
  for (Index a = 0; a < d; ++a) {
    for (Index b = 0; b < d; ++b) {
      const cplx v = local_op(a, b);
      if (v == cplx{0.0, 0.0}) continue;
      for (Index l = 0; l < left; ++l) {
        for (Index r = 0; r < right; ++r) {
          triplets.emplace_back((l * d + a) * right + r, (l * d + b) * right + r, v);
        }
      }
    }
  }
  SparseMatrix m(layout.total_dim(), layout.total_dim());
  m.setFromTriplets(triplets.begin(), triplets.end());
  return Operator(layout, std::move(m));
}

// ---------------------------------------------------------------------------
// eig_hermitian

EigenSystem eig_hermitian(const Operator& op) {
  const double residual = op.hermiticity_residual();
  if (residual > kHermitianTolerance) {
    throw DomainError("eig_hermitian: operator is not Hermitian (residual " + std::to_string(residual) + ")");
  }
  const DenseMatrix h = op.dense();
  Eigen::SelfAdjointEigenSolver<DenseMatrix> solver(h);
  if (solver.info() != Eigen::Success) throw NumericalError("eig_hermitian: eigensolver failed");

  EigenSystem out{solver.eigenvalues(), solver.eigenvectors()};
  for (Index j = 0; j < out.vectors.cols(); ++j) {
    auto col = out.vectors.col(j);
    const double peak = col.cwiseAbs().maxCoeff();
    Index arg = 0;
    // First component within rounding of the peak, so ties resolve by index.
    while (std::abs(col(arg)) < peak * (1.0 - 1e-10)) ++arg;
    const cplx phase = std::conj(col(arg)) / std::abs(col(arg));
    col *= phase;
  }
  return out;
}

// ---------------------------------------------------------------------------
// lindblad_super

SuperOp lindblad_super(const Operator& hamiltonian, std::span<const CollapseTerm> terms) {
  const SpaceLayout& layout = hamiltonian.layout();
  const Index n = layout.total_dim();
  for (const auto& t : terms) {
    if (!(t.op.layout() == layout)) throw DomainError("lindblad_super: collapse operator layout mismatch");
    if (!(t.rate >= 0.0)) throw DomainError("lindblad_super: negative or NaN rate");
  }

  std::vector<Eigen::Triplet<cplx>> triplets;
  const cplx minus_i{0.0, -1.0};

  // Adds coeff * (A^T kron I) + coeff2 * (I kron B): left/right multiplications.
  auto add_left = [&](const SparseMatrix& a, cplx coeff) {  // vec(A rho) = (I kron A) vec(rho)
    for (Index k = 0; k < a.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
        for (Index c = 0; c < n; ++c) triplets.emplace_back(c * n + it.row(), c * n + it.col(), coeff * it.value());
      }
    }
  };
  auto add_right = [&](const SparseMatrix& b, cplx coeff) {  // vec(rho B) = (B^T kron I) vec(rho)
    for (Index k = 0; k < b.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(b, k); it; ++it) {
        // B(i, j): rho(r, i) B(i, j) contributes to out(r, j).
        for (Index r = 0; r < n; ++r) triplets.emplace_back(it.col() * n + r, it.row() * n + r, coeff * it.value());
      }
    }
  };

  const SparseMatrix h = hamiltonian.sparse();
  add_left(h, minus_i);
  add_right(h, -minus_i);

  for (const auto& t : terms) {
    if (t.rate == 0.0) continue;
    const SparseMatrix o = t.op.sparse();
    const SparseMatrix odo = SparseMatrix(o.adjoint()) * o;
    const double half = 0.5 * t.rate;
    // 2 O rho O^+ : out(r, c) += O(r, i) rho(i, j) conj(O(c, j)).
    for (Index k1 = 0; k1 < o.outerSize(); ++k1) {
      for (SparseMatrix::InnerIterator a(o, k1); a; ++a) {
        for (Index k2 = 0; k2 < o.outerSize(); ++k2) {
          for (SparseMatrix::InnerIterator b(o, k2); b; ++b) {
            triplets.emplace_back(b.row() * n + a.row(), b.col() * n + a.col(),
                                  2.0 * half * a.value() * std::conj(b.value()));
          }
        }
      }
    }
    add_left(odo, -half);
    add_right(odo, -half);
  }

  SparseMatrix l(n * n, n * n);
  l.setFromTriplets(triplets.begin(), triplets.end());
  l.makeCompressed();
  return SuperOp{layout, std::move(l)};
}

// ---------------------------------------------------------------------------
// local operators

namespace local {

DenseMatrix identity(Index dim) { return DenseMatrix::Identity(dim, dim); }

DenseMatrix destroy(Index dim) {
  DenseMatrix a = DenseMatrix::Zero(dim, dim);
  for (Index k = 1; k < dim; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return a;
}

DenseMatrix lowering() {
  DenseMatrix m = DenseMatrix::Zero(2, 2);
  m(1, 0) = 1.0;
  return m;
}

DenseMatrix raising() {
  DenseMatrix m = DenseMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  return m;
}

DenseMatrix pauli_z() {
  DenseMatrix m = DenseMatrix::Zero(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  return m;
}

}  // namespace local

}  // namespace thz
