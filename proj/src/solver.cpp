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

#include "thz/solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <string>

#include <Eigen/SparseLU>
#include <unsupported/Eigen/MatrixFunctions>

#include "thz/error.hpp"

namespace thz {

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(SpaceLayout layout, DenseMatrix data)
    : layout_(std::move(layout)), data_(std::move(data)) {
  if (data_.rows() != layout_.total_dim() || data_.cols() != layout_.total_dim()) {
    throw DomainError("density matrix shape does not match layout");
  }
  const double herm = (data_ - data_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kHermitianTol) throw NumericalError("density matrix not Hermitian: " + std::to_string(herm));
  const cplx tr = data_.trace();
  if (std::abs(tr - 1.0) > kTraceTol) throw NumericalError("density matrix trace deviates from 1");
  const DenseMatrix hermitian = 0.5 * (data_ + data_.adjoint());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(hermitian, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kNegativityTol) {
    throw NumericalError("density matrix has eigenvalue " + std::to_string(es.eigenvalues().minCoeff()));
  }
}

DensityMatrix DensityMatrix::clipped() const {
  const DenseMatrix hermitian = 0.5 * (data_ + data_.adjoint());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(hermitian);
  Eigen::VectorXd w = es.eigenvalues().cwiseMax(0.0);
  w /= w.sum();
  const DenseMatrix& v = es.eigenvectors();
  return DensityMatrix(layout_, DenseMatrix(v * w.cast<cplx>().asDiagonal() * v.adjoint()));
}

// ---------------------------------------------------------------------------
// steady state

namespace {

double one_norm(const SparseMatrix& m) {
  double best = 0.0;
  for (Index k = 0; k < m.outerSize(); ++k) {
    double col = 0.0;
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) col += std::abs(it.value());
    best = std::max(best, col);
  }
  return best;
}

// Hager-Higham estimate of |A^-1|_1 from solves with A and A^H.
double inverse_one_norm(Eigen::SparseLU<SparseMatrix>& lu, Index n) {
  ComplexVector x = ComplexVector::Constant(n, cplx(1.0 / static_cast<double>(n), 0.0));
  double estimate = 0.0;
  Index last = -1;
  for (int iter = 0; iter < 5; ++iter) {
    const ComplexVector y = lu.solve(x);
    estimate = y.cwiseAbs().sum();
    ComplexVector xi(n);
    for (Index i = 0; i < n; ++i) {
      const double m = std::abs(y(i));
      xi(i) = m > 0.0 ? y(i) / m : cplx(1.0, 0.0);
    }
    const ComplexVector z = lu.adjoint().solve(xi);
    Index j = 0;
    const double zmax = z.cwiseAbs().maxCoeff(&j);
    if (zmax <= std::real(z.dot(x)) || j == last) break;
    last = j;
    x.setZero();
    x(j) = 1.0;
  }
  return estimate;
}

}  // namespace

BorderedSolver::BorderedSolver(Eigen::VectorXd trace_weights, std::vector<int> levels)
    : weights_(std::move(trace_weights)), levels_(std::move(levels)) {}

bool BorderedSolver::solve_by_levels(const SparseMatrix& m, ComplexVector& x, SolveReport& rep) const {
  const Index n = m.rows();
  if (static_cast<Index>(levels_.size()) != n) throw DomainError("level vector does not match the generator");
  const int n_levels = *std::max_element(levels_.begin(), levels_.end()) + 1;
  std::vector<std::vector<Index>> members(static_cast<std::size_t>(n_levels));
  std::vector<Index> pos(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    auto& bucket = members[static_cast<std::size_t>(levels_[static_cast<std::size_t>(i)])];
    pos[static_cast<std::size_t>(i)] = static_cast<Index>(bucket.size());
    bucket.push_back(i);
  }

  using Triplets = std::vector<Eigen::Triplet<cplx>>;
  std::vector<Triplets> diag(members.size()), lower(members.size()), upper(members.size());
  for (Index k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
      const auto li = static_cast<std::size_t>(levels_[static_cast<std::size_t>(it.row())]);
      const auto lj = static_cast<std::size_t>(levels_[static_cast<std::size_t>(it.col())]);
      const Index pi = pos[static_cast<std::size_t>(it.row())];
      if (li == lj) {
        diag[li].emplace_back(pi, pos[static_cast<std::size_t>(it.col())], it.value());
      } else if (lj < li) {
        lower[li].emplace_back(pi, it.col(), it.value());
      } else {
        upper[li].emplace_back(pi, it.col(), it.value());
      }
    }
  }

  std::vector<Eigen::SparseLU<SparseMatrix>> lus(members.size());
  std::vector<SparseMatrix> lo(members.size()), up(members.size());
  for (std::size_t l = 0; l < members.size(); ++l) {
    const auto size = static_cast<Index>(members[l].size());
    if (size == 0) continue;
    SparseMatrix block(size, size);
    block.setFromTriplets(diag[l].begin(), diag[l].end());
    block.makeCompressed();
    lus[l].analyzePattern(block);
    lus[l].factorize(block);
    if (lus[l].info() != Eigen::Success) return false;
    const double cond = one_norm(block) * inverse_one_norm(lus[l], size);
    if (!std::isfinite(cond) || cond > kConditionLimit) return false;
    rep.condition = std::max(rep.condition, cond);
    lo[l].resize(size, n);
    lo[l].setFromTriplets(lower[l].begin(), lower[l].end());
    up[l].resize(size, n);
    up[l].setFromTriplets(upper[l].begin(), upper[l].end());
  }

  // y = M0^-1 v by forward substitution over levels.
  auto forward = [&](const ComplexVector& v) {
    ComplexVector y = ComplexVector::Zero(n);
    for (std::size_t l = 0; l < members.size(); ++l) {
      const auto& idx = members[l];
      if (idx.empty()) continue;
      ComplexVector seg(static_cast<Index>(idx.size()));
      for (std::size_t q = 0; q < idx.size(); ++q) seg(static_cast<Index>(q)) = v(idx[q]);
      seg -= lo[l] * y;
      const ComplexVector sol = lus[l].solve(seg);
      for (std::size_t q = 0; q < idx.size(); ++q) y(idx[q]) = sol(static_cast<Index>(q));
    }
    return y;
  };
  auto upper_apply = [&](const ComplexVector& v) {
    ComplexVector out = ComplexVector::Zero(n);
    for (std::size_t l = 0; l < members.size(); ++l) {
      const auto& idx = members[l];
      if (idx.empty()) continue;
      const ComplexVector part = up[l] * v;
      for (std::size_t q = 0; q < idx.size(); ++q) out(idx[q]) = part(static_cast<Index>(q));
    }
    return out;
  };

  ComplexVector b = ComplexVector::Zero(n);
  b(0) = 1.0;
  x = forward(b);
  for (int iter = 1; iter <= 60; ++iter) {
    const ComplexVector next = forward(b - upper_apply(x));
    const double change = (next - x).norm();
    x = next;
    if (!x.allFinite()) return false;
    if (change <= 1e-15 * x.norm()) {
      rep.block_iterations = iter;
      return true;
    }
  }
  return false;
}

ComplexVector BorderedSolver::solve(const SparseMatrix& a, SolveReport* report) {
  const Index d = weights_.size();
  const Index n = a.rows();
  if (a.cols() != n || n != d * d) throw DomainError("bordered solve: generator is not dim^2 square");
  std::vector<Eigen::Triplet<cplx>> triplets;
  triplets.reserve(static_cast<std::size_t>(a.nonZeros() + d));
  for (Index k = 0; k < a.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(a, k); it; ++it) {
      if (it.row() != 0) triplets.emplace_back(it.row(), it.col(), it.value());
    }
  }
  for (Index i = 0; i < d; ++i) triplets.emplace_back(0, vec_index(i, i, d), weights_(i));
  SparseMatrix m(n, n);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();

  SolveReport rep;
  rep.bound = kResidualFactor * a.norm();

  ComplexVector x;
  if (!levels_.empty()) {
    SolveReport trial = rep;
    if (solve_by_levels(m, x, trial) && (a * x).norm() < rep.bound) {
      rep = trial;
      rep.residual = (a * x).norm();
      if (report != nullptr) *report = rep;
      return x;
    }
  }
  const std::vector<int> outer(m.outerIndexPtr(), m.outerIndexPtr() + n + 1);
  const std::vector<int> inner(m.innerIndexPtr(), m.innerIndexPtr() + m.nonZeros());
  if (!analyzed_ || outer != outer_ || inner != inner_) {
    lu_ = std::make_unique<Eigen::SparseLU<SparseMatrix>>();
    lu_->analyzePattern(m);
    outer_ = outer;
    inner_ = inner;
    analyzed_ = true;
  }
  Eigen::SparseLU<SparseMatrix>& lu = *lu_;
  lu.factorize(m);
  bool ok = lu.info() == Eigen::Success;
  if (ok) {
    rep.condition = one_norm(m) * inverse_one_norm(lu, n);
    ok = std::isfinite(rep.condition) && rep.condition <= kConditionLimit;
  }
  if (ok) {
    ComplexVector rhs = ComplexVector::Zero(n);
    rhs(0) = 1.0;
    x = lu.solve(rhs);
    ok = lu.info() == Eigen::Success && x.allFinite();
  }
  if (!ok) {
    // Dense nullspace of the generator itself.
    rep.dense_fallback = true;
    const DenseMatrix dense(a);
    Eigen::BDCSVD<DenseMatrix> svd(dense, Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double tol = 1e-11 * std::max(sv(0), std::numeric_limits<double>::min());
    Index nullity = 0;
    for (Index i = 0; i < sv.size(); ++i) nullity += sv(i) <= tol ? 1 : 0;
    if (nullity > 1) {
      throw DegenerateSteadyState("steady state is not unique (nullspace dimension " +
                                  std::to_string(nullity) + ")");
    }
    if (nullity == 0) throw NumericalError("generator has no nullspace within tolerance");
    const ComplexVector v = svd.matrixV().col(n - 1);
    cplx tr{0.0, 0.0};
    for (Index i = 0; i < d; ++i) tr += weights_(i) * v(vec_index(i, i, d));
    if (std::abs(tr) == 0.0) throw NumericalError("nullspace vector is traceless");
    x = v / tr;
  }
  rep.residual = (a * x).norm();
  if (!(rep.residual < rep.bound)) {
    throw NumericalError("steady-state residual " + std::to_string(rep.residual) +
                         " exceeds bound " + std::to_string(rep.bound));
  }
  if (report != nullptr) *report = rep;
  return x;
}

SteadyState steady_state_report(const SuperOp& L) {
  const Index d = L.hilbert_dim();
  if (L.dim() != d * d) throw DomainError("superoperator dimension is not dim^2");
  BorderedSolver solver(Eigen::VectorXd::Ones(d));
  SolveReport report;
  DenseMatrix rho = unvectorize(solver.solve(L.data, &report), d);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  rho /= rho.trace().real();
  return {DensityMatrix(L.layout, std::move(rho)), report};
}

DensityMatrix steady_state(const SuperOp& L) { return steady_state_report(L).rho; }

ScaledSteadyState steady_state_scaled(const SuperOp& L, const std::vector<int>& exponents,
                                      double base) {
  const Index d = L.hilbert_dim();
  if (static_cast<Index>(exponents.size()) != L.dim()) {
    throw DomainError("scaling exponents must cover every vectorized entry");
  }
  if (!(base > 0.0)) throw DomainError("scaling base must be positive");
  SparseMatrix scaled = L.data;
  for (Index k = 0; k < scaled.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(scaled, k); it; ++it) {
      const int e = exponents[static_cast<std::size_t>(it.col())] - exponents[static_cast<std::size_t>(it.row())];
      if (e != 0) it.valueRef() *= std::pow(base, e);
    }
  }
  Eigen::VectorXd weights(d);
  for (Index i = 0; i < d; ++i) {
    weights(i) = std::pow(base, exponents[static_cast<std::size_t>(vec_index(i, i, d))]);
  }
  BorderedSolver solver(std::move(weights));
  ScaledSteadyState out;
  out.scaled = solver.solve(scaled, &out.report);
  return out;
}

// ---------------------------------------------------------------------------
// time evolution

namespace {

void check_taus(const std::vector<double>& taus) {
  for (std::size_t i = 0; i < taus.size(); ++i) {
    if (!std::isfinite(taus[i]) || taus[i] < 0.0) throw DomainError("taus must be finite and non-negative");
    if (i > 0 && taus[i] < taus[i - 1]) throw DomainError("taus must be ascending");
  }
}

using Sink = std::function<void(std::size_t, const ComplexVector&)>;

void evolve_dopri(const SparseMatrix& L, const ComplexVector& x0, const std::vector<double>& taus,
                  const EvolveOptions& o, const Sink& sink) {
  // Dormand-Prince 5(4) tableau.
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                   e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  (void)c2; (void)c3; (void)c4; (void)c5;

  ComplexVector y = x0;
  double t = 0.0;
  double scale = 0.0;
  for (Index k = 0; k < L.outerSize(); ++k) {
    double col = 0.0;
    for (SparseMatrix::InnerIterator it(L, k); it; ++it) col += std::abs(it.value());
    scale = std::max(scale, col);
  }
  double h = scale > 0.0 ? 0.05 / scale : 1.0;
  ComplexVector k1 = L * y, k2, k3, k4, k5, k6, k7, ynew, err;
  long steps = 0;

  for (std::size_t idx = 0; idx < taus.size(); ++idx) {
    const double target = taus[idx];
    while (t < target) {
      if (++steps > o.max_steps) throw NumericalError("evolve: step budget exhausted");
      const bool last = t + h >= target;
      const double step = last ? target - t : h;
      k2 = L * (y + step * (a21 * k1));
      k3 = L * (y + step * (a31 * k1 + a32 * k2));
      k4 = L * (y + step * (a41 * k1 + a42 * k2 + a43 * k3));
      k5 = L * (y + step * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      k6 = L * (y + step * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      ynew = y + step * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      k7 = L * ynew;
      err = step * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      double acc = 0.0;
      for (Index i = 0; i < y.size(); ++i) {
        const double sc = o.atol + o.rtol * std::max(std::abs(y(i)), std::abs(ynew(i)));
        const double r = std::abs(err(i)) / sc;
        acc += r * r;
      }
      const double norm = std::sqrt(acc / static_cast<double>(y.size()));
      const double factor = norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 5.0);
      if (norm <= 1.0) {
        t = last ? target : t + step;
        y.swap(ynew);
        k1 = k7;
        if (!last || factor < 1.0) h = step * factor;
      } else {
        h = step * factor;
        if (h < o.min_step) throw NumericalError("evolve: step size underflow");
      }
    }
    sink(idx, y);
  }
}

void evolve_expm(const SparseMatrix& L, const ComplexVector& x0, const std::vector<double>& taus,
                 const Sink& sink) {
  const DenseMatrix dense(L);
  std::vector<std::pair<double, DenseMatrix>> cache;
  ComplexVector y = x0;
  double t = 0.0;
  ComplexVector next;
  for (std::size_t idx = 0; idx < taus.size(); ++idx) {
    const double target = taus[idx];
    const double dt = target - t;
    if (dt > 0.0) {
      const DenseMatrix* prop = nullptr;
      for (const auto& [step, m] : cache) {
        if (std::abs(step - dt) <= 1e-12 * dt) {
          prop = &m;
          break;
        }
      }
      if (prop == nullptr) {
        cache.emplace_back(dt, DenseMatrix((dense * cplx(dt, 0.0)).exp()));
        if (cache.size() > 8) cache.erase(cache.begin());
        prop = &cache.back().second;
      }
      next.noalias() = (*prop) * y;
      y.swap(next);
      if (!y.allFinite()) throw NumericalError("evolve: propagator produced non-finite values");
    }
    t = target;
    sink(idx, y);
  }
}

void evolve_stream(const SuperOp& L, const ComplexVector& x0, const std::vector<double>& taus,
                   const EvolveOptions& opts, const Sink& sink) {
  if (x0.size() != L.dim()) throw DomainError("initial vector does not match superoperator");
  check_taus(taus);
  if (opts.method == Propagation::Exponential) {
    evolve_expm(L.data, x0, taus, sink);
  } else {
    evolve_dopri(L.data, x0, taus, opts, sink);
  }
}

}  // namespace

std::vector<ComplexVector> evolve_vec(const SuperOp& L, const ComplexVector& x0,
                                      const std::vector<double>& taus, const EvolveOptions& opts) {
  std::vector<ComplexVector> out(taus.size());
  evolve_stream(L, x0, taus, opts, [&](std::size_t i, const ComplexVector& y) { out[i] = y; });
  return out;
}

std::vector<DenseMatrix> evolve(const SuperOp& L, const DenseMatrix& rho0,
                                const std::vector<double>& taus, const EvolveOptions& opts) {
  const auto vecs = evolve_vec(L, vectorize(rho0), taus, opts);
  std::vector<DenseMatrix> out;
  out.reserve(vecs.size());
  for (const auto& v : vecs) out.push_back(unvectorize(v, L.hilbert_dim()));
  return out;
}

CorrelationTrace two_time(const SuperOp& L, const DensityMatrix& rho_ss, const Operator& left,
                          const Operator& right, const std::vector<double>& taus,
                          CorrelationKernel kernel, const EvolveOptions& opts) {
  if (!(left.layout() == L.layout) || !(right.layout() == L.layout)) {
    throw DomainError("two_time: operator layouts differ from the generator");
  }
  if (taus.empty() || taus.front() != 0.0) throw DomainError("two_time: taus must start at 0");
  const DenseMatrix rho = rho_ss.clipped().data();
  const DenseMatrix l = left.dense();
  const DenseMatrix r = right.dense();
  DenseMatrix start;
  DenseMatrix probe;
  if (kernel == CorrelationKernel::FirstOrder) {
    start = rho * l;
    probe = r;
  } else {
    start = r * rho * l;
    probe = l * r;
  }
  // Tr[probe X] = sum_ij probe(i, j) X(j, i) as a row vector on vec(X).
  const Index d = L.hilbert_dim();
  ComplexVector w(d * d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) w(vec_index(j, i, d)) = probe(i, j);
  }
  CorrelationTrace trace;
  trace.taus = taus;
  trace.values.resize(taus.size());
  evolve_stream(L, vectorize(start), taus, opts,
                [&](std::size_t i, const ComplexVector& y) { trace.values[i] = w.transpose() * y; });
  return trace;
}

cplx liouvillian_gap(const SuperOp& L) {
  const DenseMatrix dense(L.data);
  Eigen::ComplexEigenSolver<DenseMatrix> es(dense, false);
  if (es.info() != Eigen::Success) throw NumericalError("liouvillian_gap: eigensolver failed");
  const auto& ev = es.eigenvalues();
  Index zero = 0;
  ev.cwiseAbs().minCoeff(&zero);
  Index best = -1;
  for (Index i = 0; i < ev.size(); ++i) {
    if (i == zero) continue;
    if (best < 0) {
      best = i;
      continue;
    }
    const double dr = ev(i).real() - ev(best).real();
    const double tol = 1e-12 * std::max(1.0, std::abs(ev(best)));
    if (dr > tol || (std::abs(dr) <= tol && ev(i).imag() > ev(best).imag())) best = i;
  }
  if (best < 0) throw NumericalError("liouvillian_gap: generator has a single eigenvalue");
  return ev(best);
}

double trace_distance(const DenseMatrix& a, const DenseMatrix& b) {
  const DenseMatrix diff = a - b;
  const DenseMatrix herm = 0.5 * (diff + diff.adjoint());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(herm, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

}  // namespace thz
