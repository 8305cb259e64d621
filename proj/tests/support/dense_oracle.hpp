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

// Brute-force reference models for small truncations, written without the
// library's operator or Liouvillian code. The arithmetic is templated so the
// same model can run in double or in 50-digit floating point; steady-state
// moments of order 1e-12 need the latter to be resolved to 1e-8 relative.

#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

namespace oracle {

using Real50 = boost::multiprecision::cpp_bin_float_50;

template <typename R>
struct ComplexOf {
  using type = std::complex<R>;
};
template <>
struct ComplexOf<Real50> {
  using type = boost::multiprecision::cpp_complex_50;
};

template <typename R>
class Mat {
 public:
  using C = typename ComplexOf<R>::type;

  Mat(int rows, int cols) : rows_(rows), cols_(cols), d_(static_cast<std::size_t>(rows * cols), C(0)) {}
  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = C(1);
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  C& operator()(int r, int c) { return d_[static_cast<std::size_t>(r * cols_ + c)]; }
  const C& operator()(int r, int c) const { return d_[static_cast<std::size_t>(r * cols_ + c)]; }

  Mat adjoint() const {
    Mat out(cols_, rows_);
    for (int r = 0; r < rows_; ++r) {
      for (int c = 0; c < cols_; ++c) out(c, r) = conj((*this)(r, c));
    }
    return out;
  }

  friend Mat operator*(const Mat& a, const Mat& b) {
    Mat out(a.rows_, b.cols_);
    for (int r = 0; r < a.rows_; ++r) {
      for (int k = 0; k < a.cols_; ++k) {
        const C x = a(r, k);
        if (x == C(0)) continue;
        for (int c = 0; c < b.cols_; ++c) out(r, c) += x * b(k, c);
      }
    }
    return out;
  }
  friend Mat operator+(Mat a, const Mat& b) {
    for (std::size_t i = 0; i < a.d_.size(); ++i) a.d_[i] += b.d_[i];
    return a;
  }
  friend Mat operator-(Mat a, const Mat& b) {
    for (std::size_t i = 0; i < a.d_.size(); ++i) a.d_[i] -= b.d_[i];
    return a;
  }
  friend Mat operator*(const C& s, Mat a) {
    for (auto& x : a.d_) x *= s;
    return a;
  }

  C trace() const {
    C t(0);
    for (int i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
  }

 private:
  int rows_;
  int cols_;
  std::vector<C> d_;
};

template <typename R>
Mat<R> kron(const Mat<R>& a, const Mat<R>& b) {
  Mat<R> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) {
      for (int k = 0; k < b.rows(); ++k) {
        for (int l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
      }
    }
  }
  return out;
}

template <typename R>
Mat<R> annihilation(int levels) {
  using std::sqrt;
  Mat<R> a(levels, levels);
  for (int n = 1; n < levels; ++n) a(n - 1, n) = typename Mat<R>::C(sqrt(R(n)));
  return a;
}

template <typename R>
struct Jump {
  R rate;
  Mat<R> op;
};

// Steady state of -i[H, rho] + sum (rate / 2)(2 J rho J^dag - {J^dag J, rho}),
// solved by Gaussian elimination with the first equation replaced by Tr rho = 1.
template <typename R>
Mat<R> steady_state(const Mat<R>& h, const std::vector<Jump<R>>& jumps) {
  using C = typename Mat<R>::C;
  using std::abs;
  const int n = h.rows();
  const int nn = n * n;
  const C minus_i(R(0), R(-1));
  const R half(0.5);
  std::vector<Mat<R>> jd;
  for (const auto& j : jumps) jd.push_back(j.op.adjoint() * j.op);
  std::vector<std::vector<C>> a(static_cast<std::size_t>(nn), std::vector<C>(static_cast<std::size_t>(nn) + 1, C(0)));
  for (int col = 0; col < n; ++col) {
    for (int row = 0; row < n; ++row) {
      Mat<R> e(n, n);
      e(row, col) = C(1);
      Mat<R> out = minus_i * (h * e - e * h);
      for (std::size_t k = 0; k < jumps.size(); ++k) {
        const auto& j = jumps[k];
        out = out + C(half * j.rate) * (C(2) * (j.op * e * j.op.adjoint()) - jd[k] * e - e * jd[k]);
      }
      for (int c2 = 0; c2 < n; ++c2) {
        for (int r2 = 0; r2 < n; ++r2) a[static_cast<std::size_t>(c2 * n + r2)][static_cast<std::size_t>(col * n + row)] = out(r2, c2);
      }
    }
  }
  for (int k = 0; k < nn; ++k) a[0][static_cast<std::size_t>(k)] = C(0);
  for (int d = 0; d < n; ++d) a[0][static_cast<std::size_t>(d * n + d)] = C(1);
  a[0][static_cast<std::size_t>(nn)] = C(1);

  for (int piv = 0; piv < nn; ++piv) {
    int best = piv;
    for (int r = piv + 1; r < nn; ++r) {
      if (abs(a[static_cast<std::size_t>(r)][static_cast<std::size_t>(piv)]) >
          abs(a[static_cast<std::size_t>(best)][static_cast<std::size_t>(piv)])) {
        best = r;
      }
    }
    std::swap(a[static_cast<std::size_t>(piv)], a[static_cast<std::size_t>(best)]);
    const C p = a[static_cast<std::size_t>(piv)][static_cast<std::size_t>(piv)];
    if (abs(p) == R(0)) throw std::runtime_error("oracle generator is singular");
    for (int r = piv + 1; r < nn; ++r) {
      const C f = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(piv)] / p;
      if (f == C(0)) continue;
      for (int c = piv; c <= nn; ++c) {
        a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] -= f * a[static_cast<std::size_t>(piv)][static_cast<std::size_t>(c)];
      }
    }
  }
  std::vector<C> x(static_cast<std::size_t>(nn), C(0));
  for (int r = nn - 1; r >= 0; --r) {
    C s = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(nn)];
    for (int c = r + 1; c < nn; ++c) s -= a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] * x[static_cast<std::size_t>(c)];
    x[static_cast<std::size_t>(r)] = s / a[static_cast<std::size_t>(r)][static_cast<std::size_t>(r)];
  }
  Mat<R> rho(n, n);
  for (int c = 0; c < n; ++c) {
    for (int r = 0; r < n; ++r) rho(r, c) = x[static_cast<std::size_t>(c * n + r)];
  }
  return rho;
}

template <typename R>
R expect(const Mat<R>& op, const Mat<R>& rho) {
  return (op * rho).trace().real();
}

// Dressed emitter (index 0 = upper) times a cavity cut at `levels` Fock
// states with H = (wr / 2) z + wc a^dag a - g (a z+ + a^dag z-).
struct JcInputs {
  double omega_r;
  double omega_c;
  double g;
  double kappa;
  double gamma_plus;
  double gamma_minus;
  double gamma_z;
};

struct JcResult {
  double photons;  // <a^dag a>
  double upper;    // upper dressed-state population
  double g2;       // <a^dag a^dag a a> / <a^dag a>^2
};

template <typename R = Real50>
JcResult jaynes_cummings(const JcInputs& in, int levels) {
  using C = typename Mat<R>::C;
  Mat<R> zp(2, 2);
  zp(0, 1) = C(1);
  const Mat<R> zm = zp.adjoint();
  Mat<R> zz(2, 2);
  zz(0, 0) = C(1);
  zz(1, 1) = C(-1);
  const Mat<R> id = Mat<R>::identity(levels);
  const Mat<R> a = kron(Mat<R>::identity(2), annihilation<R>(levels));
  const Mat<R> sp = kron(zp, id);
  const Mat<R> sm = kron(zm, id);
  const Mat<R> sz = kron(zz, id);
  const Mat<R> ad = a.adjoint();
  const Mat<R> h = C(R(0.5) * R(in.omega_r)) * sz + C(R(in.omega_c)) * (ad * a) - C(R(in.g)) * (a * sp + ad * sm);
  std::vector<Jump<R>> jumps = {{R(in.kappa), a}, {R(in.gamma_plus), sp}};
  if (in.gamma_minus > 0.0) jumps.push_back({R(in.gamma_minus), sm});
  if (in.gamma_z > 0.0) jumps.push_back({R(in.gamma_z), sz});
  const Mat<R> rho = steady_state(h, jumps);
  const R n1 = expect(ad * a, rho);
  const R n2 = expect(ad * ad * a * a, rho);
  JcResult r;
  r.photons = static_cast<double>(n1);
  r.upper = static_cast<double>(expect(sp * sm, rho));
  r.g2 = static_cast<double>(n2 / (n1 * n1));
  return r;
}

// Log-uniform draw on [lo, hi].
inline double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

}  // namespace oracle
