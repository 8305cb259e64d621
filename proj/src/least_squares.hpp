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

#include <functional>

#include <Eigen/Dense>
#include <unsupported/Eigen/LevenbergMarquardt>
#include <unsupported/Eigen/NumericalDiff>

namespace thz::detail {

using ResidualFn = std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& r)>;

struct LeastSquaresResult {
  Eigen::VectorXd x;
  double rms = 0.0;
  bool converged = false;
  int evaluations = 0;
};

struct ResidualFunctor {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  using QRSolver = Eigen::ColPivHouseholderQR<JacobianType>;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  ResidualFn fn;
  int n_inputs;
  int n_values;

  int inputs() const { return n_inputs; }
  int values() const { return n_values; }
  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& r) const {
    fn(x, r);
    return 0;
  }
};

/// Levenberg-Marquardt with forward-difference Jacobian.
inline LeastSquaresResult least_squares(const ResidualFn& fn, Eigen::VectorXd x0, int n_values,
                                        int max_evaluations = 4000) {
  ResidualFunctor f{fn, static_cast<int>(x0.size()), n_values};
  Eigen::NumericalDiff<ResidualFunctor> diff(f);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<ResidualFunctor>> lm(diff);
  lm.setXtol(1e-15);
  lm.setFtol(1e-15);
  lm.setGtol(0.0);
  lm.setMaxfev(max_evaluations);
  const auto status = lm.minimize(x0);
  LeastSquaresResult out;
  out.x = x0;
  Eigen::VectorXd r(n_values);
  fn(x0, r);
  out.rms = std::sqrt(r.squaredNorm() / n_values);
  out.evaluations = static_cast<int>(lm.nfev());
  out.converged = status != Eigen::LevenbergMarquardtSpace::TooManyFunctionEvaluation &&
                  status != Eigen::LevenbergMarquardtSpace::ImproperInputParameters &&
                  x0.allFinite();
  return out;
}

}  // namespace thz::detail
