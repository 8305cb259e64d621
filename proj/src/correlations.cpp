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

#include "thz/correlations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "least_squares.hpp"
#include "thz/analytic.hpp"
#include "thz/error.hpp"
#include "thz/parallel.hpp"

namespace thz {

double StatRecord::g2_zero() const {
  if (!g2) throw UndefinedObservable("g2 undefined: output population below " + std::to_string(kPopulationFloor));
  return *g2;
}

StatRecord stats_from_state(const DensityMatrix& rho, const Operator& out, double kappa,
                            int max_order) {
  const DenseMatrix x = out.dense();
  const DenseMatrix xd = x.adjoint();
  const DenseMatrix& r = rho.data();
  StatRecord rec;
  DenseMatrix left = xd;
  DenseMatrix right = x;
  for (int n = 1; n <= std::max(1, max_order); ++n) {
    if (n > 1) {
      left = left * xd;
      right = x * right;
    }
    // Tr[(X-)^n (X+)^n rho]
    const DenseMatrix m = left * right;
    rec.glauber[n] = m.cwiseProduct(r.transpose()).sum().real();
  }
  rec.population = rec.glauber[1];
  rec.flux = kappa * rec.population;
  if (max_order >= 2 && rec.population >= kPopulationFloor) {
    rec.g2 = rec.glauber[2] / (rec.population * rec.population);
  }
  return rec;
}

StatRecord flux_and_g2(const SystemParams& p, const DressedFrame& f, const ModelVariant& v,
                       int max_order) {
  const Liouvillian model = build_liouvillian(p, f, v);
  const SteadyState ss = steady_state_report(model.L);
  StatRecord rec = stats_from_state(ss.rho, model.output, p.kappa, max_order);
  rec.report = ss.report;
  return rec;
}

double glauber(const SystemParams& p, const DressedFrame& f, const ModelVariant& v, int n) {
  if (n < 1 || n > 3) throw DomainError("glauber order must be 1, 2 or 3");
  if (p.n_max < n + 1) throw DomainError("glauber order " + std::to_string(n) + " needs n_max >= " + std::to_string(n + 1));
  return flux_and_g2(p, f, v, n).glauber.at(n);
}

// ---------------------------------------------------------------------------
// direct spectrum

Spectrum spectrum_direct(const SystemParams& p, const DressedFrame& f, const ModelVariant& v,
                         const std::vector<double>& omega_grid, double linewidth,
                         const SpectrumOptions& opts) {
  if (!(linewidth > 0.0)) throw DomainError("spectrum linewidth must be positive");
  double omega_span = 0.0;
  for (double w : omega_grid) {
    if (!std::isfinite(w)) throw DomainError("omega grid must be finite");
    omega_span = std::max(omega_span, std::abs(w));
  }
  const ModelParts parts = assemble_model(p, f, v);
  const SuperOp L = lindblad_super(parts.hamiltonian, parts.collapse);
  const DensityMatrix rho = steady_state(L);

  Spectrum out;
  out.omega = omega_grid;
  out.population = (parts.output.adjoint() * parts.output).expectation(rho.data()).real();

  double tau_max = opts.tau_max;
  if (tau_max <= 0.0) {
    const double gap = std::abs(liouvillian_gap(L).real());
    tau_max = 10.0 / linewidth;
    if (gap > 0.0) tau_max = std::max(tau_max, 10.0 / gap);
    tau_max = std::min(tau_max, 2.0 * std::log(1e12) / linewidth);
  }
  double step = opts.tau_step;
  if (step <= 0.0) step = 0.25 / (omega_span + f.omega_R + p.omega_c);
  const auto n_steps = static_cast<std::size_t>(std::ceil(tau_max / step));
  step = tau_max / static_cast<double>(n_steps);
  std::vector<double> taus(n_steps + 1);
  for (std::size_t k = 0; k <= n_steps; ++k) taus[k] = static_cast<double>(k) * step;
  out.tau_max = tau_max;
  out.tau_step = step;

  EvolveOptions eo;
  eo.method = opts.method;
  const CorrelationTrace g =
      two_time(L, rho, parts.output.adjoint(), parts.output, taus, CorrelationKernel::FirstOrder, eo);

  out.value.resize(omega_grid.size());
  out.imaginary.resize(omega_grid.size());
  for (std::size_t m = 0; m < omega_grid.size(); ++m) {
    const cplx rate(-0.5 * linewidth, omega_grid[m]);
    cplx acc{0.0, 0.0};
    for (std::size_t k = 0; k <= n_steps; ++k) {
      const double w = (k == 0 || k == n_steps) ? 0.5 : 1.0;
      acc += w * std::exp(rate * taus[k]) * g.values[k];
    }
    acc *= step / std::numbers::pi;
    out.value[m] = acc.real();
    out.imaginary[m] = acc.imag();
  }
  return out;
}

// ---------------------------------------------------------------------------
// sensors

namespace {

Operator extend(const Operator& op, const SpaceLayout& big) {
  const Index extra = big.total_dim() / op.dim();
  const SparseMatrix s = op.sparse();
  std::vector<Eigen::Triplet<cplx>> triplets;
  triplets.reserve(static_cast<std::size_t>(s.nonZeros() * extra));
  for (Index k = 0; k < s.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(s, k); it; ++it) {
      for (Index e = 0; e < extra; ++e) triplets.emplace_back(it.row() * extra + e, it.col() * extra + e, it.value());
    }
  }
  SparseMatrix m(big.total_dim(), big.total_dim());
  m.setFromTriplets(triplets.begin(), triplets.end());
  return Operator(big, std::move(m));
}

double smallest_rate(const ModelParts& parts) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& t : parts.collapse) {
    if (t.rate > 0.0) best = std::min(best, t.rate);
  }
  if (!std::isfinite(best)) throw DomainError("sensor coupling bound needs a nonzero system rate");
  return best;
}

const char* sensor_name(int i) { return i == 0 ? "s1" : "s2"; }

void check_strict(double value, double half) {
  const double scale = std::max(std::abs(value), std::abs(half));
  if (scale > 0.0 && std::abs(value - half) > 1e-2 * scale) {
    throw NumericalError("sensor result changed by more than 1% under epsilon -> epsilon/2");
  }
}

}  // namespace

double sensor_coupling_bound(const SystemParams& p, const DressedFrame& f, const ModelVariant& v,
                             double linewidth) {
  if (!(linewidth > 0.0)) throw DomainError("sensor linewidth must be positive");
  const ModelParts parts = assemble_model(p, f, v);
  return 1e-3 * std::sqrt(linewidth * smallest_rate(parts) / 2.0);
}

SensorModel::SensorModel(const SystemParams& p, const DressedFrame& f, const ModelVariant& v,
                         int n_sensors, double linewidth, double coupling)
    : n_sensors_(n_sensors), coupling_(coupling), solver_(Eigen::VectorXd()) {
  if (n_sensors < 1 || n_sensors > 2) throw DomainError("sensor count must be 1 or 2");
  if (!(linewidth > 0.0)) throw DomainError("sensor linewidth must be positive");
  const ModelParts parts = assemble_model(p, f, v);
  const double bound = 1e-3 * std::sqrt(linewidth * smallest_rate(parts) / 2.0);
  if (coupling_ == 0.0) coupling_ = bound;
  if (!(coupling_ > 0.0) || coupling_ > bound * (1.0 + 1e-12)) {
    throw DomainError("sensor coupling violates the weak-coupling bound " + std::to_string(bound));
  }

  layout_ = parts.layout;
  for (int i = 0; i < n_sensors; ++i) layout_ = layout_.extended({sensor_name(i), 2});
  const Index d = layout_.total_dim();
  const Index extra = d / parts.layout.total_dim();

  const Operator x_plus = extend(parts.output, layout_);
  const Operator x_minus = x_plus.adjoint();
  Operator h = extend(parts.hamiltonian, layout_);
  std::vector<CollapseTerm> collapse;
  for (const auto& t : parts.collapse) collapse.push_back({t.rate, extend(t.op, layout_)});
  for (int i = 0; i < n_sensors; ++i) {
    const Operator b = embed(local::destroy(2), sensor_name(i), layout_);
    h += cplx(coupling_) * (b * x_minus + b.adjoint() * x_plus);
    collapse.push_back({linewidth, b});
  }
  const SuperOp L = lindblad_super(h, collapse);

  excitations_.resize(static_cast<std::size_t>(d));
  for (Index i = 0; i < d; ++i) {
    Index bits = i % extra;
    int e = 0;
    while (bits != 0) {
      e += static_cast<int>(bits & 1);
      bits >>= 1;
    }
    excitations_[static_cast<std::size_t>(i)] = e;
  }
  auto vec_exponent = [&](Index idx) {
    return excitations_[static_cast<std::size_t>(idx % d)] + excitations_[static_cast<std::size_t>(idx / d)];
  };

  // D^-1 L D with D = diag(eps^exponent); every diagonal entry kept explicit so
  // the sparsity pattern does not depend on the sensor frequencies.
  std::vector<Eigen::Triplet<cplx>> triplets;
  triplets.reserve(static_cast<std::size_t>(L.data.nonZeros() + d * d));
  for (Index k = 0; k < L.data.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(L.data, k); it; ++it) {
      const int e = vec_exponent(it.col()) - vec_exponent(it.row());
      triplets.emplace_back(it.row(), it.col(), it.value() * std::pow(coupling_, e));
    }
  }
  for (Index k = 0; k < d * d; ++k) triplets.emplace_back(k, k, cplx{0.0, 0.0});
  base_.resize(d * d, d * d);
  base_.setFromTriplets(triplets.begin(), triplets.end());
  base_.makeCompressed();

  for (int s = 0; s < n_sensors; ++s) {
    const Index stride = layout_.stride_of(sensor_name(s));
    Eigen::VectorXcd diag(d * d);
    for (Index c = 0; c < d; ++c) {
      for (Index r = 0; r < d; ++r) {
        const double nr = static_cast<double>((r / stride) % 2);
        const double nc = static_cast<double>((c / stride) % 2);
        diag(vec_index(r, c, d)) = cplx(0.0, -(nr - nc));
      }
    }
    detuning_diag_.push_back(std::move(diag));
  }

  Eigen::VectorXd weights(d);
  for (Index i = 0; i < d; ++i) weights(i) = std::pow(coupling_, 2 * excitations_[static_cast<std::size_t>(i)]);
  std::vector<int> levels(static_cast<std::size_t>(d * d));
  for (Index k = 0; k < d * d; ++k) levels[static_cast<std::size_t>(k)] = vec_exponent(k);
  solver_ = BorderedSolver(std::move(weights), std::move(levels));
}

SensorModel::Result SensorModel::solve(std::span<const double> frequencies) {
  if (static_cast<int>(frequencies.size()) != n_sensors_) {
    throw DomainError("expected one frequency per sensor");
  }
  const Index d = layout_.total_dim();
  SparseMatrix a = base_;
  Eigen::VectorXcd shift = Eigen::VectorXcd::Zero(d * d);
  for (int s = 0; s < n_sensors_; ++s) {
    if (!std::isfinite(frequencies[static_cast<std::size_t>(s)])) throw DomainError("sensor frequency must be finite");
    shift += frequencies[static_cast<std::size_t>(s)] * detuning_diag_[static_cast<std::size_t>(s)];
  }
  for (Index k = 0; k < d * d; ++k) {
    if (shift(k) != cplx{0.0, 0.0}) a.coeffRef(k, k) += shift(k);
  }
  Result res;
  const ComplexVector y = solver_.solve(a, &res.report);

  res.population.assign(static_cast<std::size_t>(n_sensors_), 0.0);
  for (Index i = 0; i < d; ++i) {
    const int e = excitations_[static_cast<std::size_t>(i)];
    if (e == 0) continue;
    const double yii = y(vec_index(i, i, d)).real();
    for (int s = 0; s < n_sensors_; ++s) {
      const Index stride = layout_.stride_of(sensor_name(s));
      if ((i / stride) % 2 == 1) res.population[static_cast<std::size_t>(s)] += yii * std::pow(coupling_, 2 * e - 2);
    }
    if (n_sensors_ == 2 && e == 2) res.cross += yii;
  }
  return res;
}

SensorEstimate spectrum_sensor_detail(const SystemParams& p, const DressedFrame& f,
                                      const ModelVariant& v, double omega, const SensorConfig& cfg) {
  SensorEstimate est;
  SensorModel model(p, f, v, 1, cfg.linewidth, cfg.coupling);
  const double w[1] = {omega};
  est.value = model.solve(w).population[0];
  est.coupling = model.coupling();
  if (cfg.strict) {
    SensorModel half(p, f, v, 1, cfg.linewidth, 0.5 * model.coupling());
    est.half_coupling_value = half.solve(w).population[0];
    check_strict(est.value, *est.half_coupling_value);
  }
  return est;
}

double spectrum_sensor(const SystemParams& p, const DressedFrame& f, const ModelVariant& v,
                       double omega, const SensorConfig& cfg) {
  return spectrum_sensor_detail(p, f, v, omega, cfg).value;
}

namespace {

double g2_from(SensorModel& model, double omega1, double omega2) {
  const double w[2] = {omega1, omega2};
  const SensorModel::Result r = model.solve(w);
  for (double pop : r.population) {
    if (!(pop > kSensorPopulationFloor)) {
      throw UndefinedObservable("filtered g2 undefined: sensor population vanishes");
    }
  }
  return r.cross / (r.population[0] * r.population[1]);
}

}  // namespace

SensorEstimate filtered_g2_detail(const SystemParams& p, const DressedFrame& f,
                                  const ModelVariant& v, double omega1, double omega2,
                                  const SensorConfig& cfg) {
  SensorEstimate est;
  SensorModel model(p, f, v, 2, cfg.linewidth, cfg.coupling);
  est.value = g2_from(model, omega1, omega2);
  est.coupling = model.coupling();
  if (cfg.strict) {
    SensorModel half(p, f, v, 2, cfg.linewidth, 0.5 * model.coupling());
    est.half_coupling_value = g2_from(half, omega1, omega2);
    check_strict(est.value, *est.half_coupling_value);
  }
  return est;
}

double filtered_g2(const SystemParams& p, const DressedFrame& f, const ModelVariant& v,
                   double omega1, double omega2, const SensorConfig& cfg) {
  return filtered_g2_detail(p, f, v, omega1, omega2, cfg).value;
}

double csi_ratio(const SystemParams& p, const DressedFrame& f, const ModelVariant& v,
                 double omega1, double omega2, const SensorConfig& cfg) {
  const double g12 = filtered_g2(p, f, v, omega1, omega2, cfg);
  const double g11 = filtered_g2(p, f, v, omega1, omega1, cfg);
  const double g22 = filtered_g2(p, f, v, omega2, omega2, cfg);
  return g12 * g12 / (g11 * g22);
}

CsiMap csi_map(const SystemParams& p, const DressedFrame& f, const ModelVariant& v,
               const std::vector<double>& omega1, const std::vector<double>& omega2,
               const SensorConfig& cfg, std::size_t workers) {
  CsiMap map;
  map.omega1 = omega1;
  map.omega2 = omega2;
  const std::size_t n1 = omega1.size();
  const std::size_t n2 = omega2.size();
  const std::size_t cells = n1 * n2;
  map.g2.assign(cells, std::nullopt);
  map.ratio.assign(cells, std::nullopt);
  map.missing_reason.assign(cells, "");

  // Tasks: all cross cells, then the auto-correlations of both axes.
  const std::size_t tasks = cells + n1 + n2;
  std::vector<std::optional<double>> value(tasks);
  std::vector<std::string> reason(tasks);
  const std::size_t w = effective_workers(workers, tasks);
  std::vector<std::unique_ptr<SensorModel>> models(w);
  std::vector<std::unique_ptr<SensorModel>> half_models(w);

  parallel_for(tasks, w, [&](std::size_t t, std::size_t worker) {
    double a = 0.0;
    double b = 0.0;
    if (t < cells) {
      a = omega1[t / n2];
      b = omega2[t % n2];
    } else if (t < cells + n1) {
      a = b = omega1[t - cells];
    } else {
      a = b = omega2[t - cells - n1];
    }
    try {
      if (!models[worker]) models[worker] = std::make_unique<SensorModel>(p, f, v, 2, cfg.linewidth, cfg.coupling);
      const double g = g2_from(*models[worker], a, b);
      if (cfg.strict) {
        if (!half_models[worker]) {
          half_models[worker] = std::make_unique<SensorModel>(p, f, v, 2, cfg.linewidth, 0.5 * models[worker]->coupling());
        }
        check_strict(g, g2_from(*half_models[worker], a, b));
      }
      value[t] = g;
    } catch (const Error& e) {
      reason[t] = e.what();
    }
  });

  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) {
      const std::size_t c = i * n2 + j;
      map.g2[c] = value[c];
      const auto& g11 = value[cells + i];
      const auto& g22 = value[cells + n1 + j];
      if (value[c] && g11 && g22) {
        map.ratio[c] = (*value[c]) * (*value[c]) / ((*g11) * (*g22));
      } else {
        map.missing_reason[c] = !reason[c].empty() ? reason[c]
                                : !g11 ? reason[cells + i]
                                       : reason[cells + n1 + j];
      }
    }
  }
  return map;
}

// ---------------------------------------------------------------------------
// g2(tau)

ExponentialFit fit_exponential(const std::vector<double>& t, const std::vector<double>& y) {
  if (t.size() != y.size() || t.size() < 3) throw DomainError("exponential fit needs >= 3 samples");
  const double y0 = y.front();
  double rate0 = 1.0 / std::max(t.back() - t.front(), 1e-300);
  for (std::size_t i = 1; i < y.size(); ++i) {
    if (std::abs(y[i]) < std::abs(y0) / std::numbers::e) {
      rate0 = 1.0 / std::max(t[i] - t.front(), 1e-300);
      break;
    }
  }
  // Fit log(rate) so the rate stays positive.
  Eigen::VectorXd x0(2);
  x0 << y0, std::log(rate0);
  const int n = static_cast<int>(t.size());
  const auto res = detail::least_squares(
      [&](const Eigen::VectorXd& x, Eigen::VectorXd& r) {
        const double k = std::exp(x(1));
        for (int i = 0; i < n; ++i) r(i) = x(0) * std::exp(-k * t[static_cast<std::size_t>(i)]) - y[static_cast<std::size_t>(i)];
      },
      x0, n);
  if (!res.converged) throw NumericalError("exponential fit did not converge");
  return {res.x(0), std::exp(res.x(1)), res.rms};
}

G2Trace g2_tau(const SystemParams& p, const DressedFrame& f, const ModelVariant& v,
               const std::vector<double>& taus, CorrelatedChannel channel,
               const EvolveOptions& opts) {
  const ModelParts parts = assemble_model(p, f, v);
  const SuperOp L = lindblad_super(parts.hamiltonian, parts.collapse);
  const DensityMatrix rho = steady_state(L);
  const Operator& lower = channel == CorrelatedChannel::Cavity ? parts.output : parts.sigma_minus;
  const Operator upper = lower.adjoint();
  const double pop = (upper * lower).expectation(rho.data()).real();
  if (!(pop >= kPopulationFloor)) throw UndefinedObservable("g2(tau) undefined: vanishing population");
  const CorrelationTrace trace = two_time(L, rho, upper, lower, taus, CorrelationKernel::Intensity, opts);

  G2Trace out;
  out.taus = taus;
  out.g2.reserve(taus.size());
  std::vector<double> deficit;
  deficit.reserve(taus.size());
  for (const cplx& g : trace.values) {
    out.g2.push_back(g.real() / (pop * pop));
    deficit.push_back(1.0 - out.g2.back());
  }
  out.fit = fit_exponential(out.taus, deficit);
  const analytic::DerivedRates r = analytic::derived_rates(p, f);
  out.predicted_rate = (f.gamma_plus + f.gamma_minus) * (1.0 + r.C_tilde);
  return out;
}

}  // namespace thz
