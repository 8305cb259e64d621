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

#include <cmath>

#include <doctest.h>

#include "thz/analytic.hpp"
#include "thz/correlations.hpp"
#include "thz/error.hpp"
#include "thz/model.hpp"
#include "thz/units.hpp"

using namespace thz;

namespace {

SystemParams rabi(double omega_rabi) { return reference_params().with_rabi_fixed_drive(units::from_thz(omega_rabi)); }

std::vector<double> grid(double lo, double hi, double step) {
  std::vector<double> g;
  for (double nu = lo; nu <= hi + 1e-12; nu += step) g.push_back(units::from_thz(nu));
  return g;
}

double integrate(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) s += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
  return s;
}

}  // namespace

TEST_CASE("no coupling means no output") {
  SystemParams p = reference_params();
  p.chi = 0.0;
  const StatRecord r = flux_and_g2(p, dress(p), {});
  CHECK(std::abs(r.flux) < 1e-14);
  CHECK_FALSE(r.g2.has_value());
  CHECK_THROWS_AS(r.g2_zero(), UndefinedObservable);

  const Spectrum s = spectrum_direct(p, dress(p), {}, grid(0.0, 50.0, 5.0), p.kappa);
  for (double v : s.value) CHECK(std::abs(v) < 1e-15);

  SensorConfig cfg;
  cfg.linewidth = p.kappa;
  CHECK(std::abs(spectrum_sensor(p, dress(p), {}, dress(p).omega_R, cfg)) < 1e-12);
}

TEST_CASE("Glauber functions") {
  SystemParams p = reference_params();
  const DressedFrame f = dress(p);
  const StatRecord r = flux_and_g2(p, f, {}, 3);
  CHECK(glauber(p, f, {}, 1) == doctest::Approx(r.population).epsilon(1e-12));
  CHECK(r.glauber.at(1) == doctest::Approx(r.population).epsilon(1e-12));
  CHECK(r.glauber.at(2) / (r.population * r.population) == doctest::Approx(r.g2_zero()).epsilon(1e-12));
  CHECK(r.glauber.at(3) >= -1e-12);
  p.n_max = 3;
  CHECK_THROWS_AS(glauber(p, f, {}, 3), DomainError);
  CHECK_THROWS_AS(glauber(p, f, {}, 4), DomainError);
}

TEST_CASE("resonance point is antibunched and close to the truncated formula") {
  SystemParams p = reference_params();
  p.kappa = p.gamma * std::pow(10.0, 2.5);
  const DressedFrame f = dress(p);
  const double g2 = flux_and_g2(p, f, {}).g2_zero();
  CHECK(g2 < 1.0);
  CHECK(std::abs(g2 / analytic::g2_truncated(p, f) - 1.0) < 0.2);
}

TEST_CASE("flux is non-negative across a Rabi sweep") {
  for (double w : {12.0, 13.0, 26.0, 39.0, 52.0, 70.0}) {
    const SystemParams p = rabi(w);
    CHECK(flux_and_g2(p, dress(p), {}).flux >= -1e-12);
  }
}

TEST_CASE("spectral sum rule for several linewidths") {
  const SystemParams p = rabi(40.0);
  const DressedFrame f = dress(p);
  for (double factor : {2.0, 4.0, 8.0}) {
    const double gamma = factor * p.kappa;
    const double nu_step = units::to_thz(gamma) / 6.0;
    const auto omega = grid(-40.0, 100.0, nu_step);
    const Spectrum s = spectrum_direct(p, f, {}, omega, gamma);
    CAPTURE(factor);
    CHECK(std::abs(integrate(omega, s.value) / s.population - 1.0) < 0.02);
  }
}

TEST_CASE("sensor spectrum matches the direct spectrum at the main line") {
  const SystemParams p = rabi(40.0);
  const DressedFrame f = dress(p);
  SensorConfig cfg;
  cfg.linewidth = p.kappa;
  const Spectrum s = spectrum_direct(p, f, {}, {f.omega_R}, p.kappa);
  const double sensor = spectrum_sensor(p, f, {}, f.omega_R, cfg);
  CHECK(sensor * p.kappa / units::kTwoPi == doctest::Approx(s.value[0]).epsilon(0.02));
}

TEST_CASE("filtered correlations: symmetry, diagonal ratio and coupling convergence") {
  const SystemParams p = rabi(40.0);
  const DressedFrame f = dress(p);
  SensorConfig cfg;
  cfg.linewidth = p.kappa;
  cfg.strict = true;
  const double w1 = f.omega_R, w2 = 0.5 * f.omega_R;
  const SensorEstimate a = filtered_g2_detail(p, f, {}, w1, w2, cfg);
  const SensorEstimate b = filtered_g2_detail(p, f, {}, w2, w1, cfg);
  CHECK(std::abs(a.value / b.value - 1.0) < 1e-6);
  REQUIRE(a.half_coupling_value.has_value());
  CHECK(std::abs(*a.half_coupling_value / a.value - 1.0) < 1e-2);
  cfg.strict = false;
  CHECK(csi_ratio(p, f, {}, w1, w1, cfg) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("coupling above the weak bound is rejected") {
  const SystemParams p = rabi(40.0);
  const DressedFrame f = dress(p);
  SensorConfig cfg;
  cfg.linewidth = p.kappa;
  cfg.coupling = 10.0 * sensor_coupling_bound(p, f, {}, p.kappa);
  CHECK_THROWS_AS(spectrum_sensor(p, f, {}, f.omega_R, cfg), DomainError);
}

TEST_CASE("small CSI map is symmetric") {
  const SystemParams p = rabi(40.0);
  const DressedFrame f = dress(p);
  SensorConfig cfg;
  cfg.linewidth = p.kappa;
  const std::vector<double> w = {units::from_thz(14.0), units::from_thz(26.0), units::from_thz(40.0)};
  const CsiMap m = csi_map(p, f, {}, w, w, cfg, 2);
  for (std::size_t i = 0; i < w.size(); ++i) {
    REQUIRE(m.at(i, i).has_value());
    CHECK(*m.at(i, i) == doctest::Approx(1.0).epsilon(1e-9));
    for (std::size_t j = 0; j < w.size(); ++j) {
      CHECK(std::abs(*m.at(i, j) - *m.at(j, i)) <= 1e-6 * std::abs(*m.at(i, j)));
    }
  }
}

TEST_CASE("exponential fit") {
  std::vector<double> t, y;
  for (int i = 0; i < 40; ++i) {
    t.push_back(0.25 * i);
    y.push_back(0.7 * std::exp(-0.3 * t.back()));
  }
  const ExponentialFit fit = fit_exponential(t, y);
  CHECK(fit.rate == doctest::Approx(0.3).epsilon(1e-8));
  CHECK(fit.amplitude == doctest::Approx(0.7).epsilon(1e-8));
  CHECK_THROWS_AS(fit_exponential({0.0, 1.0}, {1.0, 0.5}), DomainError);
}

TEST_CASE("delayed g2 recovers coherence at long times") {
  const SystemParams p = reference_params();
  const DressedFrame f = dress(p);
  const double tau_c = analytic::correlation_timescale(p, f);
  std::vector<double> taus;
  for (int i = 0; i <= 100; ++i) taus.push_back(0.2 * tau_c * i);
  const G2Trace tr = g2_tau(p, f, {}, taus, CorrelatedChannel::Cavity);
  CHECK(tr.g2.front() < 0.1);
  CHECK(std::abs(tr.g2.back() - 1.0) < 1e-2);
  CHECK(tr.fit.rate == doctest::Approx(tr.predicted_rate).epsilon(0.25));
}
