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

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "thz/model.hpp"
#include "thz/solver.hpp"

// Steady-state observables: output flux, Glauber functions, filtered
// spectra and frequency-resolved photon correlations.
namespace thz {

inline constexpr double kPopulationFloor = 1e-14;
inline constexpr double kSensorPopulationFloor = 1e-16;

struct StatRecord {
  double flux = 0.0;        // kappa <X- X+>
  double population = 0.0;  // <X- X+>
  std::optional<double> g2; // empty when population < kPopulationFloor
  std::map<int, double> glauber;  // n -> <(X-)^n (X+)^n>
  SolveReport report;

  /// Throws UndefinedObservable when g2 is missing.
  double g2_zero() const;
};

/// Statistics of a given state for output operator `out`, up to Glauber
/// order `max_order`.
StatRecord stats_from_state(const DensityMatrix& rho, const Operator& out, double kappa,
                            int max_order = 2);

StatRecord flux_and_g2(const SystemParams& p, const DressedFrame& f, const ModelVariant& v,
                       int max_order = 2);

/// <(X-)^n (X+)^n>, n in 1..3; needs n_max >= n + 1.
double glauber(const SystemParams& p, const DressedFrame& f, const ModelVariant& v, int n);

// --- spectrum from the first-order correlation ----------------------------

struct SpectrumOptions {
  double tau_step = 0.0;  // 0: 0.25 / (max|omega| + omega_R + omega_c)
  double tau_max = 0.0;   // 0: automatic, see spectrum_direct
  Propagation method = Propagation::Exponential;
};

struct Spectrum {
  std::vector<double> omega;
  std::vector<double> value;      // Re of the filtered transform
  std::vector<double> imaginary;  // diagnostic remainder
  double population = 0.0;        // <X- X+>
  double tau_max = 0.0;
  double tau_step = 0.0;
};

/// S(omega) = (1/pi) Re int_0^inf exp[(i omega - Gamma/2) tau] <X-(0) X+(tau)> dtau
/// by the trapezoid rule. tau_max defaults to max(10/Gamma, 10/|Re lambda_2|),
/// capped where the filter factor exp(-Gamma tau / 2) falls below 1e-12.
Spectrum spectrum_direct(const SystemParams& p, const DressedFrame& f, const ModelVariant& v,
                         const std::vector<double>& omega_grid, double linewidth,
                         const SpectrumOptions& opts = {});

// --- sensor method -----------------------------------------------------------

struct SensorConfig {
  std::vector<double> frequencies;
  double linewidth = 0.0;  // Gamma
  double coupling = 0.0;   // epsilon; 0 selects the default 1e-3 sqrt(Gamma gamma_min / 2)
  bool strict = false;     // re-run at epsilon / 2 and require < 1% change
};

/// Largest coupling accepted for a given model and sensor linewidth.
double sensor_coupling_bound(const SystemParams& p, const DressedFrame& f, const ModelVariant& v,
                             double linewidth);

/// Model augmented with one or two two-level sensors, each coupled through
/// epsilon (b X- + b^dagger X+) and decaying at Gamma. The generator is built
/// once; solve() only updates the sensor frequencies. Not thread-safe.
class SensorModel {
 public:
  SensorModel(const SystemParams& p, const DressedFrame& f, const ModelVariant& v,
              int n_sensors, double linewidth, double coupling = 0.0);

  struct Result {
    std::vector<double> population;  // <b_i^dagger b_i> / epsilon^2
    double cross = 0.0;              // <n_1 n_2> / epsilon^4 (two sensors)
    SolveReport report;
  };

  Result solve(std::span<const double> frequencies);

  int sensors() const { return n_sensors_; }
  double coupling() const { return coupling_; }
  Index dim() const { return layout_.total_dim(); }

 private:
  int n_sensors_;
  double coupling_;
  SpaceLayout layout_;
  SparseMatrix base_;                  // scaled generator without sensor energies
  std::vector<Eigen::VectorXcd> detuning_diag_;  // -i[b^+b, .] per sensor (diagonal)
  std::vector<int> excitations_;       // sensor excitations per basis state
  BorderedSolver solver_;
};

struct SensorEstimate {
  double value = 0.0;
  double coupling = 0.0;
  std::optional<double> half_coupling_value;
};

SensorEstimate spectrum_sensor_detail(const SystemParams& p, const DressedFrame& f,
                                      const ModelVariant& v, double omega, const SensorConfig& cfg);
/// <b^dagger b> / epsilon^2 for a sensor at `omega`; equals
/// (2 pi / Gamma) S(omega) in the linear-response limit.
double spectrum_sensor(const SystemParams& p, const DressedFrame& f, const ModelVariant& v,
                       double omega, const SensorConfig& cfg);

SensorEstimate filtered_g2_detail(const SystemParams& p, const DressedFrame& f,
                                  const ModelVariant& v, double omega1, double omega2,
                                  const SensorConfig& cfg);
double filtered_g2(const SystemParams& p, const DressedFrame& f, const ModelVariant& v,
                   double omega1, double omega2, const SensorConfig& cfg);

/// R = g(w1, w2)^2 / [g(w1, w1) g(w2, w2)].
double csi_ratio(const SystemParams& p, const DressedFrame& f, const ModelVariant& v,
                 double omega1, double omega2, const SensorConfig& cfg);

struct CsiMap {
  std::vector<double> omega1;
  std::vector<double> omega2;
  // Row-major over (omega1, omega2); missing cells are empty.
  std::vector<std::optional<double>> g2;
  std::vector<std::optional<double>> ratio;
  std::vector<std::string> missing_reason;

  std::optional<double> at(std::size_t i, std::size_t j) const { return ratio[i * omega2.size() + j]; }
};

CsiMap csi_map(const SystemParams& p, const DressedFrame& f, const ModelVariant& v,
               const std::vector<double>& omega1, const std::vector<double>& omega2,
               const SensorConfig& cfg, std::size_t workers = 1);

// --- delayed coherence ------------------------------------------------------------

enum class CorrelatedChannel { Cavity, Emitter };

struct ExponentialFit {
  double amplitude = 0.0;
  double rate = 0.0;
  double rms = 0.0;
};

/// Least-squares fit of y = amplitude * exp(-rate * t).
ExponentialFit fit_exponential(const std::vector<double>& t, const std::vector<double>& y);

struct G2Trace {
  std::vector<double> taus;
  std::vector<double> g2;
  ExponentialFit fit;          // of 1 - g2(tau)
  double predicted_rate = 0.0; // (gamma_+ + gamma_-)(1 + C_tilde)
};

G2Trace g2_tau(const SystemParams& p, const DressedFrame& f, const ModelVariant& v,
               const std::vector<double>& taus, CorrelatedChannel channel,
               const EvolveOptions& opts = {Propagation::Exponential});

}  // namespace thz
