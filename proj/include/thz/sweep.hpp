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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "thz/error.hpp"
#include "thz/model.hpp"

// Parameter sweeps over the model and their tabular output. Configuration
// values use nu = omega / 2pi in THz for every frequency and rate; outputs
// follow the same convention.
namespace thz {

class UnknownPreset : public DomainError {
 public:
  using DomainError::DomainError;
};

struct Axis {
  std::string name;
  std::vector<double> values;

  friend bool operator==(const Axis&, const Axis&) = default;
};

struct SensorSettings {
  double linewidth = 0.0;  // THz; 0 uses kappa
  double coupling = 0.0;   // THz; 0 uses the default bound
  bool strict = false;

  friend bool operator==(const SensorSettings&, const SensorSettings&) = default;
};

struct TauSettings {
  double tau_max = 0.0;  // ps; 0 uses 20 tau_c
  int points = 401;

  friend bool operator==(const TauSettings&, const TauSettings&) = default;
};

struct SweepSpec {
  std::string name = "sweep";
  std::vector<Axis> axes;
  std::vector<std::pair<std::string, double>> fixed;  // insertion order kept
  std::string hold = "omega";                         // held quantity when omega_rabi is set
  std::vector<std::string> observables;
  ModelVariant variant;
  int n_max = 4;
  std::size_t workers = 1;
  std::uint64_t seed = 0;
  SensorSettings sensor;
  TauSettings tau;
  std::string spectrum_method = "sensor";  // sweep observable "spectrum"

  std::size_t cell_count() const;
  std::optional<double> fixed_value(const std::string& key) const;
  void set_fixed(const std::string& key, double value);
  void validate() const;

  friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

/// Names accepted as axes or fixed parameters.
const std::vector<std::string>& parameter_names();
/// Names accepted in `observables`.
const std::vector<std::string>& observable_names();

/// Parses a JSON config document. Throws ConfigError with the JSON pointer
/// and source line of the offending value.
SweepSpec parse_sweep_spec(const std::string& text);
/// Canonical JSON for a spec (one line, axes as explicit value lists).
std::string spec_to_json(const SweepSpec& spec);

/// 1-based line of the value at `pointer` in a JSON text, or 0.
int json_line_of(const std::string& text, const std::string& pointer);

std::vector<double> linspace(double start, double stop, int num);
std::vector<double> logspace(double start, double stop, int num);

struct ResultGrid {
  std::string name;
  std::vector<std::string> axis_names;
  std::vector<std::string> value_names;
  std::vector<std::vector<double>> axis_values;  // per row
  std::vector<std::vector<std::optional<double>>> values;
  std::vector<std::string> missing_reason;
  std::vector<std::pair<std::string, std::string>> metadata;
  std::optional<SweepSpec> spec;
  double wall_seconds = 0.0;

  std::size_t rows() const { return values.size(); }
  std::size_t column(const std::string& value_name) const;
  std::optional<double> value(std::size_t row, const std::string& value_name) const;
  void add_metadata(std::string key, std::string value) { metadata.emplace_back(std::move(key), std::move(value)); }
};

/// Long-form CSV: '#' metadata lines, header, one row per cell, empty fields
/// for missing values and a trailing missing_reason column. Wall time is not
/// written so output is reproducible byte for byte.
std::string to_csv(const ResultGrid& grid);
/// JSON mirror of to_csv with the same records; includes wall time.
std::string to_json(const ResultGrid& grid);
/// Recovers the spec echoed in the '# spec:' line of a CSV document.
SweepSpec spec_from_csv(const std::string& csv);

/// Shortest round-trip decimal for a double.
std::string format_number(double v);

// --- engines ---------------------------------------------------------------

struct CellPoint {
  SystemParams params;
  std::optional<double> omega1;  // rad/ps
  std::optional<double> omega2;  // rad/ps
  double linewidth = 0.0;        // rad/ps
  double coupling = 0.0;         // rad/ps, 0 = default
};

/// Resolves fixed values and one axis assignment into model inputs.
CellPoint resolve_point(const SweepSpec& spec, const std::vector<double>& axis_point);

/// Runs every cell independently; a failing observable becomes a missing
/// value with its reason, never aborting the grid. Output is independent of
/// the worker count.
ResultGrid run_sweep(const SweepSpec& spec);

/// Spectrum at a single point over the omega1 axis: direct and sensor methods.
ResultGrid run_spectrum(const SweepSpec& spec);

/// Cauchy-Schwarz map over the omega1 x omega2 axes at a single point.
ResultGrid run_csi(const SweepSpec& spec);

/// g2(tau) traces of the cavity output and the emitter with exponential fits.
ResultGrid run_g2tau(const SweepSpec& spec);

// --- feasibility -----------------------------------------------------------

struct FeasibilitySpec {
  std::vector<double> gammas_thz = {5e-6, 5e-5, 5e-4, 0.5};
  std::vector<double> nep = {};  // W / sqrt(Hz); empty uses a log grid
  double kappa_thz = 0.158;
  double omega_c_thz = 26.0;
  double h = 0.2;
  double kappa_rad_fraction = 1.0;
  double bandwidth_hz = 0.158e12;
  double debye_per_chi_thz = 500.0;  // 50 D per 0.1 THz
};

FeasibilitySpec parse_feasibility_spec(const std::string& text);
ResultGrid run_feasibility(const FeasibilitySpec& spec);

// --- presets ---------------------------------------------------------------

struct PresetOptions {
  std::size_t workers = 1;
  std::optional<int> n_max;
  bool strict = false;
};

const std::vector<std::string>& preset_names();
/// Specs of a sweep-style preset; throws UnknownPreset.
std::vector<ResultGrid> run_preset(const std::string& name, const PresetOptions& opts = {});

}  // namespace thz
