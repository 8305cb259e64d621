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

#include "thz/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "least_squares.hpp"
#include "thz/error.hpp"
#include "thz/units.hpp"

#ifndef THZSOURCE_DATA_DIR
#define THZSOURCE_DATA_DIR "data"
#endif

namespace thz::feasibility {

using units::kPerPicosecond;

void LorentzMedium::validate() const {
  if (!(omega_TO > 0.0 && omega_LO > omega_TO)) throw DomainError("Lorentz medium needs omega_LO > omega_TO > 0");
  if (!(gamma_abs > 0.0)) throw DomainError("Lorentz medium needs a positive damping");
  if (!(eps_inf > 0.0)) throw DomainError("Lorentz medium needs positive eps_inf");
}

LorentzMedium LorentzMedium::silicon_carbide() {
  return {7.0, units::from_thz(23.61), units::from_thz(28.91), units::from_thz(0.084)};
}

std::complex<double> permittivity(const LorentzMedium& m, double omega) {
  m.validate();
  if (!(omega >= 0.0)) throw DomainError("permittivity needs omega >= 0");
  const double to2 = m.omega_TO * m.omega_TO;
  const double lo2 = m.omega_LO * m.omega_LO;
  const std::complex<double> den(to2 - omega * omega, -omega * m.gamma_abs);
  return m.eps_inf + m.eps_inf * (lo2 - to2) / den;
}

// ---------------------------------------------------------------------------
// mode tables

std::vector<CavityMode> load_modes_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open mode table '" + path + "'");
  std::vector<CavityMode> modes;
  std::string line;
  int lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      if (line.rfind("mode", 0) == 0) continue;
    }
    std::vector<double> fields;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        fields.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw DomainError(path + ":" + std::to_string(lineno) + ": bad number '" + cell + "'");
      }
    }
    if (fields.size() != 5) throw DomainError(path + ":" + std::to_string(lineno) + ": expected 5 columns");
    CavityMode m{units::from_thz(fields[1]), units::from_thz(fields[2]), units::from_thz(fields[3]),
                 units::from_thz(fields[4])};
    if (!(m.kappa_n > 0.0 && m.kappa_rad_n > 0.0 && m.kappa_rad_n <= m.kappa_n && m.chi_n > 0.0)) {
      throw DomainError(path + ":" + std::to_string(lineno) + ": need 0 < kappa_rad <= kappa and chi > 0");
    }
    modes.push_back(m);
  }
  if (modes.empty()) throw DomainError("mode table '" + path + "' has no rows");
  return modes;
}

std::string default_modes_path() {
  const char* env = std::getenv("THZSOURCE_DATA_DIR");
  const std::string dir = (env != nullptr && *env != '\0') ? env : THZSOURCE_DATA_DIR;
  return dir + "/sic_dimer_modes.csv";
}

std::vector<CavityMode> dimer_modes() { return load_modes_csv(default_modes_path()); }

double spectral_density(const std::vector<CavityMode>& modes, double omega) {
  if (modes.empty()) throw DomainError("spectral density needs at least one mode");
  double j = 0.0;
  for (const auto& m : modes) {
    const double half = 0.5 * m.kappa_n;
    const double d = omega - m.omega_n;
    j += m.chi_n * m.chi_n / std::numbers::pi * half / (d * d + half * half);
  }
  return j;
}

// ---------------------------------------------------------------------------
// fitting

LorentzianFit fit_lorentzians(const std::vector<double>& omega, const std::vector<double>& j,
                              const std::vector<CavityMode>& guess) {
  const auto n_modes = static_cast<int>(guess.size());
  if (n_modes < 1) throw DomainError("fit needs at least one mode");
  if (omega.size() != j.size()) throw DomainError("fit samples must pair omega with J");
  if (static_cast<int>(omega.size()) < 4 * n_modes) throw DomainError("fit needs >= 4 samples per mode");
  Eigen::VectorXd x(3 * n_modes);
  for (int m = 0; m < n_modes; ++m) {
    x(3 * m) = guess[static_cast<std::size_t>(m)].omega_n;
    x(3 * m + 1) = guess[static_cast<std::size_t>(m)].kappa_n;
    x(3 * m + 2) = guess[static_cast<std::size_t>(m)].chi_n;
  }
  const int n = static_cast<int>(omega.size());
  auto unpack = [n_modes](const Eigen::VectorXd& v) {
    std::vector<CavityMode> modes(static_cast<std::size_t>(n_modes));
    for (int m = 0; m < n_modes; ++m) {
      modes[static_cast<std::size_t>(m)] = {v(3 * m), v(3 * m + 1), 0.0, v(3 * m + 2)};
    }
    return modes;
  };
  const auto res = detail::least_squares(
      [&](const Eigen::VectorXd& v, Eigen::VectorXd& r) {
        const auto modes = unpack(v);
        for (int i = 0; i < n; ++i) {
          r(i) = spectral_density(modes, omega[static_cast<std::size_t>(i)]) - j[static_cast<std::size_t>(i)];
        }
      },
      x, n, 20000);
  if (!res.converged) throw NumericalError("Lorentzian fit did not converge");
  LorentzianFit fit;
  fit.modes = unpack(res.x);
  for (auto& m : fit.modes) {
    if (!(m.kappa_n > 0.0)) throw NumericalError("Lorentzian fit produced a negative width");
    m.chi_n = std::abs(m.chi_n);
  }
  std::sort(fit.modes.begin(), fit.modes.end(),
            [](const CavityMode& a, const CavityMode& b) { return a.omega_n < b.omega_n; });
  fit.rms = res.rms;
  fit.evaluations = res.evaluations;
  return fit;
}

LorentzianFit fit_lorentzians(const std::vector<double>& omega, const std::vector<double>& j,
                              int n_modes) {
  if (omega.size() != j.size() || omega.size() < 3) throw DomainError("fit needs paired samples");
  std::vector<std::size_t> peaks;
  for (std::size_t i = 1; i + 1 < j.size(); ++i) {
    if (j[i] > j[i - 1] && j[i] >= j[i + 1]) peaks.push_back(i);
  }
  if (static_cast<int>(peaks.size()) < n_modes) throw NumericalError("fewer local maxima than requested modes");
  std::sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) { return j[a] > j[b]; });
  peaks.resize(static_cast<std::size_t>(n_modes));
  std::sort(peaks.begin(), peaks.end());
  std::vector<CavityMode> guess;
  for (std::size_t p : peaks) {
    const double half = 0.5 * j[p];
    std::size_t lo = p;
    while (lo > 0 && j[lo] > half) --lo;
    std::size_t hi = p;
    while (hi + 1 < j.size() && j[hi] > half) ++hi;
    double width = omega[hi] - omega[lo];
    if (!(width > 0.0)) width = 4.0 * (omega[1] - omega[0]);
    const double chi = std::sqrt(std::numbers::pi * width * j[p] / 2.0);
    guess.push_back({omega[p], width, 0.0, chi});
  }
  return fit_lorentzians(omega, j, guess);
}

// ---------------------------------------------------------------------------
// detection

double min_detectable_power(const DetectorSpec& d) {
  if (!(d.nep >= 0.0) || !(d.bandwidth_hz > 0.0)) throw DomainError("detector needs NEP >= 0 and bandwidth > 0");
  return d.nep * std::sqrt(d.bandwidth_hz);
}

EmitterCavity EmitterCavity::reference() {
  EmitterCavity e;
  e.gamma = units::from_thz(0.0005);
  e.kappa = units::from_thz(0.158);
  e.omega_c = units::from_thz(26.0);
  e.h = 0.2;
  e.kappa_rad_fraction = 1.0;
  e.chi_per_debye = units::from_thz(0.1) / 50.0;
  return e;
}

namespace {

struct Rates {
  double gp, gm, gz;
};

Rates dressed_rates(double gamma, double h) {
  const double theta = std::atan(h);
  const double s2 = std::sin(theta) * std::sin(theta);
  const double c2 = std::cos(theta) * std::cos(theta);
  return {gamma * c2 * c2, gamma * s2 * s2, gamma * c2 * s2};
}

void validate(const EmitterCavity& e) {
  if (!(e.gamma > 0.0 && e.kappa > 0.0 && e.omega_c > 0.0 && e.chi_per_debye > 0.0 && e.h > 0.0)) {
    throw DomainError("emitter-cavity parameters must be positive");
  }
}

}  // namespace

double emitted_power(const EmitterCavity& e, double d_ee_debye) {
  validate(e);
  const Rates r = dressed_rates(e.gamma, e.h);
  const double chi = d_ee_debye * e.chi_per_debye;
  const double C = 4.0 * chi * chi / (e.kappa * e.gamma);
  const double C_tilde = 4.0 * C / (e.h * e.h + 1.0 / (e.h * e.h));
  const double kt = r.gp + r.gm + 4.0 * r.gz + e.kappa;
  const double flux = e.kappa / kt * (r.gp / (1.0 + 1.0 / C_tilde - 4.0 * r.gz / kt));
  return units::kHbar * e.omega_c * kPerPicosecond * e.kappa_rad_fraction * flux * kPerPicosecond;
}

double plateau_power(const EmitterCavity& e) {
  validate(e);
  const Rates r = dressed_rates(e.gamma, e.h);
  const double flux = e.kappa * r.gp / (r.gp + r.gm + e.kappa);
  return units::kHbar * e.omega_c * kPerPicosecond * e.kappa_rad_fraction * flux * kPerPicosecond;
}

double min_dipole(const DetectorSpec& d, const EmitterCavity& e) {
  const double target = min_detectable_power(d);
  double lo = 1e-3;
  double hi = 1e4;
  if (emitted_power(e, hi) < target) {
    throw DomainError("detector cannot see this emitter: power plateau below the minimum detectable power");
  }
  if (emitted_power(e, lo) >= target) return lo;
  for (int i = 0; i < 200 && hi / lo > 1.0 + 1e-13; ++i) {
    const double mid = std::sqrt(lo * hi);
    (emitted_power(e, mid) >= target ? hi : lo) = mid;
  }
  return hi;
}

double thermal_occupation(double omega_c, double kelvin) { return units::bose_einstein(omega_c, kelvin); }

double beam_rabi(double watts, double waist_m, double d_eg_debye) {
  if (!(watts > 0.0 && waist_m > 0.0 && d_eg_debye > 0.0)) throw DomainError("beam parameters must be positive");
  const double field = std::sqrt(4.0 * units::kVacuumImpedance * watts / (std::numbers::pi * waist_m * waist_m));
  return field * d_eg_debye * units::kDebye / units::kHbar / kPerPicosecond;
}

double dipole_from_decay(double gamma, double omega0) {
  if (!(gamma > 0.0 && omega0 > 0.0)) throw DomainError("decay and frequency must be positive");
  const double g = gamma * kPerPicosecond;
  const double w = omega0 * kPerPicosecond;
  const double c = units::kSpeedOfLight;
  const double d2 = g * 3.0 * std::numbers::pi * units::kVacuumPermittivity * units::kHbar * c * c * c / (w * w * w);
  return std::sqrt(d2) / units::kDebye;
}

PowerConventions power_from_flux(double flux, double omega_c, double kappa_rad_fraction) {
  const double photon = units::kHbar * omega_c * kPerPicosecond;
  const double rate = kappa_rad_fraction * flux * kPerPicosecond;
  return {photon * rate, photon * rate / units::kTwoPi};
}

}  // namespace thz::feasibility
