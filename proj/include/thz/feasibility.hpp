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
#include <string>
#include <vector>

// Experimental-feasibility estimates. Inputs and outputs at this boundary are
// SI (W, Hz, K, m, Debye) except where an angular frequency in rad/ps is
// explicitly requested.
namespace thz::feasibility {

struct LorentzMedium {
  double eps_inf = 0.0;
  double omega_TO = 0.0;
  double omega_LO = 0.0;
  double gamma_abs = 0.0;

  void validate() const;
  /// Fitted SiC phonon-polariton response.
  static LorentzMedium silicon_carbide();
};

std::complex<double> permittivity(const LorentzMedium& m, double omega);

struct CavityMode {
  double omega_n = 0.0;
  double kappa_n = 0.0;
  double kappa_rad_n = 0.0;  // 0 when unknown (fits)
  double chi_n = 0.0;
};

/// Reads a mode table with columns mode, omega_thz, kappa_thz, kappa_rad_thz,
/// chi_thz; '#' lines are comments.
std::vector<CavityMode> load_modes_csv(const std::string& path);
/// Path of the shipped dimer mode table (THZSOURCE_DATA_DIR overrides).
std::string default_modes_path();
std::vector<CavityMode> dimer_modes();

double spectral_density(const std::vector<CavityMode>& modes, double omega);

struct LorentzianFit {
  std::vector<CavityMode> modes;  // ascending omega_n
  double rms = 0.0;
  int evaluations = 0;
};

/// Least-squares fit of `n_modes` Lorentzians; initial guesses come from the
/// n_modes largest local maxima of the samples.
LorentzianFit fit_lorentzians(const std::vector<double>& omega, const std::vector<double>& j,
                              int n_modes);
/// Same, starting from caller-supplied guesses.
LorentzianFit fit_lorentzians(const std::vector<double>& omega, const std::vector<double>& j,
                              const std::vector<CavityMode>& guess);

struct DetectorSpec {
  double nep = 0.0;           // W / sqrt(Hz)
  double bandwidth_hz = 0.0;  // ordinary frequency
};

double min_detectable_power(const DetectorSpec& d);

struct EmitterCavity {
  double gamma = 0.0;    // rad/ps
  double kappa = 0.0;    // rad/ps
  double omega_c = 0.0;  // rad/ps
  double h = 0.2;
  double kappa_rad_fraction = 1.0;
  /// chi per Debye of permanent dipole, rad/ps: 2pi 0.1 THz per 50 D.
  double chi_per_debye = 0.0;

  static EmitterCavity reference();
};

/// Resonant output power in W for a permanent dipole |d_ee| in Debye.
double emitted_power(const EmitterCavity& e, double d_ee_debye);
/// Power plateau hbar omega_c kappa_rad/kappa gamma_+ reached for large dipoles.
double plateau_power(const EmitterCavity& e);

/// Smallest |d_ee| in [1e-3, 1e4] D whose power reaches P_min.
double min_dipole(const DetectorSpec& d, const EmitterCavity& e);

double thermal_occupation(double omega_c, double kelvin);

/// Rabi angular frequency (rad/ps) of a Gaussian beam with power `watts`,
/// waist `waist_m` on a transition dipole `d_eg_debye`.
double beam_rabi(double watts, double waist_m, double d_eg_debye);

/// Transition dipole (Debye) giving spontaneous decay `gamma` (rad/ps) at
/// optical frequency `omega0` (rad/ps).
double dipole_from_decay(double gamma, double omega0);

struct PowerConventions {
  double si = 0.0;             // hbar omega_c [rad/s] x photon rate [1/s]
  double caption_units = 0.0;  // hbar omega_c [rad/s] x (flux / 2pi) [1/s]
};
/// Emitted power for a flux kappa <X-X+> (rad/ps) with radiative fraction.
PowerConventions power_from_flux(double flux, double omega_c, double kappa_rad_fraction);

}  // namespace thz::feasibility
