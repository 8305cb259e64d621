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

#include "thz/model.hpp"

// Closed-form results of the one- and two-excitation Jaynes-Cummings
// truncations of the dressed model.
namespace thz::analytic {

struct DerivedRates {
  double C = 0.0;            // 4 chi^2 / (kappa gamma)
  double C_tilde = 0.0;      // 4 C / (h^2 + h^-2)
  double kappa_tilde = 0.0;  // gamma_+ + gamma_- + 4 gamma_z + kappa
  double tau_c = 0.0;        // ps
};

DerivedRates derived_rates(const SystemParams& p, const DressedFrame& f);

/// Cavity population of the one-excitation model as a function of the
/// cavity-doublet detuning omega_c - omega_R.
double cavity_population(const SystemParams& p, const DressedFrame& f);
/// kappa * cavity_population.
double flux_lorentzian(const SystemParams& p, const DressedFrame& f);
/// Resonant flux in terms of the effective cooperativity.
double flux_resonant(const SystemParams& p, const DressedFrame& f);

/// Dressed-emitter population <zeta_+ zeta_-> at resonance.
double dressed_population(const SystemParams& p, const DressedFrame& f);
/// gamma << kappa limit: 1 / (1 + h^4) / (1 + C_tilde).
double dressed_population_simplified(const SystemParams& p, const DressedFrame& f);

struct FluxOptimum {
  double kappa_opt = 0.0;
  double flux_max = 0.0;
};
FluxOptimum max_flux_over_kappa(const SystemParams& p, const DressedFrame& f);

/// Zero-delay g2 of the two-excitation model with gamma_- = gamma_z = 0.
double g2_truncated(const SystemParams& p, const DressedFrame& f);

/// Effective n-photon coupling, n = 2 or 3.
double lambda_n(const SystemParams& p, const DressedFrame& f, int n);

/// 1 / [(gamma_+ + gamma_-)(1 + C_tilde)].
double correlation_timescale(const SystemParams& p, const DressedFrame& f);

}  // namespace thz::analytic
