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

#include "thz/analytic.hpp"

#include <cmath>

#include "thz/error.hpp"

namespace thz::analytic {

DerivedRates derived_rates(const SystemParams& p, const DressedFrame& f) {
  DerivedRates r;
  r.C = 4.0 * p.chi * p.chi / (p.kappa * p.gamma);
  r.C_tilde = 4.0 * r.C / (f.h * f.h + 1.0 / (f.h * f.h));
  r.kappa_tilde = f.gamma_plus + f.gamma_minus + 4.0 * f.gamma_z + p.kappa;
  r.tau_c = correlation_timescale(p, f);
  return r;
}

double cavity_population(const SystemParams& p, const DressedFrame& f) {
  const double kt = f.gamma_plus + f.gamma_minus + 4.0 * f.gamma_z + p.kappa;
  const double g2 = 16.0 * f.c * f.c * f.s * f.s * p.chi * p.chi;
  const double det = p.omega_c - f.omega_R;
  const double gsum = f.gamma_plus + f.gamma_minus;
  return g2 * f.gamma_plus * kt /
         (g2 * (gsum + p.kappa) * kt + p.kappa * gsum * (4.0 * det * det + kt * kt));
}

double flux_lorentzian(const SystemParams& p, const DressedFrame& f) {
  return p.kappa * cavity_population(p, f);
}

double flux_resonant(const SystemParams& p, const DressedFrame& f) {
  const DerivedRates r = derived_rates(p, f);
  return p.kappa / r.kappa_tilde *
         (f.gamma_plus / (1.0 + 1.0 / r.C_tilde - 4.0 * f.gamma_z / r.kappa_tilde));
}

double dressed_population(const SystemParams& p, const DressedFrame& f) {
  const double g2 = 16.0 * f.c * f.c * f.s * f.s * p.chi * p.chi;
  const double gsum = f.gamma_plus + f.gamma_minus;
  const double kt = gsum + 4.0 * f.gamma_z + p.kappa;
  return f.gamma_plus * (g2 + p.kappa * kt) / (g2 * (gsum + p.kappa) + p.kappa * gsum * kt);
}

double dressed_population_simplified(const SystemParams& p, const DressedFrame& f) {
  const DerivedRates r = derived_rates(p, f);
  return 1.0 / (1.0 + std::pow(f.h, 4)) / (1.0 + r.C_tilde);
}

FluxOptimum max_flux_over_kappa(const SystemParams& p, const DressedFrame& f) {
  const double cs = f.c * f.s;
  const double gsum = f.gamma_plus + f.gamma_minus;
  const double root = 4.0 * cs * p.chi + gsum;
  FluxOptimum out;
  out.kappa_opt = 4.0 * cs * p.chi;
  out.flux_max = 16.0 * cs * cs * p.chi * p.chi * f.gamma_plus /
                 (root * root + 4.0 * gsum * f.gamma_z);
  return out;
}

double g2_truncated(const SystemParams& p, const DressedFrame& f) {
  const double gp = f.gamma_plus;
  const double k = p.kappa;
  const double c2s2 = f.c * f.c * f.s * f.s;
  const double x2 = p.chi * p.chi;
  const double num =
      2.0 * (gp + 2.0 * k) *
      (gp * k * k * (gp + k) * (gp + k) * (gp + 2.0 * k) * (gp + 3.0 * k) +
       256.0 * c2s2 * c2s2 * x2 * x2 *
           (gp * gp * gp + 4.0 * gp * gp * k + 12.0 * gp * k * k + 6.0 * k * k * k) +
       16.0 * c2s2 * x2 * k *
           (std::pow(gp, 4) + 5.0 * std::pow(gp, 3) * k + 17.0 * gp * gp * k * k +
            23.0 * gp * std::pow(k, 3) + 6.0 * std::pow(k, 4)));
  const double den_root = k * (gp + k) * (gp + 2.0 * k) * (gp + 3.0 * k) +
                          32.0 * c2s2 * x2 * (gp * gp + 3.0 * gp * k + 3.0 * k * k);
  return num / (den_root * den_root);
}

double lambda_n(const SystemParams& p, const DressedFrame& f, int n) {
  const double c = f.c;
  const double s = f.s;
  const double d = s * s - c * c;
  if (n == 2) return p.chi * p.chi / p.omega_c * (c * s * d);
  if (n == 3) {
    return std::pow(p.chi, 3) / (p.omega_c * p.omega_c) *
           (std::pow(c, 3) * std::pow(s, 3) - 2.0 * c * s * d * d);
  }
  throw DomainError("lambda_n is defined for n = 2 or 3");
}

double correlation_timescale(const SystemParams& p, const DressedFrame& f) {
  const double C = 4.0 * p.chi * p.chi / (p.kappa * p.gamma);
  const double C_tilde = 4.0 * C / (f.h * f.h + 1.0 / (f.h * f.h));
  return 1.0 / ((f.gamma_plus + f.gamma_minus) * (1.0 + C_tilde));
}

}  // namespace thz::analytic
