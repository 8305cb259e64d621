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

#include <vector>

#include "thz/qops.hpp"

// Driven polar emitter in the dressed frame coupled to a single THz cavity
// mode. All frequencies are angular, in rad/ps.
namespace thz {

struct SystemParams {
  double chi = 0.0;          // permanent-dipole coupling
  double kappa = 0.0;        // cavity loss
  double gamma = 0.0;        // emitter spontaneous decay
  double omega_c = 0.0;      // cavity frequency
  double omega_drive = 0.0;  // laser Rabi amplitude
  double delta = 0.0;        // laser detuning
  double temperature = 0.0;  // kelvin, cavity bath only
  int n_max = 4;             // cavity Fock cutoff
  double kappa_rad_fraction = 1.0;

  void validate() const;

  /// Builds params from nu = omega / 2pi in THz.
  static SystemParams from_thz(double chi, double kappa, double gamma, double omega_c,
                               double omega_drive, double delta, double temperature = 0.0,
                               int n_max = 4);

  /// Generalized Rabi frequency sqrt(delta^2 + omega_drive^2).
  double omega_rabi() const;

  /// Sets omega_rabi while holding the drive amplitude (delta >= 0 branch).
  SystemParams with_rabi_fixed_drive(double omega_rabi) const;
  /// Sets omega_rabi while holding the detuning.
  SystemParams with_rabi_fixed_detuning(double omega_rabi) const;
};

/// The reference operating point {chi, kappa, gamma, omega_c}/2pi =
/// {0.05, 0.158, 0.0005, 26} THz with omega_drive/2pi = 10 THz and the cavity
/// on resonance with the dressed doublet.
SystemParams reference_params();

struct DressedFrame {
  double omega_R = 0.0;
  double h = 0.0;
  double theta = 0.0;
  double s = 0.0;
  double c = 0.0;
  double gamma_plus = 0.0;
  double gamma_minus = 0.0;
  double gamma_z = 0.0;
};

DressedFrame dress(double omega_drive, double delta, double gamma);
DressedFrame dress(const SystemParams& p);

enum class CavityDissipator { StandardA, DressedX };
enum class OutputOperator { A, XPlus };
enum class HamiltonianForm { FullDressed, JaynesCummings };
enum class EmitterDissipator { SigmaMinus, DressedRates };

struct ModelVariant {
  CavityDissipator dissipator = CavityDissipator::DressedX;
  OutputOperator output = OutputOperator::XPlus;
  HamiltonianForm hamiltonian = HamiltonianForm::FullDressed;
  EmitterDissipator emitter = EmitterDissipator::SigmaMinus;
  bool thermal = false;

  /// The Jaynes-Cummings form has no counter-rotating structure, so the
  /// cavity jump and output operators both reduce to a.
  ModelVariant normalized() const;

  friend bool operator==(const ModelVariant&, const ModelVariant&) = default;
};

inline constexpr const char* kTls = "tls";
inline constexpr const char* kCavity = "cav";

SpaceLayout model_layout(int n_max);

Operator build_hamiltonian(const SystemParams& p, const DressedFrame& frame,
                           const ModelVariant& variant);

/// Positive-frequency part of `quadrature` in the eigenbasis of `hamiltonian`,
/// each transition weighted by sqrt(omega_kj / omega_c).
Operator build_x_plus(const Operator& hamiltonian, const Operator& quadrature, double omega_c);

/// Emitter lowering operator written in the dressed basis.
DenseMatrix dressed_sigma_minus(const DressedFrame& frame);

struct ModelParts {
  SpaceLayout layout;
  Operator hamiltonian;
  Operator a;
  Operator x_plus;
  Operator output;      // operator entering flux and correlations
  Operator cavity_jump;
  Operator sigma_minus;
  std::vector<CollapseTerm> collapse;
  double n_thermal = 0.0;
};

ModelParts assemble_model(const SystemParams& p, const DressedFrame& frame,
                          const ModelVariant& variant);

struct Liouvillian {
  SuperOp L;
  Operator output;
};

Liouvillian build_liouvillian(const SystemParams& p, const DressedFrame& frame,
                              const ModelVariant& variant);

}  // namespace thz
