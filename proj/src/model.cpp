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

#include "thz/model.hpp"

#include <cmath>
#include <string>

#include "thz/error.hpp"
#include "thz/units.hpp"

namespace thz {

void SystemParams::validate() const {
  auto non_negative = [](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw DomainError(std::string(name) + " must be finite and non-negative");
  };
  non_negative(chi, "chi");
  non_negative(kappa, "kappa");
  non_negative(gamma, "gamma");
  non_negative(omega_c, "omega_c");
  non_negative(omega_drive, "omega");
  non_negative(temperature, "temperature");
  if (!std::isfinite(delta)) throw DomainError("delta must be finite");
  if (n_max < 1) throw DomainError("n_max must be at least 1");
  if (!(kappa_rad_fraction >= 0.0 && kappa_rad_fraction <= 1.0)) {
    throw DomainError("kappa_rad_fraction must lie in [0, 1]");
  }
}

SystemParams SystemParams::from_thz(double chi, double kappa, double gamma, double omega_c,
                                    double omega_drive, double delta, double temperature,
                                    int n_max) {
  SystemParams p;
  p.chi = units::from_thz(chi);
  p.kappa = units::from_thz(kappa);
  p.gamma = units::from_thz(gamma);
  p.omega_c = units::from_thz(omega_c);
  p.omega_drive = units::from_thz(omega_drive);
  p.delta = units::from_thz(delta);
  p.temperature = temperature;
  p.n_max = n_max;
  p.validate();
  return p;
}

double SystemParams::omega_rabi() const { return std::hypot(delta, omega_drive); }

SystemParams SystemParams::with_rabi_fixed_drive(double omega_rabi) const {
  if (!(omega_rabi >= omega_drive)) {
    throw DomainError("Rabi frequency below the drive amplitude is unreachable at fixed drive");
  }
  SystemParams p = *this;
  p.delta = std::sqrt(omega_rabi * omega_rabi - omega_drive * omega_drive);
  return p;
}

SystemParams SystemParams::with_rabi_fixed_detuning(double omega_rabi) const {
  if (!(omega_rabi >= std::abs(delta))) {
    throw DomainError("Rabi frequency below |delta| is unreachable at fixed detuning");
  }
  SystemParams p = *this;
  p.omega_drive = std::sqrt(omega_rabi * omega_rabi - delta * delta);
  return p;
}

SystemParams reference_params() {
  SystemParams p = SystemParams::from_thz(0.05, 0.158, 0.0005, 26.0, 10.0, 0.0);
  return p.with_rabi_fixed_drive(p.omega_c);
}

DressedFrame dress(double omega_drive, double delta, double gamma) {
  if (!(omega_drive >= 0.0)) throw DomainError("drive amplitude must be non-negative");
  DressedFrame f;
  f.omega_R = std::hypot(delta, omega_drive);
  if (omega_drive == 0.0) {
    if (!(delta > 0.0)) throw DomainError("dressing undefined for zero drive and delta <= 0");
    f.h = 0.0;
  } else if (delta > 0.0) {
    f.h = omega_drive / (f.omega_R + delta);  // same as (omega_R - delta) / omega, no cancellation
  } else {
    f.h = (f.omega_R - delta) / omega_drive;
  }
  f.theta = std::atan(f.h);
  f.s = std::sin(f.theta);
  f.c = std::cos(f.theta);
  const double s2 = f.s * f.s;
  const double c2 = f.c * f.c;
  f.gamma_plus = gamma * c2 * c2;
  f.gamma_minus = gamma * s2 * s2;
  f.gamma_z = gamma * c2 * s2;
  return f;
}

DressedFrame dress(const SystemParams& p) { return dress(p.omega_drive, p.delta, p.gamma); }

ModelVariant ModelVariant::normalized() const {
  ModelVariant v = *this;
  if (v.hamiltonian == HamiltonianForm::JaynesCummings) {
    v.output = OutputOperator::A;
    v.dissipator = CavityDissipator::StandardA;
  }
  return v;
}

SpaceLayout model_layout(int n_max) {
  if (n_max < 1) throw DomainError("n_max must be at least 1");
  return SpaceLayout({{kTls, 2}, {kCavity, n_max + 1}});
}

Operator build_hamiltonian(const SystemParams& p, const DressedFrame& frame,
                           const ModelVariant& variant) {
  p.validate();
  const SpaceLayout layout = model_layout(p.n_max);
  const Operator a = embed(local::destroy(p.n_max + 1), kCavity, layout);
  const Operator ad = a.adjoint();
  const Operator zp = embed(local::raising(), kTls, layout);
  const Operator zm = embed(local::lowering(), kTls, layout);
  const Operator zz = embed(local::pauli_z(), kTls, layout);
  const Operator id = Operator::identity(layout);
  const double cs = frame.c * frame.s;
  const double s2mc2 = frame.s * frame.s - frame.c * frame.c;

  Operator h = cplx(0.5 * frame.omega_R) * zz + cplx(p.omega_c) * (ad * a) -
               cplx(2.0 * cs * p.chi) * (a * zp + ad * zm);
  if (variant.hamiltonian == HamiltonianForm::FullDressed) {
    h -= cplx(2.0 * cs * p.chi) * (a * zm + ad * zp);
    h += cplx(p.chi) * ((a + ad) * (id + cplx(s2mc2) * zz));
  }
  return h;
}

Operator build_x_plus(const Operator& hamiltonian, const Operator& quadrature, double omega_c) {
  if (!(omega_c > 0.0)) throw DomainError("build_x_plus needs a positive cavity frequency");
  const EigenSystem es = eig_hermitian(hamiltonian);
  const DenseMatrix& v = es.vectors;
  const DenseMatrix q = v.adjoint() * quadrature.dense() * v;
  const Index n = q.rows();
  DenseMatrix w = DenseMatrix::Zero(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index k = j + 1; k < n; ++k) {
      const double omega_kj = es.values(k) - es.values(j);
      if (omega_kj <= 1e-9 * omega_c) continue;
      w(j, k) = std::sqrt(omega_kj / omega_c) * q(j, k);
    }
  }
  return Operator(hamiltonian.layout(), DenseMatrix(v * w * v.adjoint()));
}

DenseMatrix dressed_sigma_minus(const DressedFrame& f) {
  return f.c * f.s * local::pauli_z() + f.s * f.s * local::lowering() - f.c * f.c * local::raising();
}

ModelParts assemble_model(const SystemParams& p, const DressedFrame& frame,
                          const ModelVariant& requested) {
  const ModelVariant variant = requested.normalized();
  ModelParts parts;
  parts.layout = model_layout(p.n_max);
  parts.hamiltonian = build_hamiltonian(p, frame, variant);
  parts.a = embed(local::destroy(p.n_max + 1), kCavity, parts.layout);
  parts.x_plus = build_x_plus(parts.hamiltonian, parts.a + parts.a.adjoint(), p.omega_c);
  parts.output = variant.output == OutputOperator::XPlus ? parts.x_plus : parts.a;
  parts.cavity_jump = variant.dissipator == CavityDissipator::DressedX ? parts.x_plus : parts.a;
  parts.sigma_minus = embed(dressed_sigma_minus(frame), kTls, parts.layout);
  parts.n_thermal = variant.thermal ? units::bose_einstein(p.omega_c, p.temperature) : 0.0;

  if (variant.emitter == EmitterDissipator::SigmaMinus) {
    parts.collapse.push_back({p.gamma, parts.sigma_minus});
  } else {
    parts.collapse.push_back({frame.gamma_minus, embed(local::lowering(), kTls, parts.layout)});
    parts.collapse.push_back({frame.gamma_plus, embed(local::raising(), kTls, parts.layout)});
    parts.collapse.push_back({frame.gamma_z, embed(local::pauli_z(), kTls, parts.layout)});
  }
  parts.collapse.push_back({p.kappa * (1.0 + parts.n_thermal), parts.cavity_jump});
  if (parts.n_thermal > 0.0) {
    parts.collapse.push_back({p.kappa * parts.n_thermal, parts.cavity_jump.adjoint()});
  }
  return parts;
}

Liouvillian build_liouvillian(const SystemParams& p, const DressedFrame& frame,
                              const ModelVariant& variant) {
  ModelParts parts = assemble_model(p, frame, variant);
  return {lindblad_super(parts.hamiltonian, parts.collapse), parts.output};
}

}  // namespace thz
