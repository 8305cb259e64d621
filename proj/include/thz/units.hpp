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

#include <numbers>

// Simulation units: angular frequencies and rates in rad/ps, times in ps.
// Config files and outputs use nu = omega / 2pi in THz.
namespace thz::units {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double from_thz(double nu_thz) { return kTwoPi * nu_thz; }
constexpr double to_thz(double omega) { return omega / kTwoPi; }

inline constexpr double kPerPicosecond = 1e12;  // rad/ps -> rad/s

// SI constants (CODATA 2018).
inline constexpr double kHbar = 1.054571817e-34;       // J s
inline constexpr double kBoltzmann = 1.380649e-23;     // J / K
inline constexpr double kDebye = 3.33564e-30;          // C m
inline constexpr double kVacuumImpedance = 376.730313668;  // Ohm
inline constexpr double kVacuumPermittivity = 8.8541878128e-12;  // F / m
inline constexpr double kSpeedOfLight = 299792458.0;    // m / s

/// Bose-Einstein occupation of a mode at angular frequency `omega` (rad/ps)
/// and temperature `kelvin`; zero at T = 0.
double bose_einstein(double omega, double kelvin);

}  // namespace thz::units
