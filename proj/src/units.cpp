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

#include "thz/units.hpp"

#include <cmath>
#include <limits>

#include "thz/error.hpp"

namespace thz::units {

double bose_einstein(double omega, double kelvin) {
  if (!(kelvin >= 0.0)) throw DomainError("temperature must be non-negative");
  if (kelvin == 0.0 || omega <= 0.0) return 0.0;
  const double x = kHbar * omega * kPerPicosecond / (kBoltzmann * kelvin);
  if (x > 700.0) return std::exp(-x);
  return 1.0 / std::expm1(x);
}

}  // namespace thz::units
