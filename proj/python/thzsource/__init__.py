# Copyright 2026 The thzsource Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Dressed-emitter THz cavity simulations."""

from ._core import (
    CavityDissipator,
    ConfigError,
    DomainError,
    EmitterDissipator,
    HamiltonianForm,
    ModelVariant,
    NumericalError,
    OutputOperator,
    SystemParams,
    UndefinedObservable,
    __version__,
    analytic,
    dress,
    feasibility,
    filtered_g2,
    flux_and_g2,
    from_thz,
    preset_names,
    reference_params,
    run_preset,
    run_sweep,
    spectrum_direct,
    to_thz,
)

__all__ = [name for name in dir() if not name.startswith("_")]
