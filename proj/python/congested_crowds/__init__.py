# Copyright 2026 the congested-crowds authors
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#     http://www.apache.org/licenses/LICENSE-2.0
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Crowd motion under the hard congestion constraint rho <= 1.

Thin wrapper over the C++ core: Wasserstein projection onto the congested
set, drift splitting against the congestion cone, donor-cell transport with
optional diffusion, and exact/entropic optimal transport distances.
"""

from ._core import (
    Grid,
    InputError,
    Scenario,
    SolveError,
    Trajectory,
    admissible_project,
    advect,
    diffuse,
    displacement_interpolate,
    estimate_lambda,
    l1_distance,
    load_scenario,
    parse_scenario,
    run,
    serialize_scenario,
    sinkhorn_w2,
    split_step,
    total_mass,
    w2_exact_1d,
    w2_squared,
    wasserstein_project,
)

__all__ = [
    "Grid",
    "InputError",
    "Scenario",
    "SolveError",
    "Trajectory",
    "admissible_project",
    "advect",
    "diffuse",
    "displacement_interpolate",
    "estimate_lambda",
    "l1_distance",
    "load_scenario",
    "parse_scenario",
    "run",
    "serialize_scenario",
    "sinkhorn_w2",
    "split_step",
    "total_mass",
    "w2_exact_1d",
    "w2_squared",
    "wasserstein_project",
]

__version__ = "0.1.0"
