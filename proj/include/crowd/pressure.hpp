/*
Copyright 2026 the congested-crowds authors
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at
    http://www.apache.org/licenses/LICENSE-2.0
Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#pragma once

#include <cstdint>
#include <vector>

#include "crowd/config.hpp"
#include "crowd/fields.hpp"

namespace crowd {

/// Decomposition u = Gp + v of a drift against the congestion cone of a
/// density: p solves min_p 1/2 |u - Gp|^2 over {p >= 0 on the saturated set,
/// p = 0 elsewhere}, by projected gradient with Barzilai-Borwein steps.
/// At the optimum <Gp, v> = 0 and <Gq, v> <= 0 for every admissible q; both
/// are reported as residuals instead of assumed.
struct ConeProjectionResult {
  PressureField pressure;
  VelocityField corrected;            // v = u - G(pressure)
  double kktResidual = 0.0;           // volume-weighted projected-gradient norm
  double orthogonalityResidual = 0.0; // <Gp, v>, volume-weighted
  double complementarityResidual = 0.0;
  bool converged = false;
  int iterations = 0;
};

ConeProjectionResult admissibleProject(const DensityField& rho, const VelocityField& u,
                                       const SolverConfig& cfg = SolverConfig::defaults());

/// |u|^2 = |Gp|^2 + |v|^2 for the optimal splitting. pythagorasResidual and
/// orthogonality are the same identity up to a factor two; both are reported
/// in absolute volume-weighted form.
struct EnergySplit {
  double uNormSquared = 0.0;
  double gradPNormSquared = 0.0;
  double vNormSquared = 0.0;
  double pythagorasResidual = 0.0;
  double orthogonality = 0.0;
};

EnergySplit energyCheck(const VelocityField& u, const ConeProjectionResult& r);

/// Deterministic admissible test pressures for the cone inequality: the
/// saturated-set indicator plus randomized fields supported there, with a few
/// in-set smoothing passes of varying strength. All nonnegative, max 1.
std::vector<PressureField> samplePressureTestFunctions(const DensityField& rho, int count,
                                                       std::uint64_t seed,
                                                       const SolverConfig& cfg = SolverConfig::defaults());

/// <Gq, v> in the volume-weighted inner product; the cone inequality says
/// this is <= 0 (up to tolerance) for admissible q at the optimal v.
double coneInnerProduct(const PressureField& q, const VelocityField& v);

}  // namespace crowd
