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
#include <string>
#include <vector>

#include "crowd/config.hpp"
#include "crowd/dynamics.hpp"
#include "crowd/fields.hpp"

namespace crowd {

/// Largest sampled one-sided Lipschitz quotient
///   (u(x) - u(y)) . (x - y) / |x - y|^2
/// over random cell-center pairs. Deterministic in the seed. Exact for affine
/// fields; an under-estimate in general.
double estimateLambda(const VelocityField& u, int sampleCount, std::uint64_t seed);

struct ContractionPoint {
  double time = 0.0;
  double distance = 0.0;
  double bound = 0.0;
  double slack = 0.0;  // distance / bound - 1
};

struct ContractionReport {
  std::vector<ContractionPoint> points;
  double lambda = 0.0;        // W2 mode only
  std::string lambdaSource;   // "analytic", "estimated" or "user"
  double initialDistance = 0.0;
  double maxSlack = 0.0;
  double slackTolerance = 0.0;
  bool pass = false;
};

/// Frame-by-frame check of W2(t) <= exp(lambda t) W2(0) within the configured
/// slack. Trajectories must share the grid and frame times.
ContractionReport w2ContractionReport(const Trajectory& a, const Trajectory& b, double lambda,
                                      const std::string& lambdaSource,
                                      const SolverConfig& cfg = SolverConfig::defaults());

/// Frame-by-frame check of |rho1(t) - rho2(t)|_1 <= |rho1(0) - rho2(0)|_1
/// within the configured slack.
ContractionReport l1ContractionReport(const Trajectory& a, const Trajectory& b,
                                      const SolverConfig& cfg = SolverConfig::defaults());

/// int grad(phi) . grad(p) drho0, where phi is the transport potential from
/// rho0 to a feasible rho1 (grad phi = x - T(x)) and p is admissible for
/// rho0. Nonnegative in the limit; discretely it may dip below zero by O(h).
double transportPressureAlignment(const DensityField& rho0, const DensityField& rho1,
                                  const PressureField& p,
                                  const SolverConfig& cfg = SolverConfig::defaults());

struct GeodesicDerivativeCheck {
  double oneSided = 0.0;    // Richardson-extrapolated d/dt at 0+ of int p dmu_t
  double predicted = 0.0;   // -int grad(phi) . grad(p) drho0
  double gap = 0.0;         // |oneSided - predicted|
};

/// Compares the one-sided derivative of t -> int p dmu_t along the
/// displacement interpolation against its closed form at t = 0.
GeodesicDerivativeCheck geodesicDerivativeCheck(const DensityField& rho0, const DensityField& rho1,
                                                const PressureField& p,
                                                const SolverConfig& cfg = SolverConfig::defaults());

}  // namespace crowd
