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

namespace crowd {

/// When to evaluate the per-step transport-distance diagnostic during a run.
/// It needs an exact transport solve, so "all" can dominate the runtime.
enum class StepDistanceCheck : std::uint8_t { off, frames, all };

/// Every tolerance and solver knob in one place. Call sites take a
/// SolverConfig (usually defaults()) instead of hard-coding constants, so a
/// single edit retunes the whole pipeline.
struct SolverConfig {
  // Feasibility and conservation.
  double constraintTolerance = 1e-6;    // density may not exceed 1 + this
  double massTolerance = 1e-10;         // |mass - 1| after construction
  double massDriftTolerance = 1e-8;     // cumulative over a trajectory
  double saturationThreshold = 1e-6;    // saturated means rho >= 1 - this

  // Transport solves.
  double dualityGapFactor = 1e-8;       // gap <= factor * (1 + cost)
  double planMarginalTolerance = 1e-9;  // row/column sums vs marginals
  long long lpCellProductCap = 4'000'000;  // max source*target cells for exact LP
  double sinkhornEpsilonFactor = 1e-4;  // epsilon = factor * diam(domain)^2
  // Shared across the epsilon-scaling levels; the last level dominates, where
  // contraction slows as exp(-eps / max cost). Sized for the factor above.
  int sinkhornMaxIterations = 200000;
  // A marginal residual r perturbs the entropic cost by at most r * max cost,
  // far below the blur bias at the epsilon above; 1e-6 is both reliably
  // reachable at small epsilon and immaterial for the reported distance.
  double sinkhornMarginalTolerance = 1e-6;

  // Cone projection (bound-constrained least squares).
  double coneGradientFactor = 1e-8;     // stop when KKT residual <= this * (1 + |u|)
  int coneMaxIterations = 50000;
  double orthogonalityTolerance = 1e-8;
  double complementarityTolerance = 1e-8;

  // Set-valued checks on projections.
  double idempotenceTolerance = 1e-8;
  double monotonicityTolerance = 1e-8;
  double l1ContractionTolerance = 1e-8;

  // Time stepping.
  double cflNumber = 0.9;
  double linearSolverTolerance = 1e-12;

  // Contraction verdicts.
  double w2SlackFraction = 0.10;        // W2(t) <= bound * (1 + slack)
  double l1SlackFraction = 0.05;

  StepDistanceCheck stepDistanceCheck = StepDistanceCheck::frames;

  bool operator==(const SolverConfig&) const = default;

  static const SolverConfig& defaults();
};

}  // namespace crowd
