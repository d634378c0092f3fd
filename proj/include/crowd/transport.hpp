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

#include <array>
#include <vector>

#include "crowd/config.hpp"
#include "crowd/fields.hpp"
#include "crowd/grid.hpp"
#include "crowd/network_simplex.hpp"

namespace crowd {

/// Coupling between two densities on the same grid, as sparse (source cell,
/// target cell, mass) triples with squared-distance cost.
struct TransportPlan {
  Grid grid;
  std::vector<TransportEntry> entries;
  double cost = 0.0;              // sum of mass * |x_i - y_j|^2
  double rowResidual = 0.0;       // max_i |sum_j flow - mass_i|
  double colResidual = 0.0;

  TransportPlan(Grid g) : grid(g) {}
};

/// Kantorovich potentials for the cost |x-y|^2/2: phi(x) + psi(y) <= |x-y|^2/2
/// on all cell-center pairs (up to maxFeasibilityViolation), with equality on
/// the plan support. Values on cells outside the marginals' supports are
/// filled by c-transform.
struct PotentialPair {
  std::vector<double> phi;
  std::vector<double> psi;
  double dualValue = 0.0;               // 2 * (int phi drho1 + int psi drho2)
  double maxFeasibilityViolation = 0.0; // max over pairs of phi+psi - c/2
};

struct LpTransportResult {
  TransportPlan plan;
  PotentialPair potentials;
  double cost = 0.0;          // squared 2-Wasserstein distance
  double dualityGap = 0.0;    // cost - dualValue, >= -eps and <= tol*(1+cost)
  double minReducedCost = 0.0;
};

/// Exact squared W2 between densities on a shared grid by dense network
/// simplex over the support cells. Throws when support(a) * support(b)
/// exceeds cfg.lpCellProductCap.
LpTransportResult lpTransport(const DensityField& a, const DensityField& b,
                              const SolverConfig& cfg = SolverConfig::defaults());

/// Exact 1D W2 (the distance, not its square) by monotone two-pointer
/// rearrangement of cell masses; matches lpTransport to rounding error.
double w2Exact1d(const DensityField& a, const DensityField& b);

/// Cost-only exact squared W2: the 1D rearrangement when possible, otherwise
/// the LP without the potential post-processing. Cheap enough for per-frame
/// diagnostics.
double w2SquaredExact(const DensityField& a, const DensityField& b,
                      const SolverConfig& cfg = SolverConfig::defaults());

/// Entropic approximation of squared W2 (log-domain, epsilon-scaling warm
/// start). epsilon <= 0 selects cfg.sinkhornEpsilonFactor * diameter^2. The
/// value is biased upward by O(epsilon).
double sinkhornW2(const DensityField& a, const DensityField& b, double epsilon = 0.0,
                  const SolverConfig& cfg = SolverConfig::defaults());

/// Barycentric transport map sampled at source cell centers; defined[i] == 0
/// on cells carrying no source mass.
struct BarycentricMap {
  Grid grid;
  std::array<std::vector<double>, 2> point;
  std::vector<char> defined;

  BarycentricMap(Grid g) : grid(g) {}
  /// Displacement T(x_i) - x_i, zero on undefined cells.
  std::array<double, 2> displacement(int idx) const;
};

BarycentricMap optimalMap(const TransportPlan& plan);

/// Displacement interpolation mu_t = ((1-t) id + t T)# mu via mass splatting
/// with tent (cloud-in-cell) weights clamped at the walls. t in [0,1];
/// endpoints reproduce the marginals up to splatting of coincident centers.
DensityField displacementInterpolate(const TransportPlan& plan, double t);

/// Projection onto {eta <= 1} in the 2-Wasserstein metric, posed as a
/// capacity-constrained min-cost flow: sources are the input cell masses,
/// every cell is a sink of capacity cellVolume, and zero-cost slack sources
/// absorb the unfilled capacity.
struct ProjectionResult {
  std::vector<double> values;
  double transportCost = 0.0;   // squared distance between input and output
  double minReducedCost = 0.0;  // dual certificate over all pairs
  bool usedFastPath = false;    // input was already feasible
};

/// Raw-values variant for subprobability inputs (total mass <= volume); used
/// directly by the monotonicity checks.
ProjectionResult projectDensityValues(const Grid& grid, const std::vector<double>& values,
                                      const SolverConfig& cfg = SolverConfig::defaults());

DensityField wassersteinProject(const DensityField& rho,
                                const SolverConfig& cfg = SolverConfig::defaults(),
                                ProjectionResult* info = nullptr);

}  // namespace crowd
