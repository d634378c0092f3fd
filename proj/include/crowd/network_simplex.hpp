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

#include <vector>

namespace crowd {

struct TransportEntry {
  int i;
  int j;
  double flow;
};

/// Primal-dual solution of a balanced dense transportation problem.
/// Optimality certificate: cost(i,j) - potentialSource[i] - potentialTarget[j]
/// >= minReducedCost on every pair, with minReducedCost >= -O(1e-12 * scale),
/// and complementary slackness holds exactly on the plan support.
struct TransportSolution {
  double cost = 0.0;
  std::vector<TransportEntry> plan;
  std::vector<double> potentialSource;
  std::vector<double> potentialTarget;
  double minReducedCost = 0.0;
  long long pivots = 0;
};

/// Network simplex on the complete bipartite graph with m supplies and n
/// demands (sums must agree to ~1e-9 relative). costMatrix is row-major m*n.
/// Northwest-corner start (no artificial arcs, so potentials stay at cost
/// scale), block pricing, and the strongly-feasible leaving rule: among the
/// blocking arcs, pick the last one met when walking the cycle from the apex
/// in the entering arc's direction. That keeps every zero-flow basic arc
/// pointing at the root and rules out cycling.
TransportSolution solveDenseTransport(const std::vector<double>& supply,
                                      const std::vector<double>& demand,
                                      const std::vector<double>& costMatrix);

/// Lexicographic variant: among the plans of minimal costMatrix cost, returns
/// one that minimizes secondaryCost (row-major m*n, magnitudes O(1)). The
/// second stage restricts pivoting to the first-stage optimal face, so the
/// returned plan is still optimal for costMatrix; cost, potentials and
/// minReducedCost all refer to costMatrix. With a secondary cost that is
/// generic (pairwise-distinct combinations), the tie between degenerate
/// optimal plans is resolved the same way on every call and across instances,
/// which makes downstream quantities of the plan (marginals of a slack block,
/// say) deterministic functions of the input instead of solver pivot order.
TransportSolution solveDenseTransportLexi(const std::vector<double>& supply,
                                          const std::vector<double>& demand,
                                          const std::vector<double>& costMatrix,
                                          const std::vector<double>& secondaryCost);

}  // namespace crowd
