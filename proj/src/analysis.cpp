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

#include "crowd/analysis.hpp"

#include <cmath>
#include <limits>
#include <random>

#include "crowd/errors.hpp"
#include "crowd/operators.hpp"
#include "crowd/transport.hpp"

namespace crowd {

double estimateLambda(const VelocityField& u, int sampleCount, std::uint64_t seed) {
  const Grid& grid = u.grid();
  const int n = grid.cellCount();
  if (n < 2) throw InputError("estimateLambda: need at least two cells");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, n - 1);
  double best = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < sampleCount; ++k) {
    const int i = pick(rng);
    int j = pick(rng);
    while (j == i) j = pick(rng);
    const auto xi = grid.center(i), xj = grid.center(j);
    const auto ui = u.at(i), uj = u.at(j);
    const double dx = xi[0] - xj[0], dy = xi[1] - xj[1];
    const double du0 = ui[0] - uj[0], du1 = ui[1] - uj[1];
    const double q = (du0 * dx + du1 * dy) / (dx * dx + dy * dy);
    best = std::max(best, q);
  }
  return best;
}

namespace {

ContractionReport contractionReport(const Trajectory& a, const Trajectory& b, bool w2Mode,
                                    double lambda, const std::string& lambdaSource,
                                    const SolverConfig& cfg) {
  if (a.scenario.grid != b.scenario.grid) throw InputError("contraction report: grids differ");
  if (a.frames.size() != b.frames.size()) throw InputError("contraction report: frame counts differ");

  ContractionReport rep;
  rep.lambda = w2Mode ? lambda : 0.0;
  rep.lambdaSource = w2Mode ? lambdaSource : "";
  rep.slackTolerance = w2Mode ? cfg.w2SlackFraction : cfg.l1SlackFraction;

  double d0 = 0.0;
  rep.maxSlack = 0.0;
  for (std::size_t k = 0; k < a.frames.size(); ++k) {
    const Frame& fa = a.frames[k];
    const Frame& fb = b.frames[k];
    if (std::abs(fa.time - fb.time) > 1e-12 * (1.0 + std::abs(fa.time))) {
      throw InputError("contraction report: frame times differ");
    }
    const double dist = w2Mode ? std::sqrt(w2SquaredExact(fa.density, fb.density, cfg))
                               : l1Distance(fa.density, fb.density);
    if (k == 0) d0 = dist;
    const double bound = w2Mode ? std::exp(lambda * fa.time) * d0 : d0;
    double slack;
    if (bound > 1e-14) {
      slack = dist / bound - 1.0;
    } else {
      // Identical starts: any nonvanishing separation is a failure.
      slack = dist <= 1e-10 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    rep.points.push_back({fa.time, dist, bound, slack});
    rep.maxSlack = std::max(rep.maxSlack, slack);
  }
  rep.initialDistance = d0;
  rep.pass = rep.maxSlack <= rep.slackTolerance;
  return rep;
}

}  // namespace

ContractionReport w2ContractionReport(const Trajectory& a, const Trajectory& b, double lambda,
                                      const std::string& lambdaSource, const SolverConfig& cfg) {
  return contractionReport(a, b, true, lambda, lambdaSource, cfg);
}

ContractionReport l1ContractionReport(const Trajectory& a, const Trajectory& b,
                                      const SolverConfig& cfg) {
  return contractionReport(a, b, false, 0.0, "", cfg);
}

double transportPressureAlignment(const DensityField& rho0, const DensityField& rho1,
                                  const PressureField& p, const SolverConfig& cfg) {
  if (rho0.grid() != p.grid()) throw InputError("transportPressureAlignment: grids differ");
  const Grid& grid = rho0.grid();
  const LpTransportResult lp = lpTransport(rho0, rho1, cfg);
  const BarycentricMap map = optimalMap(lp.plan);
  const auto gp = gradient(grid, p.values());
  double acc = 0.0;
  for (int i = 0; i < grid.cellCount(); ++i) {
    if (!map.defined[i] || rho0[i] <= 0.0) continue;
    const auto d = map.displacement(i);  // T(x) - x = -grad(phi)
    double dot = -d[0] * gp[0][i];
    if (grid.dim() == 2) dot -= d[1] * gp[1][i];
    acc += dot * rho0[i];
  }
  return acc * grid.cellVolume();
}

GeodesicDerivativeCheck geodesicDerivativeCheck(const DensityField& rho0, const DensityField& rho1,
                                                const PressureField& p, const SolverConfig& cfg) {
  if (rho0.grid() != p.grid()) throw InputError("geodesicDerivativeCheck: grids differ");
  const Grid& grid = rho0.grid();
  const LpTransportResult lp = lpTransport(rho0, rho1, cfg);

  GeodesicDerivativeCheck out;
  out.predicted = -transportPressureAlignment(rho0, rho1, p, cfg);

  auto pressureMass = [&](double t) {
    const DensityField mu = displacementInterpolate(lp.plan, t);
    return dotScalar(grid, p.values(), mu.values());
  };
  const double i0 = pressureMass(0.0);
  const double t0 = 1e-2;
  const double d1 = (pressureMass(t0) - i0) / t0;
  const double d2 = (pressureMass(0.5 * t0) - i0) / (0.5 * t0);
  const double d3 = (pressureMass(0.25 * t0) - i0) / (0.25 * t0);
  // One-sided first-order differences; two Richardson stages strip the O(t)
  // and O(t^2) terms.
  const double r1 = 2.0 * d2 - d1;
  const double r2 = 2.0 * d3 - d2;
  out.oneSided = (4.0 * r2 - r1) / 3.0;
  out.gap = std::abs(out.oneSided - out.predicted);
  return out;
}

}  // namespace crowd
