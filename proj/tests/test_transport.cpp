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

#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "crowd/errors.hpp"
#include "crowd/fields.hpp"
#include "crowd/grid.hpp"
#include "crowd/presets.hpp"
#include "crowd/transport.hpp"

using namespace crowd;

namespace {

double sqCenterDist(const Grid& g, int i, int j) {
  const auto a = g.center(i), b = g.center(j);
  const double dx = a[0] - b[0], dy = a[1] - b[1];
  return dx * dx + dy * dy;
}

// Independent oracle for couplings between two-point marginals: the feasible
// flows form a segment, the cost is linear on it, so the optimum sits at one
// of the two endpoints.
double twoAtomOracle(const Grid& g, int i1, int i2, double a1, int j1, int j2, double b1) {
  const double c11 = sqCenterDist(g, i1, j1), c12 = sqCenterDist(g, i1, j2);
  const double c21 = sqCenterDist(g, i2, j1), c22 = sqCenterDist(g, i2, j2);
  const double a2 = 1.0 - a1, b2 = 1.0 - b1;
  const double lo = std::max(0.0, a1 - b2);
  const double hi = std::min(a1, b1);
  auto cost = [&](double t) {
    return c11 * t + c12 * (a1 - t) + c21 * (b1 - t) + c22 * (a2 - b1 + t);
  };
  return std::min(cost(lo), cost(hi));
}

DensityField twoAtoms(const Grid& g, int i1, int i2, double m1) {
  std::vector<double> v(g.cellCount(), 0.0);
  v[i1] += m1 / g.cellVolume();
  v[i2] += (1.0 - m1) / g.cellVolume();
  return DensityField(g, v);
}

// Compactly supported block of unit mass covering cells [lo, lo+len) (1D)
// used for exact translation distances.
DensityField block1d(const Grid& g, int lo, int len) {
  std::vector<double> v(g.cellCount(), 0.0);
  for (int i = lo; i < lo + len; ++i) v[i] = 1.0 / (len * g.cellVolume());
  return DensityField(g, v);
}

double firstMoment(const DensityField& rho, int axis) {
  double m = 0.0;
  for (int i = 0; i < rho.size(); ++i) {
    m += rho.grid().center(i)[axis] * rho[i] * rho.grid().cellVolume();
  }
  return m;
}

}  // namespace

TEST_CASE("exact transport matches the two-atom oracle") {
  std::mt19937_64 rng(100);
  for (const Grid& g : {Grid::line(2.0, 16), Grid::box(2.0, 2.0, 5, 5)}) {
    const int n = g.cellCount();
    std::uniform_int_distribution<int> cell(0, n - 1);
    std::uniform_real_distribution<double> mass(0.05, 0.95);
    for (int trial = 0; trial < 40; ++trial) {
      const int i1 = cell(rng);
      int i2 = cell(rng);
      if (i2 == i1) i2 = (i1 + 1) % n;
      const int j1 = cell(rng);
      int j2 = cell(rng);
      if (j2 == j1) j2 = (j1 + 3) % n;
      const double a1 = mass(rng), b1 = mass(rng);
      const double expected = twoAtomOracle(g, i1, i2, a1, j1, j2, b1);
      const auto r = lpTransport(twoAtoms(g, i1, i2, a1), twoAtoms(g, j1, j2, b1));
      CHECK(r.cost == doctest::Approx(expected).epsilon(1e-12));
      CHECK(r.minReducedCost >= -1e-10);
    }
  }
}

TEST_CASE("translating a block costs exactly the squared shift") {
  const Grid g = Grid::line(2.0, 64);
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> lo(2, 20), len(4, 16), shift(1, 30);
  for (int trial = 0; trial < 10; ++trial) {
    const int start = lo(rng), width = len(rng);
    const int k = std::min(shift(rng), 64 - start - width - 1);
    if (k < 1) continue;
    const DensityField a = block1d(g, start, width);
    const DensityField b = block1d(g, start + k, width);
    const double d = k * g.h();
    CHECK(lpTransport(a, b).cost == doctest::Approx(d * d).epsilon(1e-12));
    CHECK(w2Exact1d(a, b) == doctest::Approx(d).epsilon(1e-12));
  }

  // Same idea along one axis in 2D.
  const Grid b2 = Grid::box(2.0, 2.0, 12, 12);
  std::vector<double> va(b2.cellCount(), 0.0), vb(b2.cellCount(), 0.0);
  for (int iy = 2; iy < 6; ++iy) {
    for (int ix = 1; ix < 5; ++ix) {
      va[b2.index(ix, iy)] = 1.0 / (16 * b2.cellVolume());
      vb[b2.index(ix + 5, iy)] = 1.0 / (16 * b2.cellVolume());
    }
  }
  const double d = 5 * b2.h();
  CHECK(lpTransport(DensityField(b2, va), DensityField(b2, vb)).cost ==
        doctest::Approx(d * d).epsilon(1e-12));
}

TEST_CASE("1D rearrangement agrees with the LP on random pairs") {
  const Grid g = Grid::line(2.0, 48);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const DensityField a = makeRandomFeasibleDensity(g, 2 * seed);
    const DensityField b = makeRandomFeasibleDensity(g, 2 * seed + 1);
    const double w = w2Exact1d(a, b);
    const auto r = lpTransport(a, b);
    CHECK(r.cost == doctest::Approx(w * w).epsilon(1e-9));
  }
  CHECK_THROWS_AS(w2Exact1d(makeRandomFeasibleDensity(Grid::box(2.0, 2.0, 4, 4), 0),
                            makeRandomFeasibleDensity(Grid::box(2.0, 2.0, 4, 4), 1)),
                  InputError);
  CHECK_THROWS_AS(w2Exact1d(makeRandomFeasibleDensity(g, 0),
                            makeRandomFeasibleDensity(Grid::line(2.0, 32), 0)),
                  InputError);
}

TEST_CASE("transport plans satisfy their marginals and price out optimally") {
  for (const Grid& g : {Grid::line(2.0, 40), Grid::box(2.0, 2.0, 8, 8)}) {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      const DensityField a = makeRandomFeasibleDensity(g, 50 + seed);
      const DensityField b = makeRandomFeasibleDensity(g, 80 + seed);
      const auto r = lpTransport(a, b);

      CHECK(r.plan.rowResidual <= 1e-9);
      CHECK(r.plan.colResidual <= 1e-9);
      double replayed = 0.0;
      std::vector<double> rowSum(g.cellCount(), 0.0), colSum(g.cellCount(), 0.0);
      for (const auto& e : r.plan.entries) {
        CHECK(e.flow >= 0.0);
        replayed += e.flow * sqCenterDist(g, e.i, e.j);
        rowSum[e.i] += e.flow;
        colSum[e.j] += e.flow;
      }
      CHECK(replayed == doctest::Approx(r.cost).epsilon(1e-12));
      for (int i = 0; i < g.cellCount(); ++i) {
        CHECK(rowSum[i] == doctest::Approx(a[i] * g.cellVolume()).epsilon(1e-9));
        CHECK(colSum[i] == doctest::Approx(b[i] * g.cellVolume()).epsilon(1e-9));
      }

      // Dual side: feasible potentials whose value closes the gap.
      CHECK(r.potentials.maxFeasibilityViolation <= 1e-8);
      double dual = 0.0;
      for (int i = 0; i < g.cellCount(); ++i) {
        dual += r.potentials.phi[i] * a[i] * g.cellVolume();
        dual += r.potentials.psi[i] * b[i] * g.cellVolume();
      }
      CHECK(2.0 * dual == doctest::Approx(r.potentials.dualValue).epsilon(1e-10));
      CHECK(r.dualityGap >= -1e-9);
      CHECK(r.dualityGap <= 1e-8 * (1.0 + r.cost));
      CHECK(r.minReducedCost >= -1e-9);
    }
  }
}

TEST_CASE("lpTransport rejects mismatched grids and oversized problems") {
  const Grid g = Grid::line(2.0, 32);
  const DensityField a = makeRandomFeasibleDensity(g, 1);
  const DensityField b = makeRandomFeasibleDensity(g, 2);
  CHECK_THROWS_AS(lpTransport(a, makeRandomFeasibleDensity(Grid::line(2.0, 16), 2)), InputError);
  SolverConfig tiny;
  tiny.lpCellProductCap = 10;
  CHECK_THROWS_AS(lpTransport(a, b, tiny), SolveError);
}

TEST_CASE("entropic distance tracks the exact one") {
  const Grid g = Grid::line(2.0, 32);
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const DensityField a = makeRandomFeasibleDensity(g, 300 + seed);
    std::vector<double> rotated(a.values().size());
    const int k = g.cellCount() / 3;
    for (int i = 0; i < g.cellCount(); ++i) rotated[(i + k) % g.cellCount()] = a[i];
    const DensityField b(g, rotated);
    const double exact = lpTransport(a, b).cost;
    REQUIRE(exact > 0.01);
    const double ent = sinkhornW2(a, b);
    CHECK(std::abs(ent - exact) <= 0.01 * exact);
  }
}

TEST_CASE("barycentric map and interpolation reproduce a translation") {
  const Grid g = Grid::line(2.0, 64);
  const int start = 6, width = 10, k = 24;
  const DensityField a = block1d(g, start, width);
  const DensityField b = block1d(g, start + k, width);
  const auto r = lpTransport(a, b);

  const BarycentricMap map = optimalMap(r.plan);
  for (int i = 0; i < g.cellCount(); ++i) {
    if (a[i] > 0.0) {
      CHECK(map.defined[i] == 1);
      CHECK(map.displacement(i)[0] == doctest::Approx(k * g.h()).epsilon(1e-12));
    } else {
      CHECK(map.defined[i] == 0);
      CHECK(map.displacement(i)[0] == 0.0);
    }
  }

  const DensityField atA = displacementInterpolate(r.plan, 0.0);
  const DensityField atB = displacementInterpolate(r.plan, 1.0);
  CHECK(l1Distance(atA, a) <= 1e-12);
  CHECK(l1Distance(atB, b) <= 1e-12);

  const DensityField mid = displacementInterpolate(r.plan, 0.5);
  CHECK(mid.mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(l1Distance(mid, block1d(g, start + k / 2, width)) <= 1e-12);

  // Linear-weight splatting preserves the first moment at every t.
  for (double t : {0.25, 0.4, 0.75}) {
    const DensityField mu = displacementInterpolate(r.plan, t);
    CHECK(mu.mass() == doctest::Approx(1.0).epsilon(1e-12));
    const double want = (1.0 - t) * firstMoment(a, 0) + t * firstMoment(b, 0);
    CHECK(firstMoment(mu, 0) == doctest::Approx(want).epsilon(1e-12));
  }
  CHECK_THROWS_AS(displacementInterpolate(r.plan, 1.5), InputError);
}

TEST_CASE("projection flattens an over-dense block to the analytic profile") {
  const Grid g = Grid::line(2.0, 64);
  // Density 2 on [0, 0.5]; the nearest feasible density is the indicator of
  // [0, 1] and the squared distance is 1/12 in the continuum limit.
  std::vector<double> v(64, 0.0);
  for (int i = 0; i < 16; ++i) v[i] = 2.0;
  ProjectionResult info;
  const DensityField out = wassersteinProject(DensityField(g, v), SolverConfig::defaults(), &info);
  for (int i = 0; i < 64; ++i) {
    if (g.center(i)[0] < 1.0) {
      CHECK(out[i] == doctest::Approx(1.0).epsilon(1e-9));
    } else {
      CHECK(out[i] <= 1e-9);
    }
  }
  CHECK_FALSE(info.usedFastPath);
  CHECK(info.minReducedCost >= -1e-10);
  const double exact = w2Exact1d(DensityField(g, v), out);
  CHECK(info.transportCost == doctest::Approx(exact * exact).epsilon(1e-10));
  CHECK(info.transportCost == doctest::Approx(1.0 / 12.0).epsilon(0.02));
}

TEST_CASE("projection is the identity on feasible inputs") {
  const Grid g = Grid::box(2.0, 2.0, 10, 10);
  const DensityField rho = makeRandomFeasibleDensity(g, 77);
  ProjectionResult info;
  const DensityField out = wassersteinProject(rho, SolverConfig::defaults(), &info);
  CHECK(info.usedFastPath);
  CHECK(info.transportCost == 0.0);
  CHECK(out.values() == rho.values());
}

TEST_CASE("projection output is feasible, conservative and idempotent") {
  std::mt19937_64 rng(900);
  for (const Grid& g : {Grid::line(2.0, 64), Grid::box(2.0, 2.0, 12, 12)}) {
    std::uniform_real_distribution<double> scale(1.1, 1.6);
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      std::vector<double> v = makeRandomFeasibleDensity(g, 400 + seed).values();
      const double s = scale(rng);
      for (double& x : v) x *= s;  // infeasible but within the domain capacity
      const auto r = projectDensityValues(g, v);
      CHECK(*std::max_element(r.values.begin(), r.values.end()) <= 1.0 + 1e-9);
      CHECK(totalMass(g, r.values) == doctest::Approx(totalMass(g, v)).epsilon(1e-12));
      CHECK(r.minReducedCost >= -1e-9);
      CHECK(r.transportCost > 0.0);

      const auto again = projectDensityValues(g, r.values);
      CHECK(l1Norm(g, again.values, r.values) <= 1e-8);
    }
  }
}

TEST_CASE("projection cost equals the exact transport distance to its output") {
  const Grid g = Grid::line(2.0, 48);
  // Unit-mass infeasible input: a tall box plus background.
  std::vector<double> v(48, 0.1);
  for (int i = 10; i < 20; ++i) v[i] = 1.7;
  const double m = totalMass(g, v);
  for (double& x : v) x /= m;
  for (double& x : v) x *= 1.45;  // keep max above 1 after normalizing
  const double m2 = totalMass(g, v);
  for (double& x : v) x /= m2;
  const DensityField rho(g, v);
  REQUIRE(rho.maxValue() > 1.0);

  ProjectionResult info;
  const DensityField out = wassersteinProject(rho, SolverConfig::defaults(), &info);
  const auto direct = lpTransport(rho, out);
  CHECK(info.transportCost == doctest::Approx(direct.cost).epsilon(1e-9));
}

TEST_CASE("projection contracts L1 and preserves order") {
  std::mt19937_64 rng(1234);
  for (const Grid& g : {Grid::line(2.0, 48), Grid::box(2.0, 2.0, 10, 10)}) {
    std::uniform_real_distribution<double> scale(1.05, 1.6), damp(0.3, 1.0);
    for (int trial = 0; trial < 12; ++trial) {
      std::vector<double> v1 = makeRandomFeasibleDensity(g, 600 + 2 * trial).values();
      std::vector<double> v2 = makeRandomFeasibleDensity(g, 601 + 2 * trial).values();
      const double s1 = scale(rng), s2 = scale(rng);
      for (double& x : v1) x *= s1;
      for (double& x : v2) x *= s2;

      const auto p1 = projectDensityValues(g, v1);
      const auto p2 = projectDensityValues(g, v2);
      CHECK(l1Norm(g, p1.values, p2.values) <= l1Norm(g, v1, v2) + 1e-8);

      // Nested inputs: damping one field keeps it below the other cellwise.
      std::vector<double> lower = v1;
      const double d = damp(rng);
      for (double& x : lower) x *= d;
      const auto pl = projectDensityValues(g, lower);
      for (int i = 0; i < g.cellCount(); ++i) {
        CHECK(pl.values[i] <= p1.values[i] + 1e-8);
      }
    }
  }
}

TEST_CASE("projection rejects mass beyond the domain capacity") {
  const Grid g = Grid::line(2.0, 32);
  CHECK_THROWS_AS(projectDensityValues(g, std::vector<double>(32, 1.2)), SolveError);
}

TEST_CASE("cost-only distance matches the full solver in both dimensions") {
  const Grid g1 = Grid::line(2.0, 40);
  const DensityField a1 = makeRandomFeasibleDensity(g1, 7);
  const DensityField b1 = makeRandomFeasibleDensity(g1, 8);
  const double w = w2Exact1d(a1, b1);
  CHECK(w2SquaredExact(a1, b1) == doctest::Approx(w * w).epsilon(1e-12));

  const Grid g2 = Grid::box(2.0, 2.0, 7, 7);
  const DensityField a2 = makeRandomFeasibleDensity(g2, 7);
  const DensityField b2 = makeRandomFeasibleDensity(g2, 8);
  CHECK(w2SquaredExact(a2, b2) == doctest::Approx(lpTransport(a2, b2).cost).epsilon(1e-12));
}
