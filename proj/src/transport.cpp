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

#include "crowd/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "crowd/errors.hpp"

namespace crowd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Support {
  std::vector<int> cell;    // grid index per node
  std::vector<double> mass; // cell value * volume
};

Support supportOf(const Grid& grid, const std::vector<double>& values) {
  Support s;
  const double vol = grid.cellVolume();
  for (int i = 0; i < grid.cellCount(); ++i) {
    if (values[i] > 0.0) {
      s.cell.push_back(i);
      s.mass.push_back(values[i] * vol);
    }
  }
  return s;
}

double sqDist(const Grid& grid, int i, int j) {
  const auto a = grid.center(i);
  const auto b = grid.center(j);
  const double dx = a[0] - b[0], dy = a[1] - b[1];
  return dx * dx + dy * dy;
}

std::vector<double> costMatrix(const Grid& grid, const Support& a, const Support& b) {
  std::vector<double> c(a.cell.size() * b.cell.size());
  for (std::size_t i = 0; i < a.cell.size(); ++i) {
    for (std::size_t j = 0; j < b.cell.size(); ++j) {
      c[i * b.cell.size() + j] = sqDist(grid, a.cell[i], b.cell[j]);
    }
  }
  return c;
}

void requireLpSize(std::size_t m, std::size_t n, const SolverConfig& cfg, const char* what) {
  const long long prod = static_cast<long long>(m) * static_cast<long long>(n);
  if (prod > cfg.lpCellProductCap) {
    throw SolveError(std::string(what) + ": problem size " + std::to_string(prod) +
                     " exceeds the exact-LP cap " + std::to_string(cfg.lpCellProductCap) +
                     "; coarsen the grid, raise lpCellProductCap, or use sinkhornW2");
  }
}

LpTransportResult lpTransportImpl(const DensityField& a, const DensityField& b,
                                  const SolverConfig& cfg, bool wantPotentials) {
  if (a.grid() != b.grid()) throw InputError("lpTransport: grids differ");
  const Grid& grid = a.grid();
  const Support sa = supportOf(grid, a.values());
  const Support sb = supportOf(grid, b.values());
  requireLpSize(sa.cell.size(), sb.cell.size(), cfg, "lpTransport");

  const std::vector<double> c = costMatrix(grid, sa, sb);
  const TransportSolution sol = solveDenseTransport(sa.mass, sb.mass, c);

  LpTransportResult out{TransportPlan(grid), PotentialPair{}, sol.cost, 0.0, sol.minReducedCost};
  const int nb = static_cast<int>(sb.cell.size());
  std::vector<double> rowSum(sa.cell.size(), 0.0), colSum(sb.cell.size(), 0.0);
  out.plan.entries.reserve(sol.plan.size());
  for (const auto& e : sol.plan) {
    out.plan.entries.push_back({sa.cell[e.i], sb.cell[e.j], e.flow});
    rowSum[e.i] += e.flow;
    colSum[e.j] += e.flow;
  }
  out.plan.cost = sol.cost;
  for (std::size_t i = 0; i < sa.mass.size(); ++i) {
    out.plan.rowResidual = std::max(out.plan.rowResidual, std::abs(rowSum[i] - sa.mass[i]));
  }
  for (std::size_t j = 0; j < sb.mass.size(); ++j) {
    out.plan.colResidual = std::max(out.plan.colResidual, std::abs(colSum[j] - sb.mass[j]));
  }

  if (!wantPotentials) return out;

  // Potentials for cost |x-y|^2/2 are half the LP duals. Cells outside the
  // supports get c-transform values, which keeps the pair feasible everywhere
  // and tight on the support.
  const int n = grid.cellCount();
  PotentialPair pot;
  pot.phi.assign(n, kInf);
  pot.psi.assign(n, kInf);
  for (std::size_t i = 0; i < sa.cell.size(); ++i) pot.phi[sa.cell[i]] = 0.5 * sol.potentialSource[i];
  for (std::size_t j = 0; j < sb.cell.size(); ++j) pot.psi[sb.cell[j]] = 0.5 * sol.potentialTarget[j];
  for (int x = 0; x < n; ++x) {
    if (pot.phi[x] < kInf) continue;
    double best = kInf;
    for (std::size_t j = 0; j < sb.cell.size(); ++j) {
      best = std::min(best, 0.5 * sqDist(grid, x, sb.cell[j]) - 0.5 * sol.potentialTarget[j]);
    }
    pot.phi[x] = best;
  }
  for (int y = 0; y < n; ++y) {
    if (pot.psi[y] < kInf) continue;
    double best = kInf;
    for (int x = 0; x < n; ++x) best = std::min(best, 0.5 * sqDist(grid, x, y) - pot.phi[x]);
    pot.psi[y] = best;
  }
  // Pin the additive gauge: phi vanishes on the first source-support cell.
  const double shift = pot.phi[sa.cell.front()];
  for (double& v : pot.phi) v -= shift;
  for (double& v : pot.psi) v += shift;

  double dual = 0.0;
  for (std::size_t i = 0; i < sa.cell.size(); ++i) dual += pot.phi[sa.cell[i]] * sa.mass[i];
  for (std::size_t j = 0; j < sb.cell.size(); ++j) dual += pot.psi[sb.cell[j]] * sb.mass[j];
  pot.dualValue = 2.0 * dual;

  double viol = -kInf;
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      viol = std::max(viol, pot.phi[x] + pot.psi[y] - 0.5 * sqDist(grid, x, y));
    }
  }
  pot.maxFeasibilityViolation = viol;

  out.potentials = std::move(pot);
  out.dualityGap = out.cost - out.potentials.dualValue;
  return out;
}

}  // namespace

LpTransportResult lpTransport(const DensityField& a, const DensityField& b,
                              const SolverConfig& cfg) {
  return lpTransportImpl(a, b, cfg, true);
}

double w2Exact1d(const DensityField& a, const DensityField& b) {
  if (a.grid() != b.grid()) throw InputError("w2Exact1d: grids differ");
  if (a.grid().dim() != 1) throw InputError("w2Exact1d: grid must be 1D");
  const Grid& grid = a.grid();
  const int n = grid.cellCount();
  const double vol = grid.cellVolume();
  // Monotone rearrangement: march both mass sequences left to right, pairing
  // the lowest unmatched quantiles. Optimal for any convex cost of x - y.
  double cost = 0.0;
  int i = 0, j = 0;
  double ra = 0.0, rb = 0.0;
  while (true) {
    if (ra <= 0.0) {
      while (i < n && a[i] <= 0.0) ++i;
      if (i == n) break;
      ra = a[i] * vol;
    }
    if (rb <= 0.0) {
      while (j < n && b[j] <= 0.0) ++j;
      if (j == n) break;
      rb = b[j] * vol;
    }
    const double f = std::min(ra, rb);
    const double d = (grid.center(i)[0] - grid.center(j)[0]);
    cost += f * d * d;
    ra -= f;
    rb -= f;
    if (ra <= 0.0) ++i, ra = 0.0;
    if (rb <= 0.0) ++j, rb = 0.0;
  }
  return std::sqrt(std::max(cost, 0.0));
}

double w2SquaredExact(const DensityField& a, const DensityField& b, const SolverConfig& cfg) {
  if (a.grid().dim() == 1) {
    const double d = w2Exact1d(a, b);
    return d * d;
  }
  return lpTransportImpl(a, b, cfg, false).cost;
}

double sinkhornW2(const DensityField& a, const DensityField& b, double epsilon,
                  const SolverConfig& cfg) {
  if (a.grid() != b.grid()) throw InputError("sinkhornW2: grids differ");
  const Grid& grid = a.grid();
  const double diam2 = grid.diameter() * grid.diameter();
  if (epsilon <= 0.0) epsilon = cfg.sinkhornEpsilonFactor * diam2;

  const Support sa = supportOf(grid, a.values());
  const Support sb = supportOf(grid, b.values());
  const int m = static_cast<int>(sa.cell.size());
  const int n = static_cast<int>(sb.cell.size());
  const std::vector<double> c = costMatrix(grid, sa, sb);

  std::vector<double> la(m), lb(n);
  for (int i = 0; i < m; ++i) la[i] = std::log(sa.mass[i]);
  for (int j = 0; j < n; ++j) lb[j] = std::log(sb.mass[j]);

  // Epsilon scaling: start blunt, halve down to the requested sharpness, and
  // warm-start the duals at each level.
  std::vector<double> levels;
  for (double e = std::max(epsilon, 0.1 * diam2); e > 1.0001 * epsilon; e *= 0.5) levels.push_back(e);
  levels.push_back(epsilon);

  std::vector<double> f(m, 0.0), g(n, 0.0), row(n);
  long long budget = cfg.sinkhornMaxIterations;
  double rowResidual = kInf;

  auto lse = [](const std::vector<double>& t) {
    double mx = -kInf;
    for (double v : t) mx = std::max(mx, v);
    if (mx == -kInf) return -kInf;
    double s = 0.0;
    for (double v : t) s += std::exp(v - mx);
    return mx + std::log(s);
  };

  // After the g update the column marginals are exact; monitor rows.
  auto rowError = [&](double eps) {
    double total = 0.0;
    for (int i = 0; i < m; ++i) {
      double s = 0.0;
      for (int j = 0; j < n; ++j) {
        s += std::exp((f[i] + g[j] - c[static_cast<std::size_t>(i) * n + j]) / eps + la[i] + lb[j]);
      }
      total += std::abs(s - sa.mass[i]);
    }
    return total;
  };

  for (double eps : levels) {
    const bool last = eps == levels.back();
    const double target = last ? cfg.sinkhornMarginalTolerance : 1e-4;
    long long sweep = 0;
    while (budget > 0) {
      --budget;
      ++sweep;
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) row[j] = (g[j] - c[static_cast<std::size_t>(i) * n + j]) / eps + lb[j];
        f[i] = -eps * lse(row);
      }
      std::vector<double> col(m);
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < m; ++i) col[i] = (f[i] - c[static_cast<std::size_t>(i) * n + j]) / eps + la[i];
        g[j] = -eps * lse(col);
      }
      // The residual pass costs as much as a sweep; sample it sparsely.
      if (sweep % 4 == 0) {
        rowResidual = rowError(eps);
        if (rowResidual < target) break;
      }
    }
    rowResidual = rowError(eps);
    if (last || budget == 0) break;
  }
  if (rowResidual > cfg.sinkhornMarginalTolerance) {
    throw SolveError("sinkhornW2 did not converge: marginal residual " + std::to_string(rowResidual));
  }

  double cost = 0.0;
  const double eps = levels.back();
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * n + j;
      cost += std::exp((f[i] + g[j] - c[k]) / eps + la[i] + lb[j]) * c[k];
    }
  }
  return cost;
}

std::array<double, 2> BarycentricMap::displacement(int idx) const {
  if (!defined[idx]) return {0.0, 0.0};
  const auto c = grid.center(idx);
  return {point[0][idx] - c[0], point[1][idx] - c[1]};
}

BarycentricMap optimalMap(const TransportPlan& plan) {
  const Grid& grid = plan.grid;
  const int n = grid.cellCount();
  BarycentricMap map(grid);
  map.point[0].assign(n, 0.0);
  map.point[1].assign(n, 0.0);
  map.defined.assign(n, 0);
  std::vector<double> weight(n, 0.0);
  for (const auto& e : plan.entries) {
    const auto y = grid.center(e.j);
    weight[e.i] += e.flow;
    map.point[0][e.i] += e.flow * y[0];
    map.point[1][e.i] += e.flow * y[1];
  }
  for (int i = 0; i < n; ++i) {
    if (weight[i] > 0.0) {
      map.point[0][i] /= weight[i];
      map.point[1][i] /= weight[i];
      map.defined[i] = 1;
    }
  }
  return map;
}

DensityField displacementInterpolate(const TransportPlan& plan, double t) {
  if (t < 0.0 || t > 1.0) throw InputError("displacementInterpolate: t must lie in [0,1]");
  const Grid& grid = plan.grid;
  const int nx = grid.nx(), ny = grid.ny();
  std::vector<double> mass(grid.cellCount(), 0.0);
  const double invh = 1.0 / grid.h();

  auto splat1d = [&](int n, double gpos, int& i0, double& w1) {
    // gpos is the position in cell units; cell k's center sits at k.
    i0 = static_cast<int>(std::floor(gpos));
    w1 = gpos - i0;
    if (i0 < 0) {
      i0 = 0;
      w1 = 0.0;  // everything into cell 0
    } else if (i0 >= n - 1) {
      i0 = n - 2 >= 0 ? n - 2 : 0;
      w1 = n > 1 ? 1.0 : 0.0;
    }
  };

  for (const auto& e : plan.entries) {
    const auto x = grid.center(e.i);
    const auto y = grid.center(e.j);
    const double zx = (1.0 - t) * x[0] + t * y[0];
    int ix0;
    double wx1;
    splat1d(nx, zx * invh - 0.5, ix0, wx1);
    if (grid.dim() == 1) {
      mass[ix0] += e.flow * (1.0 - wx1);
      if (nx > 1) mass[ix0 + 1] += e.flow * wx1;
    } else {
      const double zy = (1.0 - t) * x[1] + t * y[1];
      int iy0;
      double wy1;
      splat1d(ny, zy * invh - 0.5, iy0, wy1);
      mass[grid.index(ix0, iy0)] += e.flow * (1.0 - wx1) * (1.0 - wy1);
      if (nx > 1) mass[grid.index(ix0 + 1, iy0)] += e.flow * wx1 * (1.0 - wy1);
      if (ny > 1) mass[grid.index(ix0, iy0 + 1)] += e.flow * (1.0 - wx1) * wy1;
      if (nx > 1 && ny > 1) mass[grid.index(ix0 + 1, iy0 + 1)] += e.flow * wx1 * wy1;
    }
  }
  const double invvol = 1.0 / grid.cellVolume();
  for (double& v : mass) v *= invvol;
  return DensityField(grid, std::move(mass));
}

ProjectionResult projectDensityValues(const Grid& grid, const std::vector<double>& values,
                                      const SolverConfig& cfg) {
  if (static_cast<int>(values.size()) != grid.cellCount()) {
    throw InputError("projectDensityValues: size mismatch");
  }
  double maxVal = 0.0;
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0) throw InputError("projectDensityValues: values must be finite and >= 0");
    maxVal = std::max(maxVal, v);
  }
  ProjectionResult out;
  if (maxVal <= 1.0) {
    out.values = values;
    out.usedFastPath = true;
    return out;
  }

  const double vol = grid.cellVolume();
  const int n = grid.cellCount();
  const double massTotal = totalMass(grid, values);
  if (massTotal > grid.volume() * (1.0 + 1e-12)) {
    throw SolveError("projectDensityValues: mass exceeds domain capacity, no feasible density");
  }

  // Serpentine cell order keeps consecutive LP indices geometrically adjacent,
  // so the northwest-corner start of the simplex is already near-diagonal.
  std::vector<int> ord(n);
  for (int iy = 0; iy < grid.ny(); ++iy) {
    for (int ix = 0; ix < grid.nx(); ++ix) {
      const int k = iy * grid.nx() + ix;
      ord[k] = iy % 2 == 0 ? grid.index(ix, iy) : grid.index(grid.nx() - 1 - ix, iy);
    }
  }

  // Spare capacity enters as zero-cost sources interleaved with the real ones
  // at the positions a cheap water-fill guess of the projection leaves free; a
  // single trailing slack source would hand the northwest start a plan that is
  // wrong by O(1) mass. The guess clamps the density at 1 and spills the
  // clipped excess outward from the saturated set ring by ring, which mimics
  // how the true projection spreads a plateau.
  std::vector<double> fill(n);
  double spill = 0.0;
  std::vector<int> ring;
  std::vector<int> dist(n, -1);
  for (int i = 0; i < n; ++i) {
    fill[i] = std::min(values[i], 1.0) * vol;
    spill += std::max(values[i] - 1.0, 0.0) * vol;
    if (values[i] >= 1.0) {
      dist[i] = 0;
      ring.push_back(i);
    }
  }
  while (spill > 0.0 && !ring.empty()) {
    std::vector<int> next;
    for (int i : ring) {
      auto visit = [&](int j) {
        if (j >= 0 && dist[j] < 0) {
          dist[j] = 1;
          next.push_back(j);
        }
      };
      const int ix = grid.ix(i), iy = grid.iy(i);
      visit(ix > 0 ? grid.index(ix - 1, iy) : -1);
      visit(ix + 1 < grid.nx() ? grid.index(ix + 1, iy) : -1);
      if (grid.dim() == 2) {
        visit(iy > 0 ? grid.index(ix, iy - 1) : -1);
        visit(iy + 1 < grid.ny() ? grid.index(ix, iy + 1) : -1);
      }
    }
    for (int j : next) {
      const double take = std::min(vol - fill[j], spill);
      fill[j] += take;
      spill -= take;
    }
    ring = std::move(next);
  }

  std::vector<double> gap(n, 0.0);
  for (int k = 0; k < n; ++k) gap[k] = std::max(vol - fill[ord[k]], 0.0);
  double gapSum = 0.0;
  for (double g : gap) gapSum += g;
  // Balance the slack against the exact spare capacity (rounding dust only).
  double trim = gapSum - (static_cast<double>(n) * vol - massTotal);
  for (int k = n - 1; k >= 0 && trim > 0.0; --k) {
    const double cut = std::min(trim, gap[k]);
    gap[k] -= cut;
    trim -= cut;
  }
  if (trim < 0.0) gap[n - 1] -= trim;

  std::vector<double> supply;
  std::vector<int> srcCell;  // -1 marks a spare-capacity source
  for (int k = 0; k < n; ++k) {
    if (values[ord[k]] > 0.0) {
      supply.push_back(values[ord[k]] * vol);
      srcCell.push_back(ord[k]);
    }
    if (gap[k] > 0.0) {
      supply.push_back(gap[k]);
      srcCell.push_back(-1);
    }
  }
  const int m = static_cast<int>(supply.size());
  requireLpSize(m, n, cfg, "projectDensityValues");

  const std::vector<double> demand(n, vol);
  std::vector<double> c(static_cast<std::size_t>(m) * n, 0.0);
  for (int i = 0; i < m; ++i) {
    if (srcCell[i] < 0) continue;
    for (int l = 0; l < n; ++l) c[static_cast<std::size_t>(i) * n + l] = sqDist(grid, srcCell[i], ord[l]);
  }

  // The quadratic lattice cost has exact ties (east vs north at equal
  // distance, half-left/half-right splits), so the optimal plan's output
  // marginal is badly non-unique and pivot order would otherwise pick an
  // arbitrary vertex. Only where the spare capacity ends up determines the
  // projected density, so a generic per-cell preference on the slack rows
  // selects one canonical optimum: the same cell wins the same tie in every
  // instance, making the projection a deterministic, order-respecting map.
  std::vector<double> tie(static_cast<std::size_t>(m) * n, 0.0);
  for (int i = 0; i < m; ++i) {
    if (srcCell[i] >= 0) continue;
    for (int l = 0; l < n; ++l) {
      const double golden = 0.6180339887498949 * (ord[l] + 1);
      tie[static_cast<std::size_t>(i) * n + l] = golden - std::floor(golden);
    }
  }
  const TransportSolution sol = solveDenseTransportLexi(supply, demand, c, tie);
  out.values.assign(n, 0.0);
  for (const auto& e : sol.plan) {
    if (srcCell[e.i] >= 0) out.values[ord[e.j]] += e.flow;
  }
  for (double& v : out.values) v /= vol;
  out.transportCost = sol.cost;
  out.minReducedCost = sol.minReducedCost;
  return out;
}

DensityField wassersteinProject(const DensityField& rho, const SolverConfig& cfg,
                                ProjectionResult* info) {
  ProjectionResult r = projectDensityValues(rho.grid(), rho.values(), cfg);
  DensityField out(rho.grid(), std::move(r.values));
  if (info) {
    info->values = out.values();
    info->transportCost = r.transportCost;
    info->minReducedCost = r.minReducedCost;
    info->usedFastPath = r.usedFastPath;
  }
  return out;
}

}  // namespace crowd
