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

#include "crowd/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "crowd/errors.hpp"
#include "crowd/operators.hpp"

namespace crowd {

namespace {

std::vector<char> saturatedMask(const DensityField& rho, double threshold) {
  std::vector<char> mask(rho.size(), 0);
  for (int i = 0; i < rho.size(); ++i) mask[i] = rho[i] >= 1.0 - threshold ? 1 : 0;
  return mask;
}

VelocityField makeVelocity(const Grid& grid, double t, std::array<std::vector<double>, 2> comp) {
  if (grid.dim() == 1) return VelocityField(grid, t, std::move(comp[0]));
  return VelocityField(grid, t, std::move(comp[0]), std::move(comp[1]));
}

}  // namespace

ConeProjectionResult admissibleProject(const DensityField& rho, const VelocityField& u,
                                       const SolverConfig& cfg) {
  if (rho.grid() != u.grid()) throw InputError("admissibleProject: grids differ");
  const Grid& grid = rho.grid();
  const int n = grid.cellCount();
  const std::vector<char> mask = saturatedMask(rho, cfg.saturationThreshold);

  const double uNorm = std::sqrt(u.l2Squared());
  const double stopTol = cfg.coneGradientFactor * (1.0 + uNorm);
  const double sqrtVol = std::sqrt(grid.cellVolume());

  std::vector<double> p(n, 0.0);

  // Residual field of the bound-constrained QP at p with gradient g:
  // free coordinates keep g, active-at-zero ones only count inward pushes.
  auto kkt = [&](const std::vector<double>& pp, const std::vector<double>& g) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      if (!mask[i]) continue;
      const double r = pp[i] > 0.0 ? g[i] : std::min(g[i], 0.0);
      s += r * r;
    }
    return std::sqrt(s) * sqrtVol;
  };

  auto gradientOf = [&](const std::vector<double>& pp) {
    auto gp = gradient(grid, pp);
    std::array<std::vector<double>, 2> w;
    for (int d = 0; d < grid.dim(); ++d) {
      w[d].resize(n);
      for (int i = 0; i < n; ++i) w[d][i] = gp[d][i] - u.comp(d)[i];
    }
    // dF/dp = G^T (Gp - u) = -div(Gp - u).
    std::vector<double> g = divergence(grid, w);
    for (double& v : g) v = -v;
    return g;
  };

  std::vector<double> g = gradientOf(p);
  double residual = kkt(p, g);

  const double alpha0 = grid.h() * grid.h() / (4.0 * grid.dim());
  double alpha = alpha0;
  const double alphaMin = 1e-7 * alpha0, alphaMax = 1e7 * alpha0;

  int iter = 0;
  bool converged = residual <= stopTol;
  double checkpoint = residual;
  std::vector<double> pNew(n), s(n), y(n);

  while (!converged && iter < cfg.coneMaxIterations) {
    ++iter;
    for (int i = 0; i < n; ++i) {
      pNew[i] = mask[i] ? std::max(0.0, p[i] - alpha * g[i]) : 0.0;
    }
    std::vector<double> gNew = gradientOf(pNew);
    double sy = 0.0, ss = 0.0;
    for (int i = 0; i < n; ++i) {
      s[i] = pNew[i] - p[i];
      y[i] = gNew[i] - g[i];
      sy += s[i] * y[i];
      ss += s[i] * s[i];
    }
    alpha = sy > 0.0 ? std::clamp(ss / sy, alphaMin, alphaMax) : alphaMax;
    p.swap(pNew);
    g.swap(gNew);
    residual = kkt(p, g);
    converged = residual <= stopTol;
    // Spectral steps are non-monotone; if a long stretch makes no headway,
    // restart from the safe small step.
    if (iter % 100 == 0) {
      if (residual > 0.9 * checkpoint) alpha = alpha0;
      checkpoint = std::min(checkpoint, residual);
    }
  }

  auto gp = gradient(grid, p);
  std::array<std::vector<double>, 2> v;
  for (int d = 0; d < grid.dim(); ++d) {
    v[d].resize(n);
    for (int i = 0; i < n; ++i) v[d][i] = u.comp(d)[i] - gp[d][i];
  }

  ConeProjectionResult out{PressureField(grid, p), makeVelocity(grid, u.time(), std::move(v)),
                           residual, 0.0, 0.0, converged, iter};
  out.orthogonalityResidual = 0.0;
  {
    double dot = 0.0;
    for (int d = 0; d < grid.dim(); ++d) {
      for (int i = 0; i < n; ++i) dot += gp[d][i] * out.corrected.comp(d)[i];
    }
    out.orthogonalityResidual = dot * grid.cellVolume();
  }
  out.complementarityResidual = out.pressure.complementarityResidual(rho, cfg.saturationThreshold);
  return out;
}

EnergySplit energyCheck(const VelocityField& u, const ConeProjectionResult& r) {
  if (u.grid() != r.corrected.grid()) throw InputError("energyCheck: grids differ");
  const Grid& grid = u.grid();
  EnergySplit out;
  out.uNormSquared = u.l2Squared();
  out.vNormSquared = r.corrected.l2Squared();
  const auto gp = gradient(grid, r.pressure.values());
  out.gradPNormSquared = normVectorSquared(grid, gp);
  out.pythagorasResidual = out.uNormSquared - out.gradPNormSquared - out.vNormSquared;
  double dot = 0.0;
  for (int d = 0; d < grid.dim(); ++d) {
    for (std::size_t i = 0; i < gp[d].size(); ++i) dot += gp[d][i] * r.corrected.comp(d)[i];
  }
  out.orthogonality = dot * grid.cellVolume();
  return out;
}

std::vector<PressureField> samplePressureTestFunctions(const DensityField& rho, int count,
                                                       std::uint64_t seed,
                                                       const SolverConfig& cfg) {
  const Grid& grid = rho.grid();
  const int n = grid.cellCount();
  const std::vector<char> mask = saturatedMask(rho, cfg.saturationThreshold);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  auto smoothInMask = [&](std::vector<double>& q) {
    std::vector<double> next(n, 0.0);
    for (int iy = 0; iy < grid.ny(); ++iy) {
      for (int ix = 0; ix < grid.nx(); ++ix) {
        const int i = grid.index(ix, iy);
        if (!mask[i]) continue;
        double acc = q[i];
        int cnt = 1;
        auto take = [&](int jx, int jy) {
          if (jx < 0 || jx >= grid.nx() || jy < 0 || jy >= grid.ny()) return;
          const int j = grid.index(jx, jy);
          if (mask[j]) {
            acc += q[j];
            ++cnt;
          }
        };
        take(ix - 1, iy);
        take(ix + 1, iy);
        if (grid.dim() == 2) {
          take(ix, iy - 1);
          take(ix, iy + 1);
        }
        next[i] = acc / cnt;
      }
    }
    q.swap(next);
  };

  std::vector<PressureField> out;
  out.reserve(count);
  for (int k = 0; k < count; ++k) {
    std::vector<double> q(n, 0.0);
    if (k == 0) {
      for (int i = 0; i < n; ++i) q[i] = mask[i] ? 1.0 : 0.0;
    } else {
      for (int i = 0; i < n; ++i) q[i] = mask[i] ? unit(rng) : 0.0;
      for (int pass = 0; pass < k % 3; ++pass) smoothInMask(q);
      double mx = 0.0;
      for (double v : q) mx = std::max(mx, v);
      if (mx > 0.0) {
        for (double& v : q) v /= mx;
      }
    }
    out.emplace_back(grid, std::move(q));
  }
  return out;
}

double coneInnerProduct(const PressureField& q, const VelocityField& v) {
  if (q.grid() != v.grid()) throw InputError("coneInnerProduct: grids differ");
  const auto gq = gradient(q.grid(), q.values());
  double dot = 0.0;
  for (int d = 0; d < q.grid().dim(); ++d) {
    for (std::size_t i = 0; i < gq[d].size(); ++i) dot += gq[d][i] * v.comp(d)[i];
  }
  return dot * q.grid().cellVolume();
}

}  // namespace crowd
