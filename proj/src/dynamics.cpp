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

#include "crowd/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "crowd/errors.hpp"
#include "crowd/operators.hpp"
#include "crowd/pressure.hpp"
#include "crowd/transport.hpp"

namespace crowd {

namespace {

void advectSubstep(const Grid& grid, const VelocityField& u, double dt, std::vector<double>& rho,
                   std::vector<double>& next) {
  const int nx = grid.nx(), ny = grid.ny();
  const double lam = dt / grid.h();
  next = rho;
  // x faces: flux between (ix-1, iy) and (ix, iy), donor-cell upwinding.
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 1; ix < nx; ++ix) {
      const int i = grid.index(ix, iy);
      const int il = i - 1;
      const double uf = 0.5 * (u.comp(0)[il] + u.comp(0)[i]);
      const double flux = uf > 0.0 ? uf * rho[il] : uf * rho[i];
      next[il] -= lam * flux;
      next[i] += lam * flux;
    }
  }
  if (grid.dim() == 2) {
    for (int iy = 1; iy < ny; ++iy) {
      for (int ix = 0; ix < nx; ++ix) {
        const int i = grid.index(ix, iy);
        const int id = i - nx;
        const double uf = 0.5 * (u.comp(1)[id] + u.comp(1)[i]);
        const double flux = uf > 0.0 ? uf * rho[id] : uf * rho[i];
        next[id] -= lam * flux;
        next[i] += lam * flux;
      }
    }
  }
  for (double& v : next) v = std::max(v, 0.0);  // shield rounding dust
  rho.swap(next);
}

double axisSpeedSum(const Grid& grid, const VelocityField& u) {
  double s = 0.0;
  for (int d = 0; d < grid.dim(); ++d) {
    double m = 0.0;
    for (double v : u.comp(d)) m = std::max(m, std::abs(v));
    s += m;
  }
  return s;
}

using SpMat = Eigen::SparseMatrix<double>;
using Factor = Eigen::SimplicialLLT<SpMat>;

std::shared_ptr<const Factor> diffusionFactor(const Grid& grid, double tau) {
  using Key = std::tuple<int, int, double, double>;
  static std::map<Key, std::shared_ptr<const Factor>> cache;
  static std::mutex mutex;
  const Key key{grid.nx(), grid.ny(), grid.h(), tau};
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  const int n = grid.cellCount();
  const double w = tau / (grid.h() * grid.h());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) * 5);
  for (int iy = 0; iy < grid.ny(); ++iy) {
    for (int ix = 0; ix < grid.nx(); ++ix) {
      const int i = grid.index(ix, iy);
      int deg = 0;
      auto couple = [&](int jx, int jy) {
        if (jx < 0 || jx >= grid.nx() || jy < 0 || jy >= grid.ny()) return;
        ++deg;
        trip.emplace_back(i, grid.index(jx, jy), -w);
      };
      couple(ix - 1, iy);
      couple(ix + 1, iy);
      if (grid.dim() == 2) {
        couple(ix, iy - 1);
        couple(ix, iy + 1);
      }
      trip.emplace_back(i, i, 1.0 + w * deg);
    }
  }
  SpMat A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  auto factor = std::make_shared<Factor>();
  factor->compute(A);
  if (factor->info() != Eigen::Success) throw SolveError("diffusion factorization failed");
  cache[key] = factor;
  return factor;
}

DensityField projectStep(const Grid& grid, std::vector<double> values, const SolverConfig& cfg,
                         SplitStepInfo* info) {
  ProjectionResult pr = projectDensityValues(grid, values, cfg);
  if (info) {
    info->projectionCost = pr.transportCost;
    info->projectionFastPath = pr.usedFastPath;
  }
  return DensityField(grid, std::move(pr.values));
}

}  // namespace

DensityField advect(const DensityField& rho, const VelocityField& u, double tau,
                    const SolverConfig& cfg, double* cflOut) {
  if (rho.grid() != u.grid()) throw InputError("advect: grids differ");
  if (!(tau > 0.0)) throw InputError("advect: tau must be positive");
  const Grid& grid = rho.grid();
  const double speed = axisSpeedSum(grid, u);
  const int substeps =
      speed > 0.0 ? std::max(1, static_cast<int>(std::ceil(tau * speed / (cfg.cflNumber * grid.h()))))
                  : 1;
  const double dt = tau / substeps;
  if (cflOut) *cflOut = dt * speed / grid.h();

  std::vector<double> values = rho.values();
  std::vector<double> scratch;
  for (int k = 0; k < substeps; ++k) advectSubstep(grid, u, dt, values, scratch);
  return DensityField(grid, std::move(values));
}

DensityField diffuse(const DensityField& rho, double tau, const SolverConfig& cfg) {
  if (!(tau > 0.0)) throw InputError("diffuse: tau must be positive");
  const Grid& grid = rho.grid();
  const auto factor = diffusionFactor(grid, tau);
  const int n = grid.cellCount();
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) b[i] = rho[i];
  Eigen::VectorXd x = factor->solve(b);

  // Defensive residual check; the system is well conditioned for tau ~ h^2.
  const double w = tau / (grid.h() * grid.h());
  const double scale = std::max(1.0, 1.0 + 4.0 * w);
  std::vector<double> values(n);
  for (int i = 0; i < n; ++i) values[i] = x[i];
  const std::vector<double> lap = neumannLaplacian(grid, values);
  double res = 0.0;
  for (int i = 0; i < n; ++i) res = std::max(res, std::abs(values[i] - tau * lap[i] - rho[i]));
  if (res > 1e6 * cfg.linearSolverTolerance * scale) {
    throw SolveError("diffusion solve residual too large: " + std::to_string(res));
  }
  for (double& v : values) v = std::max(v, 0.0);
  return DensityField(grid, std::move(values));
}

DensityField splitStepFirstOrder(const DensityField& rho, const VelocityField& u, double tau,
                                 const SolverConfig& cfg, SplitStepInfo* info) {
  DensityField a = advect(rho, u, tau, cfg, info ? &info->cfl : nullptr);
  return projectStep(rho.grid(), a.values(), cfg, info);
}

DensityField splitStepSecondOrder(const DensityField& rho, const VelocityField& u, double tau,
                                  const SolverConfig& cfg, SplitStepInfo* info) {
  DensityField a = advect(rho, u, tau, cfg, info ? &info->cfl : nullptr);
  DensityField d = diffuse(a, tau, cfg);
  return projectStep(rho.grid(), d.values(), cfg, info);
}

namespace {

double stepBound(const Grid& grid, const VelocitySpec& spec, double t, double tau) {
  // tau * Simpson quadrature of ||u_s||_inf^2 over the step.
  auto linfAt = [&](double s) {
    const VelocityField u = sampleVelocity(grid, spec, s);
    return u.linf();
  };
  const double a = linfAt(t), m = linfAt(t + 0.5 * tau), b = linfAt(t + tau);
  const double integral = tau / 6.0 * (a * a + 4.0 * m * m + b * b);
  return tau * integral;
}

}  // namespace

Trajectory run(const Scenario& scenario) {
  const Grid& grid = scenario.grid;
  const SolverConfig& cfg = scenario.solver.config;
  const double T = scenario.solver.horizon;
  const double tau = scenario.solver.tau;
  if (scenario.solver.order != 0 && scenario.solver.order != 1) {
    throw InputError("run: solver order must be 0 or 1");
  }
  if (!(T > 0.0) || !(tau > 0.0)) throw InputError("run: horizon and tau must be positive");
  if (scenario.solver.frameStride < 1) throw InputError("run: frame stride must be >= 1");
  const long long nSteps = std::max<long long>(1, static_cast<long long>(std::ceil(T / tau - 1e-12)));

  Trajectory traj{scenario};
  traj.steps = nSteps;

  DensityField rho = wassersteinProject(makeDensity(grid, scenario.initial), cfg);

  auto record = [&](double t, long long step, const DensityField& d, const FrameDiagnostics& diag) {
    Frame f{t, step, d, std::nullopt};
    if (scenario.solver.recordPressure) {
      const VelocityField u = sampleVelocity(grid, scenario.velocity, t);
      f.pressure = admissibleProject(d, u, cfg).pressure;
    }
    traj.frames.push_back(std::move(f));
    traj.diagnostics.push_back(diag);
  };

  FrameDiagnostics diag0{0.0, 0, rho.mass(), rho.maxValue(), 0.0, 0.0, -1.0, -1.0, 0.0};
  traj.massDrift = std::abs(diag0.mass - 1.0);
  traj.maxDensity = diag0.maxDensity;
  record(0.0, 0, rho, diag0);

  double sinceCfl = 0.0, sinceProj = 0.0;
  for (long long k = 0; k < nSteps; ++k) {
    const double t = static_cast<double>(k) * tau;
    const double tauK = std::min(tau, T - t);
    const VelocityField u = sampleVelocity(grid, scenario.velocity, t);

    SplitStepInfo info;
    DensityField next = scenario.solver.order == 0 ? splitStepFirstOrder(rho, u, tauK, cfg, &info)
                                                   : splitStepSecondOrder(rho, u, tauK, cfg, &info);

    sinceCfl = std::max(sinceCfl, info.cfl);
    sinceProj = std::max(sinceProj, info.projectionCost);
    traj.maxCfl = std::max(traj.maxCfl, info.cfl);
    traj.massDrift = std::max(traj.massDrift, std::abs(next.mass() - 1.0));
    traj.maxDensity = std::max(traj.maxDensity, next.maxValue());

    const bool lastStep = k + 1 == nSteps;
    const bool recording = lastStep || ((k + 1) % scenario.solver.frameStride == 0);
    const bool checkStep = cfg.stepDistanceCheck == StepDistanceCheck::all ||
                           (cfg.stepDistanceCheck == StepDistanceCheck::frames && recording);

    double actionSq = -1.0, distSq = -1.0, bound = 0.0;
    if (checkStep) {
      double meanSq = 0.0;
      for (int d = 0; d < grid.dim(); ++d) {
        for (int i = 0; i < grid.cellCount(); ++i) {
          meanSq += u.comp(d)[i] * u.comp(d)[i] * rho[i];
        }
      }
      actionSq = tauK * tauK * meanSq * grid.cellVolume();
      distSq = w2SquaredExact(rho, next, cfg);
      bound = stepBound(grid, scenario.velocity, t, tauK);
    }
    rho = std::move(next);

    if (recording) {
      const double tEnd = lastStep ? T : t + tauK;
      FrameDiagnostics diag{tEnd,      k + 1,     rho.mass(), rho.maxValue(), sinceCfl,
                            sinceProj, actionSq, distSq,     bound};
      record(tEnd, k + 1, rho, diag);
      sinceCfl = 0.0;
      sinceProj = 0.0;
    }
  }
  return traj;
}

double weakResidual(const Trajectory& traj, const TestFunction& phi, int frameA, int frameB) {
  const int fcount = static_cast<int>(traj.frames.size());
  if (frameA < 0 || frameB < 0 || frameA >= fcount || frameB >= fcount || frameA >= frameB) {
    throw InputError("weakResidual: frame indices out of range or not increasing");
  }
  const Scenario& sc = traj.scenario;
  const Grid& grid = sc.grid;
  const SolverConfig& cfg = sc.solver.config;
  const double tau = sc.solver.tau;
  const double T = sc.solver.horizon;
  const int n = grid.cellCount();

  std::vector<double> phiAtCell(n);
  std::array<std::vector<double>, 2> gradPhi;
  gradPhi[0].resize(n);
  if (grid.dim() == 2) gradPhi[1].resize(n);
  for (int i = 0; i < n; ++i) {
    const auto x = grid.center(i);
    phiAtCell[i] = phi.value(x);
    const auto g = phi.grad(x);
    gradPhi[0][i] = g[0];
    if (grid.dim() == 2) gradPhi[1][i] = g[1];
  }

  // Replay the strided steps between the two recorded frames.
  DensityField rho = traj.frames[frameA].density;
  double fluxIntegral = 0.0;
  for (long long k = traj.frames[frameA].step; k < traj.frames[frameB].step; ++k) {
    const double t = static_cast<double>(k) * tau;
    const double tauK = std::min(tau, T - t);
    const VelocityField u = sampleVelocity(grid, sc.velocity, t);
    DensityField next = sc.solver.order == 0 ? splitStepFirstOrder(rho, u, tauK, cfg)
                                             : splitStepSecondOrder(rho, u, tauK, cfg);
    const ConeProjectionResult cone = admissibleProject(next, u, cfg);
    const auto gp = gradient(grid, cone.pressure.values());
    double term = 0.0;
    for (int d = 0; d < grid.dim(); ++d) {
      for (int i = 0; i < n; ++i) {
        term += (u.comp(d)[i] - gp[d][i]) * gradPhi[d][i] * next[i];
      }
    }
    if (sc.solver.order == 1) {
      const auto gr = gradient(grid, next.values());
      for (int d = 0; d < grid.dim(); ++d) {
        for (int i = 0; i < n; ++i) term -= gr[d][i] * gradPhi[d][i];
      }
    }
    fluxIntegral += tauK * term * grid.cellVolume();
    rho = std::move(next);
  }

  const double massA = dotScalar(grid, phiAtCell, traj.frames[frameA].density.values());
  const double massB = dotScalar(grid, phiAtCell, traj.frames[frameB].density.values());
  return fluxIntegral - (massB - massA);
}

}  // namespace crowd
