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

#include "crowd/presets.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "crowd/errors.hpp"
#include "crowd/io.hpp"

namespace crowd {

namespace {

double gaussian(std::array<double, 2> x, std::array<double, 2> c, double w) {
  const double dx = x[0] - c[0], dy = x[1] - c[1];
  return std::exp(-(dx * dx + dy * dy) / (2.0 * w * w));
}

std::vector<double> sampleRaw(const Grid& grid, const DensitySpec& spec) {
  const int n = grid.cellCount();
  std::vector<double> v(n, 0.0);
  switch (spec.kind) {
    case DensityKind::uniform:
      std::fill(v.begin(), v.end(), 1.0);
      break;
    case DensityKind::bump:
      if (!(spec.width > 0.0)) throw InputError("density bump: width must be positive");
      for (int i = 0; i < n; ++i) v[i] = gaussian(grid.center(i), spec.center, spec.width);
      break;
    case DensityKind::twoBumps: {
      if (!(spec.width > 0.0)) throw InputError("density two-bumps: width must be positive");
      if (spec.weight < 0.0 || spec.weight > 1.0)
        throw InputError("density two-bumps: weight must lie in [0,1]");
      // Normalize each bump separately so `weight` is the exact mass split.
      std::vector<double> a(n), b(n);
      double ma = 0.0, mb = 0.0;
      for (int i = 0; i < n; ++i) {
        a[i] = gaussian(grid.center(i), spec.center, spec.width);
        b[i] = gaussian(grid.center(i), spec.center2, spec.width);
        ma += a[i];
        mb += b[i];
      }
      if (ma <= 0.0 || mb <= 0.0) throw InputError("density two-bumps: a bump misses the grid");
      for (int i = 0; i < n; ++i) v[i] = spec.weight * a[i] / ma + (1.0 - spec.weight) * b[i] / mb;
      break;
    }
    case DensityKind::box: {
      for (int d = 0; d < grid.dim(); ++d) {
        if (!(spec.boxLo[d] < spec.boxHi[d])) throw InputError("density box: lo must be below hi");
      }
      for (int i = 0; i < n; ++i) {
        const auto c = grid.center(i);
        bool inside = true;
        for (int d = 0; d < grid.dim(); ++d) {
          inside = inside && c[d] >= spec.boxLo[d] && c[d] <= spec.boxHi[d];
        }
        v[i] = inside ? 1.0 : 0.0;
      }
      break;
    }
    case DensityKind::table: {
      if (!spec.tableValues.empty()) {
        v = spec.tableValues;
        if (static_cast<int>(v.size()) != n) throw InputError("density table: wrong value count");
      } else if (!spec.tablePath.empty()) {
        v = readFieldCsv(spec.tablePath, grid);
      } else {
        throw InputError("density table: neither values nor a file given");
      }
      for (double x : v) {
        if (!std::isfinite(x) || x < 0.0) throw InputError("density table: entries must be finite and >= 0");
      }
      break;
    }
  }
  return v;
}

}  // namespace

DensityField makeDensity(const Grid& grid, const DensitySpec& spec) {
  std::vector<double> v = sampleRaw(grid, spec);
  const double m = totalMass(grid, v);
  if (!(m > 1e-300)) throw InputError("density preset is degenerate: total mass is ~0 on this grid");
  for (double& x : v) x /= m;
  return DensityField(grid, std::move(v));
}

std::array<double, 2> evaluateVelocity(const VelocitySpec& spec, std::array<double, 2> x) {
  switch (spec.kind) {
    case VelocityKind::zero:
      return {0.0, 0.0};
    case VelocityKind::constant:
      return spec.value;
    case VelocityKind::towardPoint:
      return {-spec.strength * (x[0] - spec.center[0]), -spec.strength * (x[1] - spec.center[1])};
    case VelocityKind::rotation:
      return {-spec.omega * (x[1] - spec.center[1]), spec.omega * (x[0] - spec.center[0])};
    case VelocityKind::piecewise:
      return x[0] < spec.threshold ? spec.left : spec.right;
    case VelocityKind::table:
      throw InputError("table velocity has no closed form; sample it on a grid");
  }
  throw InputError("unknown velocity kind");
}

VelocityField sampleVelocity(const Grid& grid, const VelocitySpec& spec, double time) {
  const int n = grid.cellCount();
  if (spec.kind == VelocityKind::rotation && grid.dim() != 2) {
    throw InputError("rotation velocity needs a 2D grid");
  }
  std::array<std::vector<double>, 2> comp;
  comp[0].resize(n);
  if (grid.dim() == 2) comp[1].resize(n);
  if (spec.kind == VelocityKind::table) {
    for (int d = 0; d < grid.dim(); ++d) {
      if (!spec.tableValues[d].empty()) {
        comp[d] = spec.tableValues[d];
        if (static_cast<int>(comp[d].size()) != n) throw InputError("velocity table: wrong value count");
      } else {
        if (spec.tablePath.empty()) throw InputError("velocity table: neither values nor a file given");
        std::string path = spec.tablePath;
        const auto semi = path.find(';');
        if (grid.dim() == 2) {
          if (semi == std::string::npos) throw InputError("velocity table in 2D needs two paths: ux;uy");
          path = d == 0 ? path.substr(0, semi) : path.substr(semi + 1);
        }
        comp[d] = readFieldCsv(path, grid);
      }
      for (double v : comp[d]) {
        if (!std::isfinite(v)) throw InputError("velocity table: non-finite entry");
      }
    }
  } else {
    for (int i = 0; i < n; ++i) {
      const auto u = evaluateVelocity(spec, grid.center(i));
      comp[0][i] = u[0];
      if (grid.dim() == 2) comp[1][i] = u[1];
    }
  }
  if (grid.dim() == 1) return VelocityField(grid, time, std::move(comp[0]));
  return VelocityField(grid, time, std::move(comp[0]), std::move(comp[1]));
}

std::optional<double> analyticLambda(const VelocitySpec& spec) {
  switch (spec.kind) {
    case VelocityKind::zero:
    case VelocityKind::constant:
    case VelocityKind::rotation:
      return 0.0;
    case VelocityKind::towardPoint:
      return -spec.strength;
    case VelocityKind::piecewise: {
      // Across the jump the quotient blows up unless the tangential components
      // match and the normal components only compress.
      const bool tangentialMatch = spec.left[1] == spec.right[1];
      const bool compressive = spec.left[0] >= spec.right[0];
      if (tangentialMatch && compressive) return 0.0;
      return std::nullopt;
    }
    case VelocityKind::table:
      return std::nullopt;
  }
  return std::nullopt;
}

DensityField makeRandomFeasibleDensity(const Grid& grid, std::uint64_t seed,
                                       const RandomDensityOptions& opts) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = grid.cellCount();
  const double vol = grid.cellVolume();
  const double domainVolume = grid.volume();

  // Smooth strictly positive background shape.
  std::vector<double> g(n, 0.2);
  const int blobs = 3;
  for (int k = 0; k < blobs; ++k) {
    std::array<double, 2> c{unit(rng) * grid.lengthX(),
                            grid.dim() == 2 ? unit(rng) * grid.lengthY() : 0.0};
    const double w = (0.08 + 0.22 * unit(rng)) * grid.diameter();
    const double a = 0.3 + 0.7 * unit(rng);
    for (int i = 0; i < n; ++i) g[i] += a * gaussian(grid.center(i), c, w);
  }

  std::vector<double> v(n, 0.0);
  std::vector<char> saturated(n, 0);
  double satMass = 0.0;

  if (opts.forceSaturation) {
    double frac = std::clamp(opts.saturatedMassFraction, 0.05, 0.7);
    // A plateau of mass f occupies volume f; keep it well inside the domain
    // capacity so the background has room.
    frac = std::min(frac, 0.5 * (domainVolume - 1.0) + 0.45);
    frac = std::clamp(frac, 0.05, 0.7);
    int want = std::max(1, static_cast<int>(std::lround(frac / vol)));
    want = std::min(want, static_cast<int>(0.6 * n));
    const int patches = want >= 4 && unit(rng) < 0.5 ? 2 : 1;
    for (int p = 0; p < patches; ++p) {
      const int count = patches == 2 ? (p == 0 ? want / 2 : want - want / 2) : want;
      if (grid.dim() == 1) {
        const int start = std::min(n - count, static_cast<int>(unit(rng) * (n - count + 1)));
        for (int i = start; i < start + count; ++i) saturated[i] = 1;
      } else {
        int w = std::max(1, static_cast<int>(std::lround(std::sqrt(double(count)))));
        w = std::min(w, grid.nx());
        const int hgt = std::min((count + w - 1) / w, grid.ny());
        const int sx = std::min(grid.nx() - w, static_cast<int>(unit(rng) * (grid.nx() - w + 1)));
        const int sy = std::min(grid.ny() - hgt, static_cast<int>(unit(rng) * (grid.ny() - hgt + 1)));
        int placed = 0;
        for (int iy = sy; iy < sy + hgt && placed < count; ++iy) {
          for (int ix = sx; ix < sx + w && placed < count; ++ix, ++placed) {
            saturated[grid.index(ix, iy)] = 1;
          }
        }
      }
    }
    int satCells = 0;
    for (int i = 0; i < n; ++i) {
      if (saturated[i]) {
        v[i] = 1.0;
        ++satCells;
      }
    }
    satMass = satCells * vol;
  }

  // Fill the rest with the background, capped below opts.backgroundCap, and
  // water-fill until the remaining mass is placed.
  double target = 1.0 - satMass;
  if (target < 0.0) throw SolveError("random density: saturated patch exceeds unit mass");
  if (target > 0.0) {
    double bgShape = 0.0;
    for (int i = 0; i < n; ++i) {
      if (!saturated[i]) bgShape += g[i];
    }
    double scale = target / (bgShape * vol);
    for (int iter = 0; iter < 200; ++iter) {
      double mass = 0.0, freeShape = 0.0;
      for (int i = 0; i < n; ++i) {
        if (saturated[i]) continue;
        v[i] = std::min(scale * g[i], opts.backgroundCap);
        mass += v[i];
        if (v[i] < opts.backgroundCap) freeShape += g[i];
      }
      mass *= vol;
      const double deficit = target - mass;
      if (std::abs(deficit) < 1e-14 || freeShape <= 0.0) break;
      scale += deficit / (freeShape * vol);
    }
    // Exact mass by a final multiplicative touch-up on the background.
    double mass = 0.0;
    for (int i = 0; i < n; ++i) {
      if (!saturated[i]) mass += v[i];
    }
    mass *= vol;
    if (mass > 0.0) {
      const double corr = target / mass;
      for (int i = 0; i < n; ++i) {
        if (!saturated[i]) v[i] *= corr;
      }
    }
  }
  return DensityField(grid, std::move(v));
}

VelocityField makeRandomVelocity(const Grid& grid, std::uint64_t seed, double amplitude) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = grid.cellCount();
  std::array<std::vector<double>, 2> comp;
  for (int d = 0; d < grid.dim(); ++d) {
    comp[d].assign(n, 0.0);
    const double base = 0.5 * sym(rng);
    for (int i = 0; i < n; ++i) comp[d][i] = base;
    for (int k = 0; k < 3; ++k) {
      std::array<double, 2> c{unit(rng) * grid.lengthX(),
                              grid.dim() == 2 ? unit(rng) * grid.lengthY() : 0.0};
      const double w = (0.1 + 0.2 * unit(rng)) * grid.diameter();
      const double a = sym(rng);
      for (int i = 0; i < n; ++i) comp[d][i] += a * gaussian(grid.center(i), c, w);
    }
  }
  double m = 0.0;
  for (int d = 0; d < grid.dim(); ++d) {
    for (double x : comp[d]) m = std::max(m, std::abs(x));
  }
  if (m > 0.0) {
    for (int d = 0; d < grid.dim(); ++d) {
      for (double& x : comp[d]) x *= amplitude / m;
    }
  }
  if (grid.dim() == 1) return VelocityField(grid, 0.0, std::move(comp[0]));
  return VelocityField(grid, 0.0, std::move(comp[0]), std::move(comp[1]));
}

std::vector<TestFunction> makeTestFunctions(const Grid& grid) {
  std::vector<TestFunction> fns;
  const double lx = grid.lengthX();
  const double pi = 3.14159265358979323846;
  auto add = [&fns](std::string name, std::function<double(std::array<double, 2>)> v,
                    std::function<std::array<double, 2>(std::array<double, 2>)> g) {
    fns.push_back({std::move(name), std::move(v), std::move(g)});
  };
  add("one", [](auto) { return 1.0; }, [](auto) { return std::array<double, 2>{0.0, 0.0}; });
  add("x", [](auto p) { return p[0]; }, [](auto) { return std::array<double, 2>{1.0, 0.0}; });
  add("x2", [](auto p) { return p[0] * p[0]; },
      [](auto p) { return std::array<double, 2>{2.0 * p[0], 0.0}; });
  for (int k = 1; k <= 2; ++k) {
    const double wk = k * pi / lx;
    add("cosx" + std::to_string(k), [wk](auto p) { return std::cos(wk * p[0]); },
        [wk](auto p) { return std::array<double, 2>{-wk * std::sin(wk * p[0]), 0.0}; });
  }
  if (grid.dim() == 2) {
    const double ly = grid.lengthY();
    const double wy = pi / ly;
    add("y", [](auto p) { return p[1]; }, [](auto) { return std::array<double, 2>{0.0, 1.0}; });
    add("y2", [](auto p) { return p[1] * p[1]; },
        [](auto p) { return std::array<double, 2>{0.0, 2.0 * p[1]}; });
    add("xy", [](auto p) { return p[0] * p[1]; },
        [](auto p) { return std::array<double, 2>{p[1], p[0]}; });
    const double wx = pi / lx;
    add("cosxcosy", [wx, wy](auto p) { return std::cos(wx * p[0]) * std::cos(wy * p[1]); },
        [wx, wy](auto p) {
          return std::array<double, 2>{-wx * std::sin(wx * p[0]) * std::cos(wy * p[1]),
                                       -wy * std::cos(wx * p[0]) * std::sin(wy * p[1])};
        });
  }
  return fns;
}

}  // namespace crowd
