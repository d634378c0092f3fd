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

#include "crowd/operators.hpp"

#include "crowd/errors.hpp"

namespace crowd {

std::array<std::vector<double>, 2> gradient(const Grid& grid, const std::vector<double>& p) {
  if (static_cast<int>(p.size()) != grid.cellCount()) throw InputError("gradient: size mismatch");
  const int nx = grid.nx(), ny = grid.ny();
  const double invh = 1.0 / grid.h();
  std::array<std::vector<double>, 2> g;
  g[0].assign(p.size(), 0.0);
  for (int iy = 0; iy < ny; ++iy) {
    const int row = iy * nx;
    for (int ix = 0; ix + 1 < nx; ++ix) {
      g[0][row + ix] = (p[row + ix + 1] - p[row + ix]) * invh;
    }
  }
  if (grid.dim() == 2) {
    g[1].assign(p.size(), 0.0);
    for (int iy = 0; iy + 1 < ny; ++iy) {
      for (int ix = 0; ix < nx; ++ix) {
        g[1][iy * nx + ix] = (p[(iy + 1) * nx + ix] - p[iy * nx + ix]) * invh;
      }
    }
  }
  return g;
}

std::vector<double> divergence(const Grid& grid, const std::array<std::vector<double>, 2>& w) {
  const int nx = grid.nx(), ny = grid.ny();
  if (static_cast<int>(w[0].size()) != grid.cellCount()) throw InputError("divergence: size mismatch");
  const double invh = 1.0 / grid.h();
  std::vector<double> d(w[0].size(), 0.0);
  // Backward difference with clamped ends; adjointness to gradient() is exact
  // by the summation-by-parts bookkeeping, not just to truncation order.
  for (int iy = 0; iy < ny; ++iy) {
    const int row = iy * nx;
    for (int ix = 0; ix < nx; ++ix) {
      const double right = ix + 1 < nx ? w[0][row + ix] : 0.0;
      const double left = ix > 0 ? w[0][row + ix - 1] : 0.0;
      d[row + ix] = (right - left) * invh;
    }
  }
  if (grid.dim() == 2) {
    if (static_cast<int>(w[1].size()) != grid.cellCount()) throw InputError("divergence: size mismatch");
    for (int iy = 0; iy < ny; ++iy) {
      for (int ix = 0; ix < nx; ++ix) {
        const double up = iy + 1 < ny ? w[1][iy * nx + ix] : 0.0;
        const double down = iy > 0 ? w[1][(iy - 1) * nx + ix] : 0.0;
        d[iy * nx + ix] += (up - down) * invh;
      }
    }
  }
  return d;
}

double dotScalar(const Grid& grid, const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw InputError("dotScalar: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s * grid.cellVolume();
}

double dotVector(const Grid& grid, const std::array<std::vector<double>, 2>& a,
                 const std::array<std::vector<double>, 2>& b) {
  double s = 0.0;
  for (int d = 0; d < grid.dim(); ++d) {
    if (a[d].size() != b[d].size()) throw InputError("dotVector: size mismatch");
    for (std::size_t i = 0; i < a[d].size(); ++i) s += a[d][i] * b[d][i];
  }
  return s * grid.cellVolume();
}

double normVectorSquared(const Grid& grid, const std::array<std::vector<double>, 2>& a) {
  return dotVector(grid, a, a);
}

std::vector<double> neumannLaplacian(const Grid& grid, const std::vector<double>& p) {
  if (static_cast<int>(p.size()) != grid.cellCount()) throw InputError("neumannLaplacian: size mismatch");
  const int nx = grid.nx(), ny = grid.ny();
  const double invh2 = 1.0 / (grid.h() * grid.h());
  std::vector<double> out(p.size(), 0.0);
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const int i = iy * nx + ix;
      const double c = p[i];
      double acc = 0.0;
      acc += (ix > 0 ? p[i - 1] : c) - c;
      acc += (ix + 1 < nx ? p[i + 1] : c) - c;
      if (grid.dim() == 2) {
        acc += (iy > 0 ? p[i - nx] : c) - c;
        acc += (iy + 1 < ny ? p[i + nx] : c) - c;
      }
      out[i] = acc * invh2;
    }
  }
  return out;
}

}  // namespace crowd
