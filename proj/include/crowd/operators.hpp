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

#include "crowd/grid.hpp"

namespace crowd {

/// Cell-to-cell forward difference, zero on the last cell of each axis:
///   (Gp)^x_{ix,iy} = (p_{ix+1,iy} - p_{ix,iy}) / h   for ix < nx-1, else 0.
/// The zero closure makes G compatible with no-flux walls, and divergence()
/// below is its exact negative adjoint, which the projection identities rely
/// on. comp[1] is empty in 1D.
std::array<std::vector<double>, 2> gradient(const Grid& grid, const std::vector<double>& p);

/// Exact negative adjoint of gradient() in the cell-volume inner product:
///   sum_i (Gp)_i . w_i = -sum_i p_i (div w)_i   for all p, w.
std::vector<double> divergence(const Grid& grid, const std::array<std::vector<double>, 2>& w);

/// Volume-weighted inner products.
double dotScalar(const Grid& grid, const std::vector<double>& a, const std::vector<double>& b);
double dotVector(const Grid& grid, const std::array<std::vector<double>, 2>& a,
                 const std::array<std::vector<double>, 2>& b);
double normVectorSquared(const Grid& grid, const std::array<std::vector<double>, 2>& a);

/// Five-point (three-point in 1D) Neumann Laplacian via mirrored ghost cells.
/// Symmetric with zero row sums, so implicit diffusion conserves mass.
std::vector<double> neumannLaplacian(const Grid& grid, const std::vector<double>& p);

}  // namespace crowd
