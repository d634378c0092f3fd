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

#include "crowd/grid.hpp"

#include <cmath>
#include <string>

#include "crowd/errors.hpp"

namespace crowd {

Grid::Grid(int dim, std::array<double, 2> lengths, std::array<int, 2> cells) {
  if (dim != 1 && dim != 2) {
    throw InputError("grid dimension must be 1 or 2, got " + std::to_string(dim));
  }
  dim_ = dim;
  nx_ = cells[0];
  ny_ = dim == 2 ? cells[1] : 1;
  if (nx_ < 1 || ny_ < 1) {
    throw InputError("grid needs at least one cell per axis");
  }
  if (!(lengths[0] > 0.0) || (dim == 2 && !(lengths[1] > 0.0))) {
    throw InputError("grid side lengths must be positive");
  }
  h_ = lengths[0] / nx_;
  if (dim == 2) {
    const double hy = lengths[1] / ny_;
    if (std::abs(hy - h_) > 1e-12 * h_) {
      throw InputError("grid cells must be square: lengthX/cellsX != lengthY/cellsY");
    }
  }
  const double vol = cellCount() * cellVolume();
  if (!(vol > 1.0)) {
    throw InputError("domain volume must exceed 1 so that a unit mass fits under rho <= 1 (got volume " +
                     std::to_string(vol) + ")");
  }
}

Grid Grid::line(double length, int cells) {
  return Grid(1, {length, 0.0}, {cells, 1});
}

Grid Grid::box(double lengthX, double lengthY, int cellsX, int cellsY) {
  return Grid(2, {lengthX, lengthY}, {cellsX, cellsY});
}

double Grid::diameter() const {
  if (dim_ == 1) return lengthX();
  return std::hypot(lengthX(), lengthY());
}

std::array<double, 2> Grid::center(int idx) const {
  const double x = (ix(idx) + 0.5) * h_;
  const double y = dim_ == 2 ? (iy(idx) + 0.5) * h_ : 0.0;
  return {x, y};
}

}  // namespace crowd
