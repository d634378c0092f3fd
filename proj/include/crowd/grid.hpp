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
#include <cstdint>

namespace crowd {

/// Uniform cell-centered grid on a box [0,Lx] or [0,Lx]x[0,Ly] with square
/// cells of side h. The hard-congestion constraint rho <= 1 only admits a
/// unit-mass density when the box volume exceeds 1, so construction rejects
/// volume <= 1.
class Grid {
 public:
  Grid(int dim, std::array<double, 2> lengths, std::array<int, 2> cells);

  static Grid line(double length, int cells);
  static Grid box(double lengthX, double lengthY, int cellsX, int cellsY);

  int dim() const { return dim_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }  // 1 when dim() == 1
  double h() const { return h_; }
  double lengthX() const { return nx_ * h_; }
  double lengthY() const { return dim_ == 2 ? ny_ * h_ : 0.0; }
  int cellCount() const { return nx_ * ny_; }
  double cellVolume() const { return dim_ == 2 ? h_ * h_ : h_; }
  double volume() const { return cellCount() * cellVolume(); }
  double diameter() const;

  int index(int ix, int iy = 0) const { return iy * nx_ + ix; }
  int ix(int idx) const { return idx % nx_; }
  int iy(int idx) const { return idx / nx_; }
  /// Center of cell idx; second coordinate is 0 in 1D.
  std::array<double, 2> center(int idx) const;

  bool operator==(const Grid& o) const {
    return dim_ == o.dim_ && nx_ == o.nx_ && ny_ == o.ny_ && h_ == o.h_;
  }
  bool operator!=(const Grid& o) const { return !(*this == o); }

 private:
  int dim_;
  int nx_;
  int ny_;
  double h_;
};

}  // namespace crowd
