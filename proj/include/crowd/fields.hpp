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

/// Raw cell averages: sum(values) * cellVolume.
double totalMass(const Grid& grid, const std::vector<double>& values);
/// Raw cell averages: sum(|a-b|) * cellVolume.
double l1Norm(const Grid& grid, const std::vector<double>& a, const std::vector<double>& b);

/// Nonnegative cell-averaged density of total mass 1. Values are stored
/// row-major (idx = iy*nx + ix). Construction validates finiteness,
/// nonnegativity and unit mass; it does not require rho <= 1, since the whole
/// point of the projection is to restore that.
class DensityField {
 public:
  DensityField(Grid grid, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  double operator[](int idx) const { return values_[idx]; }
  int size() const { return static_cast<int>(values_.size()); }

  double mass() const { return totalMass(grid_, values_); }
  double maxValue() const;
  /// Feasible means rho <= 1 + tolerance everywhere.
  bool feasible(double tolerance) const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

double l1Distance(const DensityField& a, const DensityField& b);

/// Cell-centered velocity sample at a fixed time. Component arrays are
/// row-major like densities; comp(1) is empty in 1D.
class VelocityField {
 public:
  VelocityField(Grid grid, double time, std::vector<double> ux);
  VelocityField(Grid grid, double time, std::vector<double> ux, std::vector<double> uy);

  const Grid& grid() const { return grid_; }
  double time() const { return time_; }
  const std::vector<double>& comp(int d) const { return comp_[d]; }
  std::array<double, 2> at(int idx) const {
    return {comp_[0][idx], grid_.dim() == 2 ? comp_[1][idx] : 0.0};
  }

  /// max over cells and components of |u|.
  double linf() const;
  /// sum over cells of |u|^2 * cellVolume (squared L2 norm).
  double l2Squared() const;

 private:
  Grid grid_;
  double time_;
  std::array<std::vector<double>, 2> comp_;
};

/// Discrete congestion pressure: nonnegative, and zero wherever the paired
/// density is strictly below saturation. complementarityResidual measures the
/// worst violation of that support condition.
class PressureField {
 public:
  PressureField(Grid grid, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  double operator[](int idx) const { return values_[idx]; }

  double maxValue() const;
  /// max over cells of p * max(0, (1 - saturationThreshold) - rho).
  double complementarityResidual(const DensityField& rho, double saturationThreshold) const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

}  // namespace crowd
