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

#include "crowd/fields.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "crowd/config.hpp"
#include "crowd/errors.hpp"

namespace crowd {

namespace {

void requireShape(const Grid& grid, const std::vector<double>& values, const char* what) {
  if (static_cast<int>(values.size()) != grid.cellCount()) {
    throw InputError(std::string(what) + ": expected " + std::to_string(grid.cellCount()) +
                     " cell values, got " + std::to_string(values.size()));
  }
  for (double v : values) {
    if (!std::isfinite(v)) throw InputError(std::string(what) + ": non-finite cell value");
  }
}

}  // namespace

double totalMass(const Grid& grid, const std::vector<double>& values) {
  double s = 0.0;
  for (double v : values) s += v;
  return s * grid.cellVolume();
}

double l1Norm(const Grid& grid, const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw InputError("l1Norm: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s * grid.cellVolume();
}

DensityField::DensityField(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  requireShape(grid_, values_, "DensityField");
  for (double v : values_) {
    if (v < 0.0) throw InputError("DensityField: negative cell value");
  }
  const double m = mass();
  if (std::abs(m - 1.0) > SolverConfig::defaults().massTolerance) {
    throw InputError("DensityField: mass must be 1, got " + std::to_string(m));
  }
}

double DensityField::maxValue() const {
  return *std::max_element(values_.begin(), values_.end());
}

bool DensityField::feasible(double tolerance) const {
  return maxValue() <= 1.0 + tolerance;
}

double l1Distance(const DensityField& a, const DensityField& b) {
  if (a.grid() != b.grid()) throw InputError("l1Distance: grids differ");
  return l1Norm(a.grid(), a.values(), b.values());
}

VelocityField::VelocityField(Grid grid, double time, std::vector<double> ux)
    : grid_(grid), time_(time) {
  if (grid_.dim() != 1) throw InputError("VelocityField: 1-component constructor needs a 1D grid");
  comp_[0] = std::move(ux);
  requireShape(grid_, comp_[0], "VelocityField");
}

VelocityField::VelocityField(Grid grid, double time, std::vector<double> ux, std::vector<double> uy)
    : grid_(grid), time_(time) {
  if (grid_.dim() != 2) throw InputError("VelocityField: 2-component constructor needs a 2D grid");
  comp_[0] = std::move(ux);
  comp_[1] = std::move(uy);
  requireShape(grid_, comp_[0], "VelocityField");
  requireShape(grid_, comp_[1], "VelocityField");
}

double VelocityField::linf() const {
  double m = 0.0;
  for (int d = 0; d < grid_.dim(); ++d) {
    for (double v : comp_[d]) m = std::max(m, std::abs(v));
  }
  return m;
}

double VelocityField::l2Squared() const {
  double s = 0.0;
  for (int d = 0; d < grid_.dim(); ++d) {
    for (double v : comp_[d]) s += v * v;
  }
  return s * grid_.cellVolume();
}

PressureField::PressureField(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  requireShape(grid_, values_, "PressureField");
  for (double v : values_) {
    if (v < 0.0) throw InputError("PressureField: negative cell value");
  }
}

double PressureField::maxValue() const {
  return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end());
}

double PressureField::complementarityResidual(const DensityField& rho,
                                              double saturationThreshold) const {
  if (rho.grid() != grid_) throw InputError("complementarityResidual: grids differ");
  double r = 0.0;
  for (int i = 0; i < grid_.cellCount(); ++i) {
    const double slack = (1.0 - saturationThreshold) - rho[i];
    if (slack > 0.0) r = std::max(r, values_[i] * slack);
  }
  return r;
}

}  // namespace crowd
