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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "crowd/fields.hpp"
#include "crowd/grid.hpp"

namespace crowd {

enum class DensityKind : std::uint8_t { uniform, bump, twoBumps, box, table };

/// Parameters for the built-in initial densities. All presets are sampled at
/// cell centers and normalized to unit mass, so only the shape matters.
struct DensitySpec {
  DensityKind kind = DensityKind::uniform;
  std::array<double, 2> center{0.0, 0.0};
  std::array<double, 2> center2{0.0, 0.0};
  double width = 0.1;
  double weight = 0.5;                  // mass fraction of the first bump
  std::array<double, 2> boxLo{0.0, 0.0};
  std::array<double, 2> boxHi{1.0, 1.0};
  std::string tablePath;                // CSV file, same layout as writeFieldCsv
  std::vector<double> tableValues;      // overrides tablePath when non-empty

  bool operator==(const DensitySpec&) const = default;
};

enum class VelocityKind : std::uint8_t { zero, constant, towardPoint, rotation, piecewise, table };

/// Built-in drift fields. towardPoint is the gradient flow of the confining
/// potential strength/2 * |x - center|^2, so u = -strength * (x - center) and
/// its one-sided Lipschitz constant is exactly -strength. piecewise jumps
/// from `left` to `right` across the plane x = threshold.
struct VelocitySpec {
  VelocityKind kind = VelocityKind::zero;
  std::array<double, 2> value{0.0, 0.0};
  std::array<double, 2> center{0.0, 0.0};
  double strength = 1.0;
  double omega = 1.0;
  double threshold = 0.0;
  std::array<double, 2> left{0.0, 0.0};
  std::array<double, 2> right{0.0, 0.0};
  std::string tablePath;                // one CSV per component: path or path;path
  std::array<std::vector<double>, 2> tableValues;

  bool operator==(const VelocitySpec&) const = default;
};

DensityField makeDensity(const Grid& grid, const DensitySpec& spec);
VelocityField sampleVelocity(const Grid& grid, const VelocitySpec& spec, double time);

/// Pointwise evaluation of the preset at an arbitrary position (not just cell
/// centers). Needed by the contraction analysis to probe one-sided Lipschitz
/// quotients off-grid.
std::array<double, 2> evaluateVelocity(const VelocitySpec& spec, std::array<double, 2> x);

/// The exact least lambda with (u(x)-u(y)).(x-y) <= lambda |x-y|^2 when the
/// preset admits one in closed form; nullopt when it has to be estimated
/// (tables, expansive jumps).
std::optional<double> analyticLambda(const VelocitySpec& spec);

struct RandomDensityOptions {
  double saturatedMassFraction = 0.4;  // mass placed in a plateau at rho = 1
  double backgroundCap = 0.85;         // background stays below this
  bool forceSaturation = true;         // false: smooth sub-saturated field
};

/// Deterministic random feasible density: one or two plateaus at exactly 1
/// plus a smooth strictly sub-saturated background, total mass 1. Same seed,
/// same field.
DensityField makeRandomFeasibleDensity(const Grid& grid, std::uint64_t seed,
                                       const RandomDensityOptions& opts = {});

/// Deterministic random velocity: a constant part plus a few Gaussian blobs
/// per component, sup-norm about `amplitude`.
VelocityField makeRandomVelocity(const Grid& grid, std::uint64_t seed, double amplitude = 1.0);

/// Smooth scalar test function with a closed-form gradient, for weak-form
/// residuals. Low-degree polynomials and Neumann-compatible cosines.
struct TestFunction {
  std::string name;
  std::function<double(std::array<double, 2>)> value;
  std::function<std::array<double, 2>(std::array<double, 2>)> grad;
};

std::vector<TestFunction> makeTestFunctions(const Grid& grid);

}  // namespace crowd
