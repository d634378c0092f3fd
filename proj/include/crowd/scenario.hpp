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

#include <cstdint>
#include <map>
#include <string>

#include "crowd/config.hpp"
#include "crowd/grid.hpp"
#include "crowd/presets.hpp"

namespace crowd {

struct ScenarioSolver {
  int order = 0;             // 0: transport only, 1: adds unit-viscosity diffusion
  double horizon = 1.0;      // simulated time T
  double tau = 1e-3;         // outer step
  std::uint64_t seed = 0;
  int frameStride = 1;       // record every k-th step (plus first and last)
  bool recordPressure = false;
  SolverConfig config;       // defaults plus any per-scenario overrides

  bool operator==(const ScenarioSolver&) const = default;
};

/// A fully resolved simulation description. Parsing is fail-closed: unknown
/// sections or keys, duplicates, and malformed values are errors, and
/// serialize() emits every resolved field so that parse(serialize(s)) == s.
struct Scenario {
  Grid grid;
  DensitySpec initial;
  VelocitySpec velocity;
  ScenarioSolver solver;

  bool operator==(const Scenario&) const = default;
};

/// INI-like text: [grid] / [initial] / [velocity] / [solver] sections with
/// dash-separated keys. overrides are dotted "section.key" -> value pairs
/// applied on top of the text before validation (CLI --section.key=value).
Scenario parseScenario(const std::string& text,
                       const std::map<std::string, std::string>& overrides = {});

Scenario loadScenario(const std::string& path,
                      const std::map<std::string, std::string>& overrides = {});

std::string serializeScenario(const Scenario& scenario);

}  // namespace crowd
