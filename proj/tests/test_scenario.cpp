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

#include <doctest.h>

#include <filesystem>
#include <string>

#include "crowd/errors.hpp"
#include "crowd/scenario.hpp"

using namespace crowd;

namespace {

const char* kMinimal =
    "[grid]\n"
    "dim = 1\n"
    "length = 2\n"
    "cells = 32\n"
    "[initial]\n"
    "preset = uniform\n"
    "[velocity]\n"
    "preset = zero\n";

const char* kFull =
    "# leading comment\n"
    "[grid]\n"
    "dim = 2\n"
    "length = 2 2\n"
    "cells = 16 16\n"
    "\n"
    "[initial]\n"
    "preset = two-bumps\n"
    "center = 0.4 0.5\n"
    "center2 = 1.5 1.4\n"
    "width = 0.11\n"
    "weight = 0.6\n"
    "\n"
    "[velocity]\n"
    "preset = rotation\n"
    "center = 1 1\n"
    "omega = 0.5   ; trailing comment\n"
    "\n"
    "[solver]\n"
    "order = 1\n"
    "horizon = 0.25\n"
    "tau = 2e-3\n"
    "seed = 7\n"
    "frame-stride = 10\n"
    "record-pressure = true\n"
    "step-check = off\n"
    "cfl-number = 0.8\n";

}  // namespace

TEST_CASE("minimal scenario fills defaults") {
  const Scenario s = parseScenario(kMinimal);
  CHECK(s.grid == Grid::line(2.0, 32));
  CHECK(s.initial.kind == DensityKind::uniform);
  CHECK(s.velocity.kind == VelocityKind::zero);
  CHECK(s.solver.order == 0);
  CHECK(s.solver.horizon == 1.0);
  CHECK(s.solver.tau == 1e-3);
  CHECK(s.solver.frameStride == 1);
  CHECK(s.solver.config == SolverConfig::defaults());
}

TEST_CASE("full scenario parses every section") {
  const Scenario s = parseScenario(kFull);
  CHECK(s.grid == Grid::box(2.0, 2.0, 16, 16));
  CHECK(s.initial.kind == DensityKind::twoBumps);
  CHECK(s.initial.center == std::array<double, 2>{0.4, 0.5});
  CHECK(s.initial.weight == 0.6);
  CHECK(s.velocity.kind == VelocityKind::rotation);
  CHECK(s.velocity.omega == 0.5);
  CHECK(s.solver.order == 1);
  CHECK(s.solver.seed == 7);
  CHECK(s.solver.recordPressure);
  CHECK(s.solver.config.stepDistanceCheck == StepDistanceCheck::off);
  CHECK(s.solver.config.cflNumber == 0.8);
}

TEST_CASE("serialize then parse is the identity") {
  for (const char* text : {kMinimal, kFull}) {
    const Scenario s = parseScenario(text);
    const Scenario back = parseScenario(serializeScenario(s));
    CHECK(back == s);
  }
}

TEST_CASE("parsing is fail-closed") {
  // Unknown key.
  CHECK_THROWS_AS(parseScenario(std::string(kMinimal) + "speed = 3\n"), InputError);
  // Unknown section.
  CHECK_THROWS_AS(parseScenario(std::string(kMinimal) + "[extra]\nx = 1\n"), InputError);
  // Duplicate key.
  CHECK_THROWS_AS(parseScenario(std::string(kMinimal) + "[solver]\ntau = 1e-3\ntau = 2e-3\n"),
                  InputError);
  // Key outside any section.
  CHECK_THROWS_AS(parseScenario(std::string("dim = 1\n") + kMinimal), InputError);
  // Malformed number.
  CHECK_THROWS_AS(parseScenario(std::string(kMinimal) + "[solver]\ntau = fast\n"), InputError);
  // Unknown preset.
  CHECK_THROWS_AS(parseScenario(
                      "[grid]\ndim = 1\nlength = 2\ncells = 32\n"
                      "[initial]\npreset = spiral\n[velocity]\npreset = zero\n"),
                  InputError);
  // Missing required section.
  CHECK_THROWS_AS(parseScenario("[grid]\ndim = 1\nlength = 2\ncells = 32\n"), InputError);
  // Line with no equals sign.
  CHECK_THROWS_AS(parseScenario(std::string(kMinimal) + "[solver]\ntau\n"), InputError);
}

TEST_CASE("validation rejects out-of-range values") {
  CHECK_THROWS_AS(parseScenario(std::string(kMinimal) + "[solver]\norder = 2\n"), InputError);
  CHECK_THROWS_AS(parseScenario(std::string(kMinimal) + "[solver]\ntau = 0\n"), InputError);
  CHECK_THROWS_AS(parseScenario(std::string(kMinimal) + "[solver]\nhorizon = -1\n"), InputError);
  CHECK_THROWS_AS(parseScenario(std::string(kMinimal) + "[solver]\nframe-stride = 0\n"),
                  InputError);
  CHECK_THROWS_AS(parseScenario(std::string(kMinimal) + "[solver]\nstep-check = sometimes\n"),
                  InputError);
  // 1D grid with a 2D length list.
  CHECK_THROWS_AS(parseScenario(
                      "[grid]\ndim = 1\nlength = 2 2\ncells = 32\n"
                      "[initial]\npreset = uniform\n[velocity]\npreset = zero\n"),
                  InputError);
}

TEST_CASE("overrides replace values before validation") {
  const Scenario s = parseScenario(kMinimal, {{"solver.tau", "5e-4"}, {"grid.cells", "64"}});
  CHECK(s.solver.tau == 5e-4);
  CHECK(s.grid.cellCount() == 64);
  // An override can fix an otherwise invalid file.
  const Scenario fixed =
      parseScenario(std::string(kMinimal) + "[solver]\ntau = 0\n", {{"solver.tau", "1e-3"}});
  CHECK(fixed.solver.tau == 1e-3);
  // Bad override key is an error.
  CHECK_THROWS_AS(parseScenario(kMinimal, {{"solver.speed", "1"}}), InputError);
  CHECK_THROWS_AS(parseScenario(kMinimal, {{"tau", "1"}}), InputError);
}

TEST_CASE("loadScenario reports missing files") {
  CHECK_THROWS_AS(loadScenario("/nonexistent/path.cfg"), InputError);
}

TEST_CASE("shipped scenarios parse and round trip") {
  const std::filesystem::path dir = CROWD_SCENARIO_DIR;
  REQUIRE(std::filesystem::exists(dir));
  int count = 0;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() != ".cfg") continue;
    ++count;
    CAPTURE(entry.path().string());
    const Scenario s = loadScenario(entry.path().string());
    CHECK(parseScenario(serializeScenario(s)) == s);
    CHECK(s.grid.volume() > 1.0);
  }
  CHECK(count >= 8);
}

TEST_CASE("inline table specs have no file form") {
  Scenario s = parseScenario(kMinimal);
  s.initial.kind = DensityKind::table;
  s.initial.tableValues = std::vector<double>(32, 0.5);
  CHECK_THROWS_AS(serializeScenario(s), InputError);
}
