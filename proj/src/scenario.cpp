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

#include "crowd/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "crowd/errors.hpp"
#include "crowd/io.hpp"

namespace crowd {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double toDouble(const std::string& s, const std::string& where) {
  const std::string t = trim(s);
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size()) {
    throw InputError("scenario: bad number for " + where + ": '" + s + "'");
  }
  return v;
}

long long toInt(const std::string& s, const std::string& where) {
  const std::string t = trim(s);
  char* end = nullptr;
  const long long v = std::strtoll(t.c_str(), &end, 10);
  if (t.empty() || end != t.c_str() + t.size()) {
    throw InputError("scenario: bad integer for " + where + ": '" + s + "'");
  }
  return v;
}

bool toBool(const std::string& s, const std::string& where) {
  const std::string t = trim(s);
  if (t == "true" || t == "1") return true;
  if (t == "false" || t == "0") return false;
  throw InputError("scenario: bad boolean for " + where + ": '" + s + "'");
}

std::array<double, 2> toVec(const std::string& s, const std::string& where, int dim) {
  std::istringstream in(trim(s));
  std::vector<double> parts;
  std::string tok;
  while (in >> tok) parts.push_back(toDouble(tok, where));
  if (static_cast<int>(parts.size()) != dim) {
    throw InputError("scenario: " + where + " needs exactly " + std::to_string(dim) +
                     (dim == 1 ? " number" : " numbers") + " in " + std::to_string(dim) +
                     "D, got '" + s + "'");
  }
  return {parts[0], dim == 2 ? parts[1] : 0.0};
}

std::array<long long, 2> toIVec(const std::string& s, const std::string& where, int dim) {
  std::istringstream in(trim(s));
  std::vector<long long> parts;
  std::string tok;
  while (in >> tok) parts.push_back(toInt(tok, where));
  if (static_cast<int>(parts.size()) != dim) {
    throw InputError("scenario: " + where + " needs exactly " + std::to_string(dim) +
                     (dim == 1 ? " integer" : " integers") + " in " + std::to_string(dim) +
                     "D, got '" + s + "'");
  }
  return {parts[0], dim == 2 ? parts[1] : 1};
}

/// Key-value store with consumption tracking so leftovers can be rejected.
class KeyTable {
 public:
  void insert(const std::string& section, const std::string& key, const std::string& value) {
    const std::string full = section + "." + key;
    if (entries_.count(full)) throw InputError("scenario: duplicate key " + full);
    entries_[full] = value;
  }

  /// Overrides may add or replace keys without tripping duplicate detection.
  void replace(const std::string& full, const std::string& value) { entries_[full] = value; }

  bool has(const std::string& full) const { return entries_.count(full) > 0; }

  /// Returns the value and marks it used; empty optional when absent.
  const std::string* take(const std::string& full) {
    auto it = entries_.find(full);
    if (it == entries_.end()) return nullptr;
    used_.insert(full);
    return &it->second;
  }

  void requireAllUsed() const {
    for (const auto& [k, v] : entries_) {
      if (!used_.count(k)) throw InputError("scenario: unknown key " + k);
    }
  }

 private:
  std::map<std::string, std::string> entries_;
  std::set<std::string> used_;
};

const std::set<std::string> kSections = {"grid", "initial", "velocity", "solver"};

// A ';' or '#' at the start of a line or preceded by whitespace begins a
// comment. Mid-token they stay literal, so "table = ux.csv;uy.csv" survives.
std::string stripComment(const std::string& line) {
  for (std::size_t k = 0; k < line.size(); ++k) {
    if ((line[k] == ';' || line[k] == '#') &&
        (k == 0 || std::isspace(static_cast<unsigned char>(line[k - 1])))) {
      return line.substr(0, k);
    }
  }
  return line;
}

KeyTable tabulate(const std::string& text, const std::map<std::string, std::string>& overrides) {
  KeyTable table;
  std::istringstream in(text);
  std::string line, section;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    const std::string t = trim(stripComment(line));
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw InputError("scenario line " + std::to_string(lineNo) + ": bad section header");
      section = trim(t.substr(1, t.size() - 2));
      if (!kSections.count(section)) {
        throw InputError("scenario line " + std::to_string(lineNo) + ": unknown section [" + section + "]");
      }
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw InputError("scenario line " + std::to_string(lineNo) + ": expected key = value");
    }
    if (section.empty()) {
      throw InputError("scenario line " + std::to_string(lineNo) + ": key before any [section]");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw InputError("scenario line " + std::to_string(lineNo) + ": empty key or value");
    }
    table.insert(section, key, value);
  }
  for (const auto& [full, value] : overrides) {
    const auto dot = full.find('.');
    if (dot == std::string::npos || !kSections.count(full.substr(0, dot))) {
      throw InputError("override must look like section.key: " + full);
    }
    // Overrides may replace existing keys, so bypass duplicate detection.
    table.replace(full, value);
  }
  return table;
}

DensityKind densityKindOf(const std::string& s) {
  if (s == "uniform") return DensityKind::uniform;
  if (s == "bump") return DensityKind::bump;
  if (s == "two-bumps") return DensityKind::twoBumps;
  if (s == "box" || s == "indicator") return DensityKind::box;
  if (s == "table") return DensityKind::table;
  throw InputError("scenario: unknown density preset '" + s + "'");
}

std::string densityKindName(DensityKind k) {
  switch (k) {
    case DensityKind::uniform: return "uniform";
    case DensityKind::bump: return "bump";
    case DensityKind::twoBumps: return "two-bumps";
    case DensityKind::box: return "box";
    case DensityKind::table: return "table";
  }
  return "?";
}

VelocityKind velocityKindOf(const std::string& s) {
  if (s == "zero") return VelocityKind::zero;
  if (s == "constant") return VelocityKind::constant;
  if (s == "toward-point") return VelocityKind::towardPoint;
  if (s == "rotation") return VelocityKind::rotation;
  if (s == "piecewise") return VelocityKind::piecewise;
  if (s == "table") return VelocityKind::table;
  throw InputError("scenario: unknown velocity preset '" + s + "'");
}

std::string velocityKindName(VelocityKind k) {
  switch (k) {
    case VelocityKind::zero: return "zero";
    case VelocityKind::constant: return "constant";
    case VelocityKind::towardPoint: return "toward-point";
    case VelocityKind::rotation: return "rotation";
    case VelocityKind::piecewise: return "piecewise";
    case VelocityKind::table: return "table";
  }
  return "?";
}

StepDistanceCheck stepCheckOf(const std::string& s) {
  if (s == "off") return StepDistanceCheck::off;
  if (s == "frames") return StepDistanceCheck::frames;
  if (s == "all") return StepDistanceCheck::all;
  throw InputError("scenario: step-check must be off, frames or all, got '" + s + "'");
}

std::string stepCheckName(StepDistanceCheck c) {
  switch (c) {
    case StepDistanceCheck::off: return "off";
    case StepDistanceCheck::frames: return "frames";
    case StepDistanceCheck::all: return "all";
  }
  return "?";
}

std::string vecText(const Grid& grid, std::array<double, 2> v) {
  std::string s = formatDouble(v[0]);
  if (grid.dim() == 2) s += " " + formatDouble(v[1]);
  return s;
}

}  // namespace

Scenario parseScenario(const std::string& text,
                       const std::map<std::string, std::string>& overrides) {
  KeyTable t = tabulate(text, overrides);

  auto need = [&t](const std::string& full) -> const std::string& {
    const std::string* v = t.take(full);
    if (!v) throw InputError("scenario: missing required key " + full);
    return *v;
  };
  auto optional = [&t](const std::string& full) { return t.take(full); };

  // [grid]
  const int dim = static_cast<int>(toInt(need("grid.dim"), "grid.dim"));
  if (dim != 1 && dim != 2) throw InputError("scenario: grid.dim must be 1 or 2");
  const auto lengths = toVec(need("grid.length"), "grid.length", dim);
  const auto cells = toIVec(need("grid.cells"), "grid.cells", dim);
  Grid grid(dim, {lengths[0], dim == 2 ? lengths[1] : 0.0},
            {static_cast<int>(cells[0]), static_cast<int>(dim == 2 ? cells[1] : 1)});

  // [initial]
  DensitySpec initial;
  initial.kind = densityKindOf(need("initial.preset"));
  if (const auto* v = optional("initial.center")) initial.center = toVec(*v, "initial.center", dim);
  if (const auto* v = optional("initial.center2")) initial.center2 = toVec(*v, "initial.center2", dim);
  if (const auto* v = optional("initial.width")) initial.width = toDouble(*v, "initial.width");
  if (const auto* v = optional("initial.weight")) initial.weight = toDouble(*v, "initial.weight");
  if (const auto* v = optional("initial.box-lo")) initial.boxLo = toVec(*v, "initial.box-lo", dim);
  if (const auto* v = optional("initial.box-hi")) initial.boxHi = toVec(*v, "initial.box-hi", dim);
  if (const auto* v = optional("initial.table")) initial.tablePath = *v;
  if (initial.kind == DensityKind::table && initial.tablePath.empty()) {
    throw InputError("scenario: initial.table path required for the table preset");
  }

  // [velocity]
  VelocitySpec velocity;
  velocity.kind = velocityKindOf(need("velocity.preset"));
  if (const auto* v = optional("velocity.value")) velocity.value = toVec(*v, "velocity.value", dim);
  if (const auto* v = optional("velocity.center")) velocity.center = toVec(*v, "velocity.center", dim);
  if (const auto* v = optional("velocity.strength")) velocity.strength = toDouble(*v, "velocity.strength");
  if (const auto* v = optional("velocity.omega")) velocity.omega = toDouble(*v, "velocity.omega");
  if (const auto* v = optional("velocity.threshold")) velocity.threshold = toDouble(*v, "velocity.threshold");
  if (const auto* v = optional("velocity.left")) velocity.left = toVec(*v, "velocity.left", dim);
  if (const auto* v = optional("velocity.right")) velocity.right = toVec(*v, "velocity.right", dim);
  if (const auto* v = optional("velocity.table")) velocity.tablePath = *v;
  if (velocity.kind == VelocityKind::table && velocity.tablePath.empty()) {
    throw InputError("scenario: velocity.table path required for the table preset");
  }
  // In 1D the second component of every vector field is dead weight; pin it
  // so equal scenarios compare equal and serialization round-trips.
  if (dim == 1) {
    for (auto* v : {&initial.center, &initial.center2, &initial.boxLo, &initial.boxHi,
                    &velocity.value, &velocity.center, &velocity.left, &velocity.right}) {
      (*v)[1] = 0.0;
    }
  }

  // [solver]
  ScenarioSolver solver;
  if (const auto* v = optional("solver.order")) {
    solver.order = static_cast<int>(toInt(*v, "solver.order"));
    if (solver.order != 0 && solver.order != 1) throw InputError("scenario: solver.order must be 0 or 1");
  }
  if (const auto* v = optional("solver.horizon")) solver.horizon = toDouble(*v, "solver.horizon");
  if (const auto* v = optional("solver.tau")) solver.tau = toDouble(*v, "solver.tau");
  if (const auto* v = optional("solver.seed")) solver.seed = static_cast<std::uint64_t>(toInt(*v, "solver.seed"));
  if (const auto* v = optional("solver.frame-stride")) {
    solver.frameStride = static_cast<int>(toInt(*v, "solver.frame-stride"));
    if (solver.frameStride < 1) throw InputError("scenario: solver.frame-stride must be >= 1");
  }
  if (const auto* v = optional("solver.record-pressure")) {
    solver.recordPressure = toBool(*v, "solver.record-pressure");
  }
  if (const auto* v = optional("solver.step-check")) solver.config.stepDistanceCheck = stepCheckOf(*v);
  if (!(solver.horizon > 0.0)) throw InputError("scenario: solver.horizon must be positive");
  if (!(solver.tau > 0.0)) throw InputError("scenario: solver.tau must be positive");

  SolverConfig& c = solver.config;
  if (const auto* v = optional("solver.constraint-tolerance")) c.constraintTolerance = toDouble(*v, "solver.constraint-tolerance");
  if (const auto* v = optional("solver.saturation-threshold")) c.saturationThreshold = toDouble(*v, "solver.saturation-threshold");
  if (const auto* v = optional("solver.lp-cell-product-cap")) c.lpCellProductCap = toInt(*v, "solver.lp-cell-product-cap");
  if (const auto* v = optional("solver.sinkhorn-epsilon-factor")) c.sinkhornEpsilonFactor = toDouble(*v, "solver.sinkhorn-epsilon-factor");
  if (const auto* v = optional("solver.sinkhorn-max-iterations")) c.sinkhornMaxIterations = static_cast<int>(toInt(*v, "solver.sinkhorn-max-iterations"));
  if (const auto* v = optional("solver.cone-gradient-factor")) c.coneGradientFactor = toDouble(*v, "solver.cone-gradient-factor");
  if (const auto* v = optional("solver.cone-max-iterations")) c.coneMaxIterations = static_cast<int>(toInt(*v, "solver.cone-max-iterations"));
  if (const auto* v = optional("solver.cfl-number")) c.cflNumber = toDouble(*v, "solver.cfl-number");
  if (const auto* v = optional("solver.w2-slack-fraction")) c.w2SlackFraction = toDouble(*v, "solver.w2-slack-fraction");
  if (const auto* v = optional("solver.l1-slack-fraction")) c.l1SlackFraction = toDouble(*v, "solver.l1-slack-fraction");
  if (const auto* v = optional("solver.mass-drift-tolerance")) c.massDriftTolerance = toDouble(*v, "solver.mass-drift-tolerance");

  t.requireAllUsed();
  return Scenario{grid, initial, velocity, solver};
}

Scenario loadScenario(const std::string& path,
                      const std::map<std::string, std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parseScenario(buf.str(), overrides);
}

std::string serializeScenario(const Scenario& s) {
  if (!s.initial.tableValues.empty() || !s.velocity.tableValues[0].empty()) {
    throw InputError("serializeScenario: inline table values have no file form");
  }
  const Grid& g = s.grid;
  std::string out;
  out += "[grid]\n";
  out += "dim = " + std::to_string(g.dim()) + "\n";
  out += "length = " + formatDouble(g.lengthX()) + (g.dim() == 2 ? " " + formatDouble(g.lengthY()) : "") + "\n";
  out += "cells = " + std::to_string(g.nx()) + (g.dim() == 2 ? " " + std::to_string(g.ny()) : "") + "\n";

  out += "\n[initial]\n";
  out += "preset = " + densityKindName(s.initial.kind) + "\n";
  out += "center = " + vecText(g, s.initial.center) + "\n";
  out += "center2 = " + vecText(g, s.initial.center2) + "\n";
  out += "width = " + formatDouble(s.initial.width) + "\n";
  out += "weight = " + formatDouble(s.initial.weight) + "\n";
  out += "box-lo = " + vecText(g, s.initial.boxLo) + "\n";
  out += "box-hi = " + vecText(g, s.initial.boxHi) + "\n";
  if (!s.initial.tablePath.empty()) out += "table = " + s.initial.tablePath + "\n";

  out += "\n[velocity]\n";
  out += "preset = " + velocityKindName(s.velocity.kind) + "\n";
  out += "value = " + vecText(g, s.velocity.value) + "\n";
  out += "center = " + vecText(g, s.velocity.center) + "\n";
  out += "strength = " + formatDouble(s.velocity.strength) + "\n";
  out += "omega = " + formatDouble(s.velocity.omega) + "\n";
  out += "threshold = " + formatDouble(s.velocity.threshold) + "\n";
  out += "left = " + vecText(g, s.velocity.left) + "\n";
  out += "right = " + vecText(g, s.velocity.right) + "\n";
  if (!s.velocity.tablePath.empty()) out += "table = " + s.velocity.tablePath + "\n";

  const ScenarioSolver& sv = s.solver;
  const SolverConfig& c = sv.config;
  out += "\n[solver]\n";
  out += "order = " + std::to_string(sv.order) + "\n";
  out += "horizon = " + formatDouble(sv.horizon) + "\n";
  out += "tau = " + formatDouble(sv.tau) + "\n";
  out += "seed = " + std::to_string(sv.seed) + "\n";
  out += "frame-stride = " + std::to_string(sv.frameStride) + "\n";
  out += std::string("record-pressure = ") + (sv.recordPressure ? "true" : "false") + "\n";
  out += "step-check = " + stepCheckName(c.stepDistanceCheck) + "\n";
  out += "constraint-tolerance = " + formatDouble(c.constraintTolerance) + "\n";
  out += "saturation-threshold = " + formatDouble(c.saturationThreshold) + "\n";
  out += "lp-cell-product-cap = " + std::to_string(c.lpCellProductCap) + "\n";
  out += "sinkhorn-epsilon-factor = " + formatDouble(c.sinkhornEpsilonFactor) + "\n";
  out += "sinkhorn-max-iterations = " + std::to_string(c.sinkhornMaxIterations) + "\n";
  out += "cone-gradient-factor = " + formatDouble(c.coneGradientFactor) + "\n";
  out += "cone-max-iterations = " + std::to_string(c.coneMaxIterations) + "\n";
  out += "cfl-number = " + formatDouble(c.cflNumber) + "\n";
  out += "w2-slack-fraction = " + formatDouble(c.w2SlackFraction) + "\n";
  out += "l1-slack-fraction = " + formatDouble(c.l1SlackFraction) + "\n";
  out += "mass-drift-tolerance = " + formatDouble(c.massDriftTolerance) + "\n";
  return out;
}

}  // namespace crowd
