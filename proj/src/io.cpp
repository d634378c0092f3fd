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

#include "crowd/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "crowd/errors.hpp"

namespace crowd {

namespace fs = std::filesystem;

void atomicWriteText(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw SolveError("cannot open for writing: " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw SolveError("short write: " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string formatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fieldCsv(const Grid& grid, const std::vector<double>& values, double time) {
  if (static_cast<int>(values.size()) != grid.cellCount()) throw InputError("fieldCsv: size mismatch");
  std::string out = "# grid " + std::to_string(grid.dim()) + " " + std::to_string(grid.nx());
  if (grid.dim() == 2) out += " " + std::to_string(grid.ny());
  out += " " + formatDouble(grid.h()) + " " + formatDouble(time) + "\n";
  if (grid.dim() == 1) {
    for (double v : values) {
      out += formatDouble(v);
      out += "\n";
    }
  } else {
    for (int iy = 0; iy < grid.ny(); ++iy) {
      for (int ix = 0; ix < grid.nx(); ++ix) {
        out += formatDouble(values[grid.index(ix, iy)]);
        out += ix + 1 < grid.nx() ? "," : "\n";
      }
    }
  }
  return out;
}

void writeFieldCsv(const std::string& path, const Grid& grid, const std::vector<double>& values,
                   double time) {
  atomicWriteText(path, fieldCsv(grid, values, time));
}

std::vector<double> readFieldCsv(const std::string& path, const Grid& grid) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open field file: " + path);
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(grid.cellCount()));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double v;
    while (row >> v) values.push_back(v);
    row.clear();
    std::string trailing;
    if (row >> trailing) throw InputError("bad token in field file " + path + ": " + trailing);
  }
  if (static_cast<int>(values.size()) != grid.cellCount()) {
    throw InputError("field file " + path + " has " + std::to_string(values.size()) +
                     " values, grid needs " + std::to_string(grid.cellCount()));
  }
  return values;
}

void writePgm(const std::string& path, const Grid& grid, const std::vector<double>& values) {
  if (static_cast<int>(values.size()) != grid.cellCount()) throw InputError("writePgm: size mismatch");
  std::string out = "P5\n" + std::to_string(grid.nx()) + " " + std::to_string(grid.ny()) + "\n255\n";
  out.reserve(out.size() + values.size());
  // Image row 0 is the top of the domain, so flip the y axis.
  for (int iy = grid.ny() - 1; iy >= 0; --iy) {
    for (int ix = 0; ix < grid.nx(); ++ix) {
      const double v = std::clamp(values[grid.index(ix, iy)], 0.0, 1.0);
      out += static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * v)));
    }
  }
  atomicWriteText(path, out);
}

}  // namespace crowd
