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

#include <string>
#include <vector>

#include "crowd/grid.hpp"

namespace crowd {

/// All writers are atomic: content goes to a temp file in the target
/// directory which is then renamed over the destination, so readers never
/// observe a half-written artifact. Numbers are printed with %.17g and
/// nothing time- or host-dependent is emitted, so identical inputs produce
/// byte-identical files.
void atomicWriteText(const std::string& path, const std::string& content);

std::string formatDouble(double v);

/// Cell field as CSV. First line is "# grid <dim> <nx> [<ny>] <h> <time>",
/// then ny rows of nx comma-separated values (1D: one value per line).
std::string fieldCsv(const Grid& grid, const std::vector<double>& values, double time);
void writeFieldCsv(const std::string& path, const Grid& grid, const std::vector<double>& values,
                   double time);

/// Reads the layout written by writeFieldCsv. The header is optional; the
/// token count must match the grid.
std::vector<double> readFieldCsv(const std::string& path, const Grid& grid);

/// Binary PGM (P5) snapshot: gray = round(255 * clamp(rho, 0, 1)), row 0 at
/// the top. 1D fields become a single-row image.
void writePgm(const std::string& path, const Grid& grid, const std::vector<double>& values);

}  // namespace crowd
