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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "crowd/errors.hpp"
#include "crowd/fields.hpp"
#include "crowd/grid.hpp"
#include "crowd/io.hpp"
#include "crowd/operators.hpp"
#include "crowd/presets.hpp"

using namespace crowd;

namespace {

std::vector<double> randomVector(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = d(rng);
  return v;
}

std::vector<double> normalized(const Grid& g, std::vector<double> v) {
  const double m = totalMass(g, v);
  for (double& x : v) x /= m;
  return v;
}

std::filesystem::path tempFile(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "crowd_core_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("grid geometry and indexing") {
  const Grid g1 = Grid::line(2.0, 64);
  CHECK(g1.dim() == 1);
  CHECK(g1.nx() == 64);
  CHECK(g1.ny() == 1);
  CHECK(g1.h() == doctest::Approx(2.0 / 64).epsilon(1e-15));
  CHECK(g1.cellVolume() == doctest::Approx(g1.h()).epsilon(1e-15));
  CHECK(g1.volume() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(g1.diameter() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(g1.center(0)[0] == doctest::Approx(g1.h() / 2).epsilon(1e-15));
  CHECK(g1.center(0)[1] == 0.0);
  CHECK(g1.center(63)[0] == doctest::Approx(2.0 - g1.h() / 2).epsilon(1e-15));

  const Grid g2 = Grid::box(2.0, 3.0, 8, 12);  // square cells of side 0.25
  CHECK(g2.dim() == 2);
  CHECK(g2.h() == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(g2.cellCount() == 96);
  CHECK(g2.volume() == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(g2.diameter() == doctest::Approx(std::hypot(2.0, 3.0)).epsilon(1e-15));
  for (int iy = 0; iy < g2.ny(); ++iy) {
    for (int ix = 0; ix < g2.nx(); ++ix) {
      const int idx = g2.index(ix, iy);
      CHECK(g2.ix(idx) == ix);
      CHECK(g2.iy(idx) == iy);
    }
  }
  CHECK(g1 == Grid::line(2.0, 64));
  CHECK(g1 != g2);
}

TEST_CASE("grid rejects shapes that cannot hold unit mass or are not square") {
  CHECK_THROWS_AS(Grid::line(1.0, 10), InputError);   // volume exactly 1
  CHECK_THROWS_AS(Grid::line(0.5, 10), InputError);
  CHECK_THROWS_AS(Grid::box(2.0, 3.0, 8, 8), InputError);  // 0.25 vs 0.375 cells
  CHECK_THROWS_AS(Grid::line(2.0, 0), InputError);
  CHECK_THROWS_AS(Grid(3, {2.0, 2.0}, {4, 4}), InputError);
}

TEST_CASE("density field validates input and reports stats") {
  const Grid g = Grid::line(2.0, 32);
  std::vector<double> vals(32, 0.5);  // uniform, mass 1
  const DensityField rho(g, vals);
  CHECK(rho.mass() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rho.maxValue() == 0.5);
  CHECK(rho.feasible(0.0));
  CHECK(rho.size() == 32);
  CHECK(rho[7] == 0.5);

  vals[3] = -0.1;
  CHECK_THROWS_AS(DensityField(g, vals), InputError);
  vals[3] = 0.5;
  vals[4] = std::nan("");
  CHECK_THROWS_AS(DensityField(g, vals), InputError);
  CHECK_THROWS_AS(DensityField(g, std::vector<double>(32, 0.6)), InputError);  // mass 1.2
  CHECK_THROWS_AS(DensityField(g, std::vector<double>(31, 0.5)), InputError);  // wrong size

  std::vector<double> tall(32, 0.0);
  tall[10] = 1.0 / g.cellVolume();  // mass 1 in one cell, far above the cap
  const DensityField spike(g, tall);
  CHECK_FALSE(spike.feasible(1e-6));
}

TEST_CASE("velocity field norms and component access") {
  const Grid g = Grid::line(2.0, 16);
  std::mt19937_64 rng(11);
  const auto ux = randomVector(rng, 16, -2.0, 2.0);
  const VelocityField u(g, 0.25, ux);
  CHECK(u.time() == 0.25);
  double linf = 0.0, l2sq = 0.0;
  for (double x : ux) {
    linf = std::max(linf, std::abs(x));
    l2sq += x * x * g.cellVolume();
  }
  CHECK(u.linf() == doctest::Approx(linf).epsilon(1e-15));
  CHECK(u.l2Squared() == doctest::Approx(l2sq).epsilon(1e-14));
  CHECK(u.at(5)[0] == ux[5]);
  CHECK(u.at(5)[1] == 0.0);

  const Grid g2 = Grid::box(2.0, 2.0, 4, 4);
  CHECK_THROWS_AS(VelocityField(g2, 0.0, std::vector<double>(16, 0.0)), InputError);  // missing uy
}

TEST_CASE("pressure complementarity residual") {
  const Grid g = Grid::line(2.0, 4);
  const DensityField rho(g, {1.0, 0.2, 0.5, 0.3});  // mass = 2*h = 1
  const PressureField p(g, {2.0, 3.0, 0.0, 1.0});
  // max of p * (1 - rho)+: 3 * 0.8 = 2.4 at the second cell.
  CHECK(p.complementarityResidual(rho, 0.0) == doctest::Approx(2.4).epsilon(1e-14));
  CHECK(p.maxValue() == 3.0);
  CHECK_THROWS_AS(PressureField(g, {1.0, -0.5, 0.0, 0.0}), InputError);
}

TEST_CASE("gradient matches hand-computed forward differences") {
  const Grid g = Grid::line(2.0, 4);  // h = 0.5
  const auto grad = gradient(g, {1.0, 3.0, 2.0, 5.0});
  CHECK(grad[0][0] == doctest::Approx(4.0));
  CHECK(grad[0][1] == doctest::Approx(-2.0));
  CHECK(grad[0][2] == doctest::Approx(6.0));
  CHECK(grad[0][3] == 0.0);  // zero closure at the wall
  CHECK(grad[1].empty());

  const Grid b = Grid::box(2.0, 2.0, 2, 2);  // h = 1, cells a b / c d
  const auto gb = gradient(b, {1.0, 4.0, 2.0, 8.0});
  CHECK(gb[0][0] == doctest::Approx(3.0));   // b - a
  CHECK(gb[0][1] == 0.0);
  CHECK(gb[0][2] == doctest::Approx(6.0));   // d - c
  CHECK(gb[0][3] == 0.0);
  CHECK(gb[1][0] == doctest::Approx(1.0));   // c - a
  CHECK(gb[1][1] == doctest::Approx(4.0));   // d - b
  CHECK(gb[1][2] == 0.0);
  CHECK(gb[1][3] == 0.0);
}

TEST_CASE("divergence is the exact negative adjoint of the gradient") {
  std::mt19937_64 rng(2024);
  for (const Grid& g : {Grid::line(2.0, 33), Grid::box(2.0, 2.0, 9, 9)}) {
    for (int trial = 0; trial < 20; ++trial) {
      const int n = g.cellCount();
      const auto p = randomVector(rng, n, -3.0, 3.0);
      std::array<std::vector<double>, 2> w;
      w[0] = randomVector(rng, n, -2.0, 2.0);
      if (g.dim() == 2) w[1] = randomVector(rng, n, -2.0, 2.0);
      const double lhs = dotVector(g, gradient(g, p), w);
      const double rhs = -dotScalar(g, p, divergence(g, w));
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
  }
}

TEST_CASE("neumann laplacian is symmetric, conservative and nonpositive") {
  std::mt19937_64 rng(7);
  for (const Grid& g : {Grid::line(2.0, 17), Grid::box(2.0, 2.0, 6, 6)}) {
    const int n = g.cellCount();
    const auto constant = neumannLaplacian(g, std::vector<double>(n, 3.7));
    for (double v : constant) CHECK(std::abs(v) < 1e-13);
    for (int trial = 0; trial < 10; ++trial) {
      const auto p = randomVector(rng, n, -1.0, 1.0);
      const auto q = randomVector(rng, n, -1.0, 1.0);
      const auto Lp = neumannLaplacian(g, p);
      const auto Lq = neumannLaplacian(g, q);
      CHECK(dotScalar(g, Lp, q) == doctest::Approx(dotScalar(g, p, Lq)).epsilon(1e-10));
      double sum = 0.0;
      for (double v : Lp) sum += v * g.cellVolume();
      CHECK(std::abs(sum) < 1e-10);                  // implicit diffusion conserves mass
      CHECK(dotScalar(g, Lp, p) <= 1e-12);           // negative semidefinite
    }
  }
}

TEST_CASE("density presets normalize to unit mass and keep their shape") {
  const Grid g = Grid::line(2.0, 64);

  DensitySpec uniform;
  const DensityField u = makeDensity(g, uniform);
  CHECK(u.mass() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(u.maxValue() == doctest::Approx(0.5).epsilon(1e-13));

  DensitySpec bump;
  bump.kind = DensityKind::bump;
  bump.center = {0.5, 0.0};
  bump.width = 0.12;
  const DensityField b = makeDensity(g, bump);
  CHECK(b.mass() == doctest::Approx(1.0).epsilon(1e-13));
  const int peak = static_cast<int>(std::max_element(b.values().begin(), b.values().end()) -
                                    b.values().begin());
  CHECK(std::abs(g.center(peak)[0] - 0.5) <= g.h());

  DensitySpec two;
  two.kind = DensityKind::twoBumps;
  two.center = {0.4, 0.0};
  two.center2 = {1.5, 0.0};
  two.width = 0.1;
  two.weight = 0.7;
  const DensityField t = makeDensity(g, two);
  CHECK(t.mass() == doctest::Approx(1.0).epsilon(1e-13));
  double leftMass = 0.0;
  for (int i = 0; i < g.cellCount(); ++i) {
    if (g.center(i)[0] < 1.0) leftMass += t[i] * g.cellVolume();
  }
  CHECK(leftMass == doctest::Approx(0.7).epsilon(0.02));

  DensitySpec box;
  box.kind = DensityKind::box;
  box.boxLo = {0.25, 0.0};
  box.boxHi = {0.75, 0.0};
  const DensityField bx = makeDensity(g, box);
  CHECK(bx.mass() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(bx[0] == 0.0);
  CHECK(bx[g.cellCount() - 1] == 0.0);
  const int mid = static_cast<int>(0.5 / g.h());
  CHECK(bx[mid] == doctest::Approx(2.0).epsilon(1e-12));  // mass 1 over length 0.5

  DensitySpec table;
  table.kind = DensityKind::table;
  table.tableValues = std::vector<double>(64, 0.0);
  table.tableValues[10] = 4.0;
  table.tableValues[11] = 4.0;
  const DensityField tab = makeDensity(g, table);
  CHECK(tab.mass() == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(tab[10] == doctest::Approx(tab[11]).epsilon(1e-14));
  CHECK(tab[12] == 0.0);

  table.tableValues[10] = -1.0;
  CHECK_THROWS_AS(makeDensity(g, table), InputError);
  table.tableValues = std::vector<double>(63, 1.0);
  CHECK_THROWS_AS(makeDensity(g, table), InputError);
}

TEST_CASE("velocity presets evaluate consistently on and off the grid") {
  const Grid g = Grid::box(2.0, 2.0, 12, 12);

  VelocitySpec rot;
  rot.kind = VelocityKind::rotation;
  rot.center = {1.0, 1.0};
  rot.omega = 0.7;
  const VelocityField ur = sampleVelocity(g, rot, 0.0);
  for (int i = 0; i < g.cellCount(); i += 13) {
    const auto c = g.center(i);
    const auto v = evaluateVelocity(rot, c);
    CHECK(ur.at(i)[0] == doctest::Approx(v[0]).epsilon(1e-14));
    CHECK(ur.at(i)[1] == doctest::Approx(v[1]).epsilon(1e-14));
    // rigid rotation: u orthogonal to the radius
    const double radial = v[0] * (c[0] - 1.0) + v[1] * (c[1] - 1.0);
    CHECK(std::abs(radial) < 1e-13);
  }

  VelocitySpec toward;
  toward.kind = VelocityKind::towardPoint;
  toward.center = {0.5, 1.5};
  toward.strength = 1.3;
  const auto v = evaluateVelocity(toward, {1.5, 1.5});
  CHECK(v[0] == doctest::Approx(-1.3).epsilon(1e-14));
  CHECK(v[1] == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("analytic one-sided Lipschitz constants") {
  VelocitySpec s;
  s.kind = VelocityKind::towardPoint;
  s.strength = 1.3;
  CHECK(analyticLambda(s).value() == doctest::Approx(-1.3));
  s.kind = VelocityKind::rotation;
  CHECK(analyticLambda(s).value() == doctest::Approx(0.0));
  s.kind = VelocityKind::constant;
  CHECK(analyticLambda(s).value() == doctest::Approx(0.0));
  s.kind = VelocityKind::piecewise;
  s.left = {0.8, 0.0};
  s.right = {-0.6, 0.0};
  CHECK(analyticLambda(s).value() == doctest::Approx(0.0));  // compressive jump
  s.left = {-0.6, 0.0};
  s.right = {0.8, 0.0};
  CHECK_FALSE(analyticLambda(s).has_value());  // expansive jump has no finite constant
  s.kind = VelocityKind::table;
  CHECK_FALSE(analyticLambda(s).has_value());
}

TEST_CASE("random feasible densities are deterministic, feasible and saturated") {
  for (const Grid& g : {Grid::line(2.0, 64), Grid::box(2.0, 2.0, 16, 16)}) {
    const DensityField a = makeRandomFeasibleDensity(g, 42);
    const DensityField b = makeRandomFeasibleDensity(g, 42);
    CHECK(a.values() == b.values());
    CHECK(a.mass() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(a.maxValue() <= 1.0 + 1e-12);
    int saturatedCells = 0;
    for (double v : a.values()) {
      if (v >= 1.0 - 1e-9) ++saturatedCells;
    }
    CHECK(saturatedCells > 0);
    CHECK(a.values() != makeRandomFeasibleDensity(g, 43).values());

    RandomDensityOptions opts;
    opts.forceSaturation = false;
    const DensityField smooth = makeRandomFeasibleDensity(g, 42, opts);
    CHECK(smooth.maxValue() <= opts.backgroundCap + 1e-12);
  }
}

TEST_CASE("random velocities are deterministic with the requested scale") {
  const Grid g = Grid::line(2.0, 48);
  const VelocityField a = makeRandomVelocity(g, 9, 1.5);
  const VelocityField b = makeRandomVelocity(g, 9, 1.5);
  CHECK(a.comp(0) == b.comp(0));
  CHECK(a.linf() > 0.1);
  CHECK(a.linf() < 6.0);
  CHECK(a.comp(0) != makeRandomVelocity(g, 10, 1.5).comp(0));
}

TEST_CASE("test function gradients match finite differences") {
  std::mt19937_64 rng(31);
  for (const Grid& g : {Grid::line(2.0, 32), Grid::box(2.0, 2.0, 8, 8)}) {
    const auto fns = makeTestFunctions(g);
    CHECK(fns.size() >= 3);
    std::uniform_real_distribution<double> dx(0.1, g.lengthX() - 0.1);
    std::uniform_real_distribution<double> dy(0.1, g.dim() == 2 ? g.lengthY() - 0.1 : 0.1);
    const double step = 1e-6;
    for (const auto& f : fns) {
      for (int t = 0; t < 8; ++t) {
        const std::array<double, 2> x{dx(rng), g.dim() == 2 ? dy(rng) : 0.0};
        const auto grad = f.grad(x);
        for (int d = 0; d < g.dim(); ++d) {
          auto xp = x, xm = x;
          xp[d] += step;
          xm[d] -= step;
          const double fd = (f.value(xp) - f.value(xm)) / (2 * step);
          CHECK(grad[d] == doctest::Approx(fd).epsilon(1e-5));
        }
      }
    }
  }
}

TEST_CASE("field csv writes and reads back exactly") {
  const Grid g = Grid::box(2.0, 2.0, 5, 5);
  std::mt19937_64 rng(3);
  const auto vals = randomVector(rng, g.cellCount(), 0.0, 2.0);
  const auto path = tempFile("roundtrip.csv").string();
  writeFieldCsv(path, g, vals, 0.375);
  const auto back = readFieldCsv(path, g);
  CHECK(back == vals);  // %.17g round trip is exact

  const std::string text = fieldCsv(g, vals, 0.375);
  CHECK(text.rfind("# grid 2 5 5 ", 0) == 0);

  CHECK_THROWS_AS(readFieldCsv(path, Grid::line(2.0, 30)), InputError);
  std::filesystem::remove(path);
}

TEST_CASE("pgm snapshots have the right header and payload") {
  const Grid g = Grid::line(2.0, 8);
  const auto path = tempFile("snap.pgm").string();
  writePgm(path, g, std::vector<double>(8, 0.5));
  std::FILE* f = std::fopen(path.c_str(), "rb");
  REQUIRE(f != nullptr);
  char header[64] = {};
  REQUIRE(std::fgets(header, sizeof header, f) != nullptr);
  CHECK(std::string(header) == "P5\n");
  REQUIRE(std::fgets(header, sizeof header, f) != nullptr);
  CHECK(std::string(header) == "8 1\n");
  REQUIRE(std::fgets(header, sizeof header, f) != nullptr);
  CHECK(std::string(header) == "255\n");
  unsigned char pixels[8] = {};
  CHECK(std::fread(pixels, 1, 8, f) == 8);
  for (unsigned char px : pixels) CHECK(static_cast<int>(px) == 128);  // round(255 * 0.5)
  CHECK(std::fgetc(f) == EOF);
  std::fclose(f);
  std::filesystem::remove(path);
}

TEST_CASE("formatDouble round trips through parsing") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> d(-1e6, 1e6);
  for (int i = 0; i < 50; ++i) {
    const double x = d(rng) * std::pow(10.0, static_cast<int>(rng() % 13) - 6);
    CHECK(std::stod(formatDouble(x)) == x);
  }
}
