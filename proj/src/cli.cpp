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

#include "crowd/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "crowd/analysis.hpp"
#include "crowd/dynamics.hpp"
#include "crowd/errors.hpp"
#include "crowd/io.hpp"
#include "crowd/operators.hpp"
#include "crowd/presets.hpp"
#include "crowd/pressure.hpp"
#include "crowd/scenario.hpp"
#include "crowd/transport.hpp"

namespace crowd {

namespace {

using json = nlohmann::ordered_json;

const char* kUsage =
    "usage: crowdsim <verb> <scenario.cfg> [scenario2.cfg] [options]\n"
    "\n"
    "verbs:\n"
    "  simulate      run a trajectory, write frames and metrics\n"
    "  project       project the initial density onto {rho <= 1}\n"
    "  cone-project  split the drift against the congestion cone\n"
    "  contract-w2   compare two runs frame-wise in W2 (needs shared drift)\n"
    "  contract-l1   compare two runs frame-wise in L1\n"
    "  verify-lemmas randomized projection and derivative identities\n"
    "  convergence   rerun under halved (h, tau) and compare terminal states\n"
    "\n"
    "options:\n"
    "  -o DIR                 write artifacts into DIR\n"
    "  --section.key=value    override any scenario key\n"
    "  --seed=N               shorthand for --solver.seed=N\n"
    "  --lambda=X             user one-sided Lipschitz constant (contract-w2)\n"
    "  --count=N              instances for verify-lemmas (default 20)\n"
    "  --levels=N             refinement levels for convergence (default 3)\n"
    "  --alignment-constant=C floor -C*h for the alignment check (default 2)\n"
    "  --pgm                  also write PGM snapshots of density frames\n";

struct CliOptions {
  std::string verb;
  std::vector<std::string> scenarioPaths;
  std::string outDir;
  std::map<std::string, std::string> overrides;
  std::optional<double> lambda;
  int count = 20;
  int levels = 3;
  double alignmentConstant = 2.0;
  bool pgm = false;
};

CliOptions parseArgs(const std::vector<std::string>& args) {
  if (args.empty()) throw InputError("missing verb");
  CliOptions opt;
  opt.verb = args[0];
  for (std::size_t k = 1; k < args.size(); ++k) {
    const std::string& a = args[k];
    if (a == "-o") {
      if (k + 1 >= args.size()) throw InputError("-o needs a directory");
      opt.outDir = args[++k];
    } else if (a == "--pgm") {
      opt.pgm = true;
    } else if (a.rfind("--", 0) == 0) {
      const auto eq = a.find('=');
      if (eq == std::string::npos) throw InputError("option needs =value: " + a);
      const std::string key = a.substr(2, eq - 2);
      const std::string value = a.substr(eq + 1);
      if (key == "lambda") {
        opt.lambda = std::stod(value);
      } else if (key == "count") {
        opt.count = std::stoi(value);
      } else if (key == "levels") {
        opt.levels = std::stoi(value);
      } else if (key == "alignment-constant") {
        opt.alignmentConstant = std::stod(value);
      } else if (key == "seed") {
        opt.overrides["solver.seed"] = value;
      } else if (key.find('.') != std::string::npos) {
        opt.overrides[key] = value;
      } else {
        throw InputError("unknown option --" + key);
      }
    } else {
      opt.scenarioPaths.push_back(a);
    }
  }
  return opt;
}

int threadCap() {
  int cap = static_cast<int>(std::thread::hardware_concurrency());
  if (cap < 1) cap = 1;
  if (const char* env = std::getenv("CONGESTED_CROWD_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) cap = std::min(cap, v);
  }
  return cap;
}

std::string frameName(const char* stem, long long index, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%06lld.%s", stem, index, ext);
  return buf;
}

void writeManifest(const std::string& dir, const CliOptions& opt,
                   const std::vector<Scenario>& scenarios) {
  std::string text = "verb: " + opt.verb + "\n";
  for (std::size_t i = 0; i < opt.scenarioPaths.size(); ++i) {
    text += "scenario-file-" + std::to_string(i) + ": " + opt.scenarioPaths[i] + "\n";
  }
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    text += "\n# resolved scenario " + std::to_string(i) + "\n";
    text += serializeScenario(scenarios[i]);
  }
  atomicWriteText(dir + "/manifest.txt", text);
}

void writeMetrics(const std::string& dir, const Trajectory& traj) {
  std::string csv =
      "time,step,mass,max_density,max_cfl,projection_cost,step_action_squared,step_w2_squared,"
      "step_bound\n";
  for (const auto& d : traj.diagnostics) {
    csv += formatDouble(d.time) + "," + std::to_string(d.step) + "," + formatDouble(d.mass) + "," +
           formatDouble(d.maxDensity) + "," + formatDouble(d.maxCfl) + "," +
           formatDouble(d.projectionCost) + "," + formatDouble(d.stepActionSquared) + "," +
           formatDouble(d.stepDistanceSquared) + "," + formatDouble(d.stepCostBound) + "\n";
  }
  atomicWriteText(dir + "/metrics.csv", csv);
}

void writeFrames(const std::string& dir, const Trajectory& traj, bool pgm) {
  for (std::size_t i = 0; i < traj.frames.size(); ++i) {
    const Frame& f = traj.frames[i];
    const Grid& grid = f.density.grid();
    writeFieldCsv(dir + "/" + frameName("frame", static_cast<long long>(i), "csv"), grid,
                  f.density.values(), f.time);
    if (f.pressure) {
      writeFieldCsv(dir + "/" + frameName("pressure", static_cast<long long>(i), "csv"), grid,
                    f.pressure->values(), f.time);
    }
    if (pgm) {
      writePgm(dir + "/" + frameName("frame", static_cast<long long>(i), "pgm"), grid,
               f.density.values());
    }
  }
}

Scenario loadOne(const CliOptions& opt, std::size_t index = 0) {
  if (opt.scenarioPaths.size() <= index) throw InputError("verb needs a scenario file");
  return loadScenario(opt.scenarioPaths[index], opt.overrides);
}

void printVerdict(std::ostream& out, bool pass, double maxSlack) {
  out << "VERDICT: " << (pass ? "PASS" : "FAIL") << " max_slack=" << formatDouble(maxSlack) << "\n";
}

// simulate ------------------------------------------------------------------

int verbSimulate(const CliOptions& opt, std::ostream& out) {
  const Scenario sc = loadOne(opt);
  const Trajectory traj = run(sc);
  out << "steps: " << traj.steps << "\n";
  out << "frames: " << traj.frames.size() << "\n";
  out << "mass drift: " << formatDouble(traj.massDrift) << "\n";
  out << "max density: " << formatDouble(traj.maxDensity) << "\n";
  out << "max cfl: " << formatDouble(traj.maxCfl) << "\n";
  if (!opt.outDir.empty()) {
    writeManifest(opt.outDir, opt, {sc});
    writeMetrics(opt.outDir, traj);
    writeFrames(opt.outDir, traj, opt.pgm);
    out << "wrote " << traj.frames.size() << " frames to " << opt.outDir << "\n";
  }
  return 0;
}

// project --------------------------------------------------------------------

int verbProject(const CliOptions& opt, std::ostream& out) {
  const Scenario sc = loadOne(opt);
  const SolverConfig& cfg = sc.solver.config;
  const DensityField before = makeDensity(sc.grid, sc.initial);
  ProjectionResult info;
  const DensityField after = wassersteinProject(before, cfg, &info);

  json summary;
  summary["mass_before"] = before.mass();
  summary["mass_after"] = after.mass();
  summary["max_before"] = before.maxValue();
  summary["max_after"] = after.maxValue();
  summary["transport_cost"] = info.transportCost;
  summary["dual_certificate_min_reduced_cost"] = info.minReducedCost;
  summary["fast_path"] = info.usedFastPath;
  out << summary.dump(2) << "\n";
  if (!opt.outDir.empty()) {
    writeManifest(opt.outDir, opt, {sc});
    writeFieldCsv(opt.outDir + "/before.csv", sc.grid, before.values(), 0.0);
    writeFieldCsv(opt.outDir + "/after.csv", sc.grid, after.values(), 0.0);
    atomicWriteText(opt.outDir + "/summary.json", summary.dump(2) + "\n");
  }
  return 0;
}

// cone-project ---------------------------------------------------------------

struct ConeChecks {
  double orthogonality;
  double witnessMax;
  double complementarity;
  double pythagoras;
  double scale;
  bool converged;
  double slack;  // max over checks of value/tolerance - 1
};

ConeChecks runConeChecks(const DensityField& rho, const VelocityField& u,
                         const ConeProjectionResult& cone, const SolverConfig& cfg,
                         std::uint64_t seed) {
  ConeChecks c{};
  c.converged = cone.converged;
  c.scale = 1.0 + u.l2Squared();
  const EnergySplit split = energyCheck(u, cone);
  c.orthogonality = std::abs(split.orthogonality);
  c.pythagoras = std::abs(split.pythagorasResidual);
  c.complementarity = cone.complementarityResidual;
  c.witnessMax = 0.0;
  for (const PressureField& q : samplePressureTestFunctions(rho, 8, seed, cfg)) {
    c.witnessMax = std::max(c.witnessMax, coneInnerProduct(q, cone.corrected));
  }
  const double tol = cfg.orthogonalityTolerance * c.scale;
  double slack = c.orthogonality / tol - 1.0;
  slack = std::max(slack, c.witnessMax / tol - 1.0);
  slack = std::max(slack, c.pythagoras / tol - 1.0);
  slack = std::max(slack, c.complementarity / (cfg.complementarityTolerance * c.scale) - 1.0);
  if (!c.converged) slack = std::max(slack, 1.0);
  c.slack = slack;
  return c;
}

int verbConeProject(const CliOptions& opt, std::ostream& out) {
  const Scenario sc = loadOne(opt);
  const SolverConfig& cfg = sc.solver.config;
  const DensityField rho = wassersteinProject(makeDensity(sc.grid, sc.initial), cfg);
  const VelocityField u = sampleVelocity(sc.grid, sc.velocity, 0.0);
  const ConeProjectionResult cone = admissibleProject(rho, u, cfg);
  const ConeChecks checks = runConeChecks(rho, u, cone, cfg, sc.solver.seed);
  const EnergySplit split = energyCheck(u, cone);

  json summary;
  summary["converged"] = cone.converged;
  summary["iterations"] = cone.iterations;
  summary["kkt_residual"] = cone.kktResidual;
  summary["orthogonality"] = split.orthogonality;
  summary["pythagoras_residual"] = split.pythagorasResidual;
  summary["complementarity_residual"] = cone.complementarityResidual;
  summary["witness_max"] = checks.witnessMax;
  summary["u_norm_squared"] = split.uNormSquared;
  summary["grad_p_norm_squared"] = split.gradPNormSquared;
  summary["v_norm_squared"] = split.vNormSquared;
  out << summary.dump(2) << "\n";

  if (!opt.outDir.empty()) {
    writeManifest(opt.outDir, opt, {sc});
    writeFieldCsv(opt.outDir + "/density.csv", sc.grid, rho.values(), 0.0);
    writeFieldCsv(opt.outDir + "/pressure.csv", sc.grid, cone.pressure.values(), 0.0);
    writeFieldCsv(opt.outDir + "/velocity_x.csv", sc.grid, u.comp(0), 0.0);
    writeFieldCsv(opt.outDir + "/corrected_x.csv", sc.grid, cone.corrected.comp(0), 0.0);
    if (sc.grid.dim() == 2) {
      writeFieldCsv(opt.outDir + "/velocity_y.csv", sc.grid, u.comp(1), 0.0);
      writeFieldCsv(opt.outDir + "/corrected_y.csv", sc.grid, cone.corrected.comp(1), 0.0);
    }
    atomicWriteText(opt.outDir + "/summary.json", summary.dump(2) + "\n");
  }
  printVerdict(out, checks.slack <= 0.0, checks.slack);
  return checks.slack <= 0.0 ? 0 : 1;
}

// contract-w2 / contract-l1 ---------------------------------------------------

void requireComparable(const Scenario& a, const Scenario& b) {
  if (a.grid != b.grid) throw InputError("contract: scenarios use different grids");
  if (!(a.solver == b.solver)) throw InputError("contract: scenarios use different solver settings");
  if (!(a.velocity == b.velocity)) throw InputError("contract: scenarios use different drifts");
}

void writeContractionCsv(const std::string& dir, const ContractionReport& rep) {
  std::string csv = "time,distance,bound,slack\n";
  for (const auto& p : rep.points) {
    csv += formatDouble(p.time) + "," + formatDouble(p.distance) + "," + formatDouble(p.bound) +
           "," + formatDouble(p.slack) + "\n";
  }
  atomicWriteText(dir + "/report.csv", csv);
}

int verbContract(const CliOptions& opt, std::ostream& out, bool w2Mode) {
  if (opt.scenarioPaths.size() != 2) throw InputError("contract verbs need two scenario files");
  const Scenario sa = loadOne(opt, 0);
  const Scenario sb = loadOne(opt, 1);
  requireComparable(sa, sb);

  double lambda = 0.0;
  std::string source;
  if (w2Mode) {
    if (opt.lambda) {
      lambda = *opt.lambda;
      source = "user";
    } else if (auto a = analyticLambda(sa.velocity)) {
      lambda = *a;
      source = "analytic";
    } else {
      lambda = estimateLambda(sampleVelocity(sa.grid, sa.velocity, 0.0), 20000, sa.solver.seed);
      source = "estimated";
    }
    out << "lambda: " << formatDouble(lambda) << " (" << source << ")\n";
  }

  std::optional<Trajectory> ta, tb;
  {
    std::exception_ptr err;
    std::thread worker([&] {
      try {
        ta = run(sa);
      } catch (...) {
        err = std::current_exception();
      }
    });
    tb = run(sb);
    worker.join();
    if (err) std::rethrow_exception(err);
  }

  const ContractionReport rep =
      w2Mode ? w2ContractionReport(*ta, *tb, lambda, source, sa.solver.config)
             : l1ContractionReport(*ta, *tb, sa.solver.config);
  out << "initial distance: " << formatDouble(rep.initialDistance) << "\n";
  out << "frames compared: " << rep.points.size() << "\n";
  if (!opt.outDir.empty()) {
    writeManifest(opt.outDir, opt, {sa, sb});
    writeContractionCsv(opt.outDir, rep);
  }
  printVerdict(out, rep.pass, rep.maxSlack);
  return rep.pass ? 0 : 1;
}

// verify-lemmas ----------------------------------------------------------------

int verbVerifyLemmas(const CliOptions& opt, std::ostream& out) {
  const Scenario sc = loadOne(opt);
  const SolverConfig& cfg = sc.solver.config;
  const Grid& grid = sc.grid;
  const double gapTol = std::max(1e-3, 10.0 * grid.h());
  const double alignFloor = -opt.alignmentConstant * grid.h();

  std::string csv = "instance,cone_slack,alignment,derivative_gap\n";
  double maxSlack = -1.0;
  for (int k = 0; k < opt.count; ++k) {
    const std::uint64_t seed = sc.solver.seed + 7919ull * static_cast<std::uint64_t>(k);
    const DensityField rho0 = makeRandomFeasibleDensity(grid, seed);
    const VelocityField u = makeRandomVelocity(grid, seed + 1, 1.0);
    const ConeProjectionResult cone = admissibleProject(rho0, u, cfg);
    const ConeChecks cc = runConeChecks(rho0, u, cone, cfg, seed + 2);

    RandomDensityOptions smooth;
    smooth.forceSaturation = false;
    const DensityField rho1 = makeRandomFeasibleDensity(grid, seed + 3, smooth);
    const double alignment = transportPressureAlignment(rho0, rho1, cone.pressure, cfg);
    const GeodesicDerivativeCheck gd = geodesicDerivativeCheck(rho0, rho1, cone.pressure, cfg);

    double slack = cc.slack;
    slack = std::max(slack, (alignFloor - alignment) / grid.h());  // > 0 once below the floor
    slack = std::max(slack, gd.gap / gapTol - 1.0);
    maxSlack = std::max(maxSlack, slack);
    csv += std::to_string(k) + "," + formatDouble(cc.slack) + "," + formatDouble(alignment) + "," +
           formatDouble(gd.gap) + "\n";
  }
  if (!opt.outDir.empty()) {
    writeManifest(opt.outDir, opt, {sc});
    atomicWriteText(opt.outDir + "/lemmas.csv", csv);
  }
  out << "instances: " << opt.count << "\n";
  printVerdict(out, maxSlack <= 0.0, maxSlack);
  return maxSlack <= 0.0 ? 0 : 1;
}

// convergence -------------------------------------------------------------------

std::vector<double> restrictToBase(const Grid& fine, const Grid& base,
                                   const std::vector<double>& values) {
  const int fx = fine.nx() / base.nx();
  const int fy = fine.dim() == 2 ? fine.ny() / base.ny() : 1;
  std::vector<double> out(base.cellCount(), 0.0);
  for (int iy = 0; iy < fine.ny(); ++iy) {
    for (int ix = 0; ix < fine.nx(); ++ix) {
      out[base.index(ix / fx, iy / fy)] += values[fine.index(ix, iy)];
    }
  }
  const double scale = 1.0 / (fx * fy);
  for (double& v : out) v *= scale;
  return out;
}

int verbConvergence(const CliOptions& opt, std::ostream& out) {
  const Scenario base = loadOne(opt);
  if (base.initial.kind == DensityKind::table || base.velocity.kind == VelocityKind::table) {
    throw InputError("convergence needs analytic presets, not tables");
  }
  if (opt.levels < 2) throw InputError("convergence needs at least 2 levels");

  std::vector<Scenario> levels;
  for (int l = 0; l < opt.levels; ++l) {
    Scenario s = base;
    const int f = 1 << l;
    s.grid = Grid(base.grid.dim(),
                  {base.grid.lengthX(), base.grid.dim() == 2 ? base.grid.lengthY() : 0.0},
                  {base.grid.nx() * f, base.grid.dim() == 2 ? base.grid.ny() * f : 1});
    s.solver.tau = base.solver.tau / f;
    s.solver.frameStride = base.solver.frameStride * f;
    levels.push_back(std::move(s));
  }

  std::vector<std::optional<Trajectory>> trajs(levels.size());
  std::vector<std::exception_ptr> errors(levels.size());
  const std::size_t cap = static_cast<std::size_t>(threadCap());
  for (std::size_t begin = 0; begin < levels.size(); begin += cap) {
    std::vector<std::thread> pool;
    const std::size_t end = std::min(levels.size(), begin + cap);
    for (std::size_t l = begin; l < end; ++l) {
      pool.emplace_back([&, l] {
        try {
          trajs[l] = run(levels[l]);
        } catch (...) {
          errors[l] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<double> gaps;
  std::string csv = "level,cells,tau,gap_to_next\n";
  for (std::size_t l = 0; l + 1 < trajs.size(); ++l) {
    const auto coarse = restrictToBase(levels[l].grid, base.grid, trajs[l]->frames.back().density.values());
    const auto fine = restrictToBase(levels[l + 1].grid, base.grid, trajs[l + 1]->frames.back().density.values());
    gaps.push_back(l1Norm(base.grid, coarse, fine));
    csv += std::to_string(l) + "," + std::to_string(levels[l].grid.cellCount()) + "," +
           formatDouble(levels[l].solver.tau) + "," + formatDouble(gaps.back()) + "\n";
  }
  double minRatio = std::numeric_limits<double>::infinity();
  for (std::size_t l = 0; l + 1 < gaps.size(); ++l) {
    const double r = gaps[l + 1] > 0.0 ? gaps[l] / gaps[l + 1] : std::numeric_limits<double>::infinity();
    minRatio = std::min(minRatio, r);
    out << "gap ratio level " << l << "/" << l + 1 << ": " << formatDouble(r) << "\n";
  }
  if (gaps.size() < 2) {
    // Two levels produce a single gap; report it and pass on decrease alone.
    out << "single gap: " << formatDouble(gaps[0]) << "\n";
    minRatio = std::numeric_limits<double>::infinity();
  }
  if (!opt.outDir.empty()) {
    writeManifest(opt.outDir, opt, levels);
    atomicWriteText(opt.outDir + "/convergence.csv", csv);
  }
  const bool pass = minRatio >= 1.5;
  // Express the verdict in slack form: ratio shortfall against 1.5.
  const double slack = pass ? 0.0 : 1.5 / std::max(minRatio, 1e-300) - 1.0;
  printVerdict(out, pass, slack);
  return pass ? 0 : 1;
}

}  // namespace

int runCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    if (args.empty() || args[0] == "help" || args[0] == "--help" || args[0] == "-h") {
      out << kUsage;
      return args.empty() ? 2 : 0;
    }
    const CliOptions opt = parseArgs(args);
    if (opt.verb == "simulate") return verbSimulate(opt, out);
    if (opt.verb == "project") return verbProject(opt, out);
    if (opt.verb == "cone-project") return verbConeProject(opt, out);
    if (opt.verb == "contract-w2") return verbContract(opt, out, true);
    if (opt.verb == "contract-l1") return verbContract(opt, out, false);
    if (opt.verb == "verify-lemmas") return verbVerifyLemmas(opt, out);
    if (opt.verb == "convergence") return verbConvergence(opt, out);
    throw InputError("unknown verb: " + opt.verb);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n\n" << kUsage;
    return 2;
  } catch (const std::exception& e) {
    err << "runtime error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace crowd
