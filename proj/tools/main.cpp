// Command-line front end: simulate, optimize and verify from a config file.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "caginalp/config.hpp"
#include "caginalp/csv_io.hpp"
#include "caginalp/errors.hpp"
#include "caginalp/verification.hpp"

namespace fs = std::filesystem;
using namespace caginalp;

namespace {

enum Exit : int {
  kOk = 0,
  kConfig = 2,
  kSolver = 3,
  kOptimizer = 4,
  kTestFailure = 5,
};

void apply_thread_cap() {
  const char* env = std::getenv("CAGINALP_THREADS");
  if (!env || !*env) return;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 0) {
    throw ConfigError(std::string("CAGINALP_THREADS must be a nonnegative integer, got '") +
                      env + "'");
  }
  // 0 keeps the library default.
  if (n > 0) Eigen::setNbThreads(static_cast<int>(n));
}

RunConfig load(const std::string& path) {
  RunConfig cfg = load_config(path);
  for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << '\n';
  return cfg;
}

void write_effective(const RunConfig& cfg) {
  fs::create_directories(cfg.output.dir);
  std::ofstream out(cfg.output.dir / "effective_config.ini", std::ios::binary);
  out << cfg.effective;
  if (!out) throw ConfigError("cannot write " + (cfg.output.dir / "effective_config.ini").string());
}

std::string slice_name(int n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "state_%05d.csv", n);
  return buf;
}

int cmd_simulate(const std::string& path) {
  const RunConfig cfg = load(path);
  const Problem& pb = cfg.problem;
  const StateTrajectory traj = solve_state(pb.init, pb.control, pb.solver, pb.model);
  write_effective(cfg);
  write_diagnostics_csv(cfg.output.dir / "diagnostics.csv", traj.diagnostics);
  for (int n : cfg.output.slices) {
    write_snapshot_csv(cfg.output.dir / slice_name(n), traj[n]);
  }
  const auto& last = traj.diagnostics.back();
  std::printf("simulate: %d steps to t = %.6g, energy %.10g, mass(theta + ell phi) %.10g\n",
              pb.time.steps(), last.time, last.energy, last.mass_theta_ell_phi);
  std::printf("outputs in %s\n", cfg.output.dir.string().c_str());
  return kOk;
}

int cmd_optimize(const std::string& path) {
  const RunConfig cfg = load(path);
  if (!cfg.has_cost) throw ConfigError(path + ": optimize needs a [cost] section");
  if (!cfg.has_admissible) {
    throw ConfigError(path + ": optimize needs an [admissible] section");
  }
  const Problem& pb = cfg.problem;
  const OptimizationReport rep =
      projected_gradient_descent(pb.init, pb.optimizer_start, pb.admissible,
                                 pb.cost, pb.optimizer, pb.solver, pb.model);
  write_effective(cfg);
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : rep.iterates) {
    rows.push_back({std::to_string(r.iter), format_real(r.cost),
                    format_real(r.stationarity), format_real(r.step),
                    std::to_string(r.backtracks)});
  }
  write_table(cfg.output.dir / "optim_report.csv",
              {"iter", "J", "stationarity", "step", "backtracks"}, rows);
  write_spacetime_csv(cfg.output.dir / "control_final.csv", rep.control);
  write_spacetime_csv(cfg.output.dir / "adjoint_z_final.csv", rep.adjoint_z);
  std::printf("optimize: %s after %d iterations, J = %.12g, stationarity = %.3e\n",
              to_string(rep.reason).c_str(), rep.iterates.back().iter,
              rep.final_cost(), rep.final_stationarity());
  std::printf("outputs in %s\n", cfg.output.dir.string().c_str());
  return rep.reason == StopReason::Converged ? kOk : kOptimizer;
}

std::string valid_suites() {
  std::string s = "all";
  for (const auto& n : suite_names()) s += ", " + n;
  return s;
}

int cmd_verify(const std::string& suite, const std::string& path) {
  VerifySuiteConfig vcfg;
  if (suite != "all") {
    std::stringstream ss(suite);
    std::string name;
    while (std::getline(ss, name, ',')) {
      const auto& all = suite_names();
      if (std::find(all.begin(), all.end(), name) == all.end()) {
        std::cerr << "error: unknown suite '" << name
                  << "'; valid names: " << valid_suites() << '\n';
        return kConfig;
      }
      vcfg.tests.push_back(name);
    }
  }
  const RunConfig cfg = load(path);
  vcfg.seed = cfg.verify.seed;
  vcfg.has_cost = cfg.has_cost;
  vcfg.has_admissible = cfg.has_admissible;
  const VerifyReport report = run_suite(vcfg, cfg.problem);

  write_effective(cfg);
  write_verify_report(cfg.output.dir, report);
  for (const auto& r : report.results) {
    for (const auto& t : r.tables) write_table(cfg.output.dir / t.file, t.header, t.rows);
  }
  std::printf("seed %llu\n", static_cast<unsigned long long>(report.seed));
  for (const auto& r : report.results) {
    std::printf("%-5s %-13s (%.2fs)\n", r.passed ? "PASS" : "FAIL", r.test.c_str(),
                r.runtime_seconds);
    if (!r.error.empty()) std::printf("      error: %s\n", r.error.c_str());
    for (const auto& m : r.measurements) {
      if (m.comparison == "in") {
        std::printf("      %-30s %.6e in [%g, %g]%s\n", m.name.c_str(), m.value,
                    m.tolerance, m.upper, m.passed ? "" : "  <-- violated");
      } else {
        std::printf("      %-30s %.6e %s %g%s\n", m.name.c_str(), m.value,
                    m.comparison.c_str(), m.tolerance,
                    m.passed ? "" : "  <-- violated");
      }
    }
  }
  std::printf("reports in %s\n", cfg.output.dir.string().c_str());
  return report.all_passed() ? kOk : kTestFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal control of a nonisothermal Caginalp tumor-growth model"};
  app.require_subcommand(1);

  std::string config_path;
  std::string suite;
  auto* simulate = app.add_subcommand("simulate", "forward solve with diagnostics");
  simulate->add_option("config", config_path, "run configuration")->required();
  auto* optimize = app.add_subcommand("optimize", "projected-gradient optimal control");
  optimize->add_option("config", config_path, "run configuration")->required();
  auto* verify = app.add_subcommand(
      "verify", "property-test battery; suite is 'all' or a comma-separated list");
  verify->add_option("suite", suite, "all | " + valid_suites().substr(5))->required();
  verify->add_option("config", config_path, "run configuration")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    apply_thread_cap();
    if (*simulate) return cmd_simulate(config_path);
    if (*optimize) return cmd_optimize(config_path);
    return cmd_verify(suite, config_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  }
}
