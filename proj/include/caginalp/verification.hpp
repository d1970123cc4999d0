#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "caginalp/problem.hpp"

namespace caginalp {

/// Tolerances default to the acceptance thresholds of the battery.
struct VerifyTolerances {
  double conservation = 1e-10;    // relative, per step
  double equilibrium = 1e-12;     // l-infinity drift
  double oracle = 1e-10;          // max |sparse - dense| / max(1, |dense|)
  double taylor_slope_min = 1.9;
  double taylor_slope_max = 2.1;
  double taylor_linear = 1e-12;   // remainder in the fully linear regime
  double dot_product = 1e-10;     // relative
  double duality = 1e-9;          // relative
  double gradient = 1e-6;         // relative, central differences
  double stationarity = 1e-6;
  double clamp = 1e-4;            // ||u - P(-z/b5)|| / ||u||
  double variational = -1e-8;     // lower bound on the sampled inequality
  double energy_slack = 1e-13;    // relative roundoff allowance per step
  double lipschitz_spread = 0.05; // max ratio / min ratio - 1
  double lipschitz_linear = 1e-8;
};

struct VerifySuiteConfig {
  /// Test names to run, in suite order; empty runs all of them.
  std::vector<std::string> tests;
  std::uint64_t seed = 20240611;
  VerifyTolerances tol;

  int conservation_steps = 100;
  int equilibrium_steps = 100;
  std::vector<double> taylor_epsilons{1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  /// Window in which the slope bounds are asserted.
  double taylor_window_max = 1e-2;
  double taylor_window_min = 1e-4;
  int dot_product_trials = 10;
  int duality_trials = 10;
  int gradient_trials = 5;
  double gradient_epsilon = 1e-5;
  int vi_samples = 100;
  /// Pinned step of the energy test and its step count.
  double energy_dt = 0.02;
  int energy_steps = 100;
  std::vector<double> lipschitz_scales{1e-1, 1e-2, 1e-3};

  /// Whether the problem carries a cost and bounds; tests that need them
  /// report a configuration error otherwise.
  bool has_cost = true;
  bool has_admissible = true;
};

struct Measurement {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  /// "<=" (value must not exceed tolerance), ">=" or "in" (tolerance pair in
  /// `tolerance` and `upper`).
  std::string comparison = "<=";
  double upper = 0.0;
  bool passed = false;
};

struct Table {
  std::string file;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct TestResult {
  std::string test;
  bool passed = false;
  std::vector<Measurement> measurements;
  /// Detail tables, written next to the summary by the CLI.
  std::vector<Table> tables;
  /// Set when the test could not run (configuration or solver error).
  std::string error;
  double runtime_seconds = 0.0;
};

struct VerifyReport {
  std::uint64_t seed = 0;
  std::vector<TestResult> results;

  bool all_passed() const;
  const TestResult* find(const std::string& test) const;
};

/// conservation, equilibrium, oracle, taylor, adjoint, gradient, optimizer,
/// variational, energy, lipschitz
const std::vector<std::string>& suite_names();

/// Runs the selected tests. A failing or erroring test never stops the
/// others. UsageError for unknown test names.
VerifyReport run_suite(const VerifySuiteConfig& cfg, const Problem& problem);

/// verify_report.csv: test,measure,value,tolerance,comparison,passed,seed.
/// Runtimes are left out so that the file is reproducible.
void write_verify_report(const std::filesystem::path& dir,
                         const VerifyReport& report);

/// One tiny configuration of the pinned oracle matrix.
struct OracleCase {
  std::string label;
  Grid grid;
  TimeGrid time;
  Model model;
};

/// 2 grids x 2 parameter sets x tau in {0, 1}, all within the dense
/// oracle's size cap.
std::vector<OracleCase> pinned_oracle_cases();

/// Sparse-versus-dense discrepancies for one case with random data.
struct OracleComparison {
  double state = 0.0;
  double linearized = 0.0;
  double adjoint = 0.0;
};
OracleComparison compare_with_oracle(const OracleCase& c,
                                     const SolverConfig& solver,
                                     std::uint64_t seed);

/// Model with every nonlinear and cross coupling switched off: all lambda,
/// chi and Lambda zero and F = 0, which makes the control-to-state map affine.
Model fully_linear_model(const Model& base);

/// Decoupled Cahn-Hilliard regime: u = 0, all lambda, chi and Lambda zero,
/// quartic potential kept.
Model decoupled_cahn_hilliard_model(const Model& base);

}  // namespace caginalp
