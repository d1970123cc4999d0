#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "caginalp/adjoint_solver.hpp"
#include "caginalp/cost.hpp"

namespace caginalp {

/// Box constraints lower <= u <= upper, with M bounding both in magnitude.
struct AdmissibleSet {
  SpaceTimeField lower;
  SpaceTimeField upper;
  double m_bound = 0.0;

  static AdmissibleSet constant(const Grid& grid, const TimeGrid& time,
                                double lower, double upper, double m_bound);

  /// ConfigError if lower > upper anywhere or max(|lower|, |upper|) >= M.
  void check() const;
  bool contains(const SpaceTimeField& u) const;
};

/// Pointwise median(lower, u, upper): the L2(Q) projection onto the box.
SpaceTimeField project_admissible(const SpaceTimeField& u,
                                  const AdmissibleSet& adm);

struct OptimizerConfig {
  int max_iters = 200;
  double armijo_c = 1e-4;
  double backtrack_factor = 0.5;
  double initial_step = 1.0;
  double stationarity_tol = 1e-8;
  double min_step = 1e-14;

  void check() const;
};

enum class StopReason { Converged, MaxIterations, StepTooSmall };
std::string to_string(StopReason reason);

struct IterateRecord {
  int iter = 0;
  double cost = 0.0;
  double stationarity = 0.0;
  /// Accepted step length leading to this iterate (0 for the start point).
  double step = 0.0;
  int backtracks = 0;
  /// Forward plus backward sweeps spent so far (each 3 nt linear solves).
  int sweeps = 0;
};

struct OptimizationReport {
  std::vector<IterateRecord> iterates;
  StopReason reason = StopReason::MaxIterations;
  SpaceTimeField control;
  /// Adjoint z at the final control, slices 0..nt.
  SpaceTimeField adjoint_z;
  SpaceTimeField gradient;

  double final_cost() const { return iterates.back().cost; }
  double final_stationarity() const { return iterates.back().stationarity; }
};

/// ||u - P(u - g)||_{L2(Q)}, the projected-gradient residual with unit step.
double stationarity_measure(const SpaceTimeField& u, const SpaceTimeField& g,
                            const AdmissibleSet& adm);

/// u_{k+1} = P(u_k - alpha_k g_k) with Armijo backtracking
///   J(u_{k+1}) <= J(u_k) + c (g_k, u_{k+1} - u_k)_Q.
/// Stops at stationarity <= tol, after max_iters, or when alpha < min_step.
OptimizationReport projected_gradient_descent(
    const InitialData& init, const SpaceTimeField& u0, const AdmissibleSet& adm,
    const CostSpec& cost, const OptimizerConfig& opt, const SolverConfig& cfg,
    const Model& model);

struct StationarityReport {
  double measure = 0.0;
  /// (z + b5 u, v - u)_Q for random admissible v; all >= 0 at a stationary
  /// point.
  std::vector<double> vi_samples;
  double min_vi_sample() const;
};

StationarityReport stationarity_check(const InitialData& init,
                                      const SpaceTimeField& u,
                                      const AdmissibleSet& adm,
                                      const CostSpec& cost,
                                      const SolverConfig& cfg,
                                      const Model& model, int samples,
                                      std::uint64_t seed);

/// Same, from a gradient already at hand.
StationarityReport stationarity_check(const SpaceTimeField& u,
                                      const SpaceTimeField& gradient,
                                      const AdmissibleSet& adm, int samples,
                                      std::uint64_t seed);

}  // namespace caginalp
