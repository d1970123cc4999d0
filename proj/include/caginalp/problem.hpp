#pragma once

#include <cstdint>
#include <random>

#include "caginalp/control_problem.hpp"

namespace caginalp {

/// Everything a run needs: discretization, model, data, and the optimal
/// control setup.
struct Problem {
  Grid grid;
  TimeGrid time;
  Model model;
  SolverConfig solver;
  InitialData init;
  /// Control used by forward runs and as the base point of the probes.
  SpaceTimeField control;
  CostSpec cost;
  AdmissibleSet admissible;
  OptimizerConfig optimizer;
  /// Starting point of the optimizer (projected onto the admissible set).
  SpaceTimeField optimizer_start;
};

/// mean + amp * prod_d cos(mode pi x_d / L_d)
Field cosine_field(const Grid& grid, double mean, double amp, int mode);

/// mean + amp * prod_d cos(mode pi x_d / L_d) * sin(pi t / T)
SpaceTimeField wave_field(const Grid& grid, const TimeGrid& time, double mean,
                          double amp, int mode);

/// Random combination of the lowest cosine modes in space (coefficients
/// uniform in [-1, 1], decaying like 1/(1+k)); values stay O(1).
Field random_smooth_field(const Grid& grid, std::mt19937_64& rng,
                          int modes = 4);

/// Same in space-time, with independent random sin/cos modes in time.
SpaceTimeField random_smooth_field(const Grid& grid, const TimeGrid& time,
                                   std::mt19937_64& rng, int modes = 4);

/// Tracking targets taken from a trajectory: theta_Q, phi_Q over time and
/// the final values as theta_Omega, phi_Omega.
void set_targets_from(CostSpec& cost, const StateTrajectory& reference);

/// The pinned desk configuration: 1D, n = 33 on [0, 1], T = 1, nt = 50,
/// coupled parameters with the quartic potential, and a tracking cost whose
/// targets come from a forward run with the interior control
/// u_ref = 1 + cos(pi x) sin(pi t). Bounds [-1, 3], optimizer from u = 0.
Problem desk_problem();

}  // namespace caginalp
