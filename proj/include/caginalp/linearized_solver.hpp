#pragma once

#include <vector>

#include "caginalp/state_solver.hpp"

namespace caginalp {

struct LinearizedSnapshot {
  Field zeta;
  Field xi;
  Field eta;
  Field rho;

  static LinearizedSnapshot zero(const Grid& grid);
};

/// Derivative of the discrete control-to-state map in one direction h.
/// Snapshot 0 is zero (zeta, xi, rho vanish initially; eta follows).
struct LinearizedTrajectory {
  TimeGrid time;
  std::vector<LinearizedSnapshot> snapshots;

  const LinearizedSnapshot& operator[](int n) const { return snapshots.at(n); }
};

/// Exact derivative of `step_state` with respect to the previous state and
/// the control slice, evaluated along the base step (base_prev -> base_next).
///
/// Only sigma at the new level enters from base_next: the implicit nutrient
/// decay multiplies sigma^{n+1}, so the perturbation of the frozen decay
/// coefficient acts on it.
LinearizedSnapshot step_linearized(const StateSnapshot& base_prev,
                                   const StateSnapshot& base_next,
                                   const LinearizedSnapshot& lin_prev,
                                   const Field& h_slice,
                                   const StepOperators& ops);

LinearizedTrajectory solve_linearized(const StateTrajectory& base,
                                      const SpaceTimeField& h,
                                      const SolverConfig& cfg,
                                      const Model& model);

ComponentLevels components(const LinearizedTrajectory& traj);

struct TaylorRow {
  double epsilon = 0.0;
  double remainder = 0.0;
  /// log-log slope against the previous row; NaN for the first row.
  double slope = 0.0;
  /// Remainder is below 1e3 ulp of ||S(u)||_Y: cancellation noise, not the
  /// expansion, dominates and the slope is not meaningful.
  bool roundoff_floor = false;
};

struct TaylorReport {
  std::vector<TaylorRow> rows;
  double linear_term_norm = 0.0;  // ||L h||_Y
};

/// Remainder ||S(u + eps h) - S(u) - eps L h||_Y for each eps.
/// Requires at least three strictly decreasing epsilons and a nonzero h.
TaylorReport taylor_test(const InitialData& init, const SpaceTimeField& u,
                         const SpaceTimeField& h,
                         const std::vector<double>& epsilons,
                         const SolverConfig& cfg, const Model& model);

}  // namespace caginalp
