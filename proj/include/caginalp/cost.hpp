#pragma once

#include "caginalp/grid.hpp"
#include "caginalp/state_solver.hpp"

namespace caginalp {

/// Tracking-type cost
///   J = b1/2 |theta - theta_Q|^2_Q + b2/2 |theta(T) - theta_Omega|^2
///     + b3/2 |phi - phi_Q|^2_Q     + b4/2 |phi(T) - phi_Omega|^2
///     + b5/2 |u|^2_Q
/// with the left-endpoint rule in time, matching the control convention.
struct CostSpec {
  double b1 = 0.0;
  double b2 = 0.0;
  double b3 = 0.0;
  double b4 = 0.0;
  double b5 = 1.0;
  SpaceTimeField theta_Q;
  SpaceTimeField phi_Q;
  Field theta_Omega;
  Field phi_Omega;

  /// Zero targets on the given grids with the given weights.
  static CostSpec with_zero_targets(const Grid& grid, const TimeGrid& time,
                                    double b1, double b2, double b3, double b4,
                                    double b5);

  /// Throws ConfigError on negative weights or b5 <= 0, UsageError on grid
  /// mismatch with (grid, time).
  void check(const Grid& grid, const TimeGrid& time) const;
};

double evaluate_cost(const StateTrajectory& traj, const SpaceTimeField& u,
                     const CostSpec& cost);

/// J(to) - J(from), evaluated term by term as (b/2)(a' - a, a' + a) so the
/// difference of two nearly equal costs does not cancel catastrophically.
double cost_change(const StateTrajectory& from, const SpaceTimeField& u_from,
                   const StateTrajectory& to, const SpaceTimeField& u_to,
                   const CostSpec& cost);

}  // namespace caginalp
