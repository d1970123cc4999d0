#include "caginalp/cost.hpp"

#include <cmath>

#include "caginalp/errors.hpp"

namespace caginalp {

CostSpec CostSpec::with_zero_targets(const Grid& grid, const TimeGrid& time,
                                     double b1, double b2, double b3,
                                     double b4, double b5) {
  return CostSpec{b1,
                  b2,
                  b3,
                  b4,
                  b5,
                  SpaceTimeField(grid, time),
                  SpaceTimeField(grid, time),
                  Field(grid),
                  Field(grid)};
}

void CostSpec::check(const Grid& grid, const TimeGrid& time) const {
  const double weights[] = {b1, b2, b3, b4};
  for (int i = 0; i < 4; ++i) {
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i])) {
      throw ConfigError("cost weight b" + std::to_string(i + 1) +
                        " must be nonnegative");
    }
  }
  if (!(b5 > 0.0) || !std::isfinite(b5)) {
    throw ConfigError("cost weight b5 must be positive");
  }
  if (theta_Q.time() != time || phi_Q.time() != time) {
    throw UsageError("cost targets use a different time grid");
  }
  require_same_grid(grid, theta_Q.grid(), "theta_Q");
  require_same_grid(grid, phi_Q.grid(), "phi_Q");
  require_same_grid(grid, theta_Omega.grid(), "theta_Omega");
  require_same_grid(grid, phi_Omega.grid(), "phi_Omega");
}

double evaluate_cost(const StateTrajectory& traj, const SpaceTimeField& u,
                     const CostSpec& cost) {
  const Grid& grid = traj.grid();
  const TimeGrid& time = traj.time;
  cost.check(grid, time);
  require_same_grid(grid, u.grid(), "control");
  const double dt = time.dt();
  const auto sq = [&grid](const Vector& v) {
    return inner_product(grid, v, v);
  };

  double running_theta = 0.0;
  double running_phi = 0.0;
  double running_u = 0.0;
  for (int n = 0; n < time.steps(); ++n) {
    running_theta += sq(traj[n].theta.values() - cost.theta_Q.slice(n).values());
    running_phi += sq(traj[n].phi.values() - cost.phi_Q.slice(n).values());
    running_u += sq(u.slice(n).values());
  }
  const StateSnapshot& fin = traj.final();
  return 0.5 * cost.b1 * dt * running_theta +
         0.5 * cost.b2 * sq(fin.theta.values() - cost.theta_Omega.values()) +
         0.5 * cost.b3 * dt * running_phi +
         0.5 * cost.b4 * sq(fin.phi.values() - cost.phi_Omega.values()) +
         0.5 * cost.b5 * dt * running_u;
}

double cost_change(const StateTrajectory& from, const SpaceTimeField& u_from,
                   const StateTrajectory& to, const SpaceTimeField& u_to,
                   const CostSpec& cost) {
  const Grid& grid = from.grid();
  const TimeGrid& time = from.time;
  cost.check(grid, time);
  if (to.time != time || u_from.time() != time || u_to.time() != time) {
    throw UsageError("cost_change: time grid mismatch");
  }
  require_same_grid(grid, to.grid(), "cost_change");
  const double dt = time.dt();
  // (a'^2 - a^2) with a = x - target, a' = x' - target.
  const auto change = [&grid](const Vector& x, const Vector& x_new,
                              const Vector& target) {
    return inner_product(grid, x_new - x, x_new + x - 2.0 * target);
  };

  double running_theta = 0.0;
  double running_phi = 0.0;
  double running_u = 0.0;
  for (int n = 0; n < time.steps(); ++n) {
    running_theta += change(from[n].theta.values(), to[n].theta.values(),
                            cost.theta_Q.slice(n).values());
    running_phi += change(from[n].phi.values(), to[n].phi.values(),
                          cost.phi_Q.slice(n).values());
    running_u += change(u_from.slice(n).values(), u_to.slice(n).values(),
                        Vector::Zero(grid.node_count()));
  }
  return 0.5 * cost.b1 * dt * running_theta +
         0.5 * cost.b2 * change(from.final().theta.values(),
                                to.final().theta.values(),
                                cost.theta_Omega.values()) +
         0.5 * cost.b3 * dt * running_phi +
         0.5 * cost.b4 * change(from.final().phi.values(),
                                to.final().phi.values(), cost.phi_Omega.values()) +
         0.5 * cost.b5 * dt * running_u;
}

}  // namespace caginalp
