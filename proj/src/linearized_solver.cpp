#include "caginalp/linearized_solver.hpp"

#include <cmath>
#include <limits>

#include "caginalp/errors.hpp"

namespace caginalp {

LinearizedSnapshot LinearizedSnapshot::zero(const Grid& grid) {
  return {Field(grid), Field(grid), Field(grid), Field(grid)};
}

LinearizedSnapshot step_linearized(const StateSnapshot& base_prev,
                                   const StateSnapshot& base_next,
                                   const LinearizedSnapshot& lin_prev,
                                   const Field& h_slice,
                                   const StepOperators& ops) {
  const Grid& grid = ops.grid();
  require_same_grid(grid, lin_prev.xi.grid(), "step_linearized");
  require_same_grid(grid, h_slice.grid(), "direction slice");
  const auto& p = ops.model().params;
  const auto& nl = ops.model().nonlin;
  const double dt = ops.dt();
  const double c = ops.phase_rate();

  const Vector& theta = base_prev.theta.values();
  const Vector& phi = base_prev.phi.values();
  const Vector& sigma = base_prev.sigma.values();
  const Vector& zeta = lin_prev.zeta.values();
  const Vector& xi = lin_prev.xi.values();
  const Vector& rho = lin_prev.rho.values();

  const Vector h_phi = map_values(nl.h_gate.value, phi);
  const Vector dh_phi = map_values(nl.h_gate.d1, phi);
  const Vector growth =
      (p.lambda_P * sigma.array() - p.lambda_A - p.lambda_E * theta.array())
          .matrix();

  const Vector d_source =
      ((p.lambda_P * rho.array() - p.lambda_E * zeta.array()) * h_phi.array() +
       growth.array() * dh_phi.array() * xi.array())
          .matrix();
  const Vector d_g =
      (map_values(ops.model().potential.f_prime, phi).array() * xi.array())
          .matrix() -
      p.chi * rho - p.Lambda * zeta;

  Vector xi_next = ops.solve_phase(xi + dt * d_source - dt * c * ops.lap(xi) +
                                   dt * ops.lap(d_g));
  Vector eta_next = c * (xi_next - xi) - ops.lap(xi_next) + d_g;

  Vector zeta_next =
      ops.solve_heat(zeta + dt * h_slice.values() - p.ell * (xi_next - xi));

  const Vector d_kappa =
      (p.lambda_C * dh_phi.array() * xi.array() +
       p.lambda_D * map_values(nl.k_temp.d1, theta).array() * zeta.array())
          .matrix();
  const Vector rhs_rho =
      rho - dt * p.chi * ops.lap(xi_next) -
      dt * (d_kappa.array() * base_next.sigma.values().array()).matrix();
  Vector rho_next =
      ops.nutrient_solver(ops.nutrient_decay(theta, phi)).solve(rhs_rho);

  return {Field(grid, std::move(zeta_next)), Field(grid, std::move(xi_next)),
          Field(grid, std::move(eta_next)), Field(grid, std::move(rho_next))};
}

LinearizedTrajectory solve_linearized(const StateTrajectory& base,
                                      const SpaceTimeField& h,
                                      const SolverConfig& cfg,
                                      const Model& model) {
  cfg.check();
  const Grid& grid = base.grid();
  require_same_grid(grid, h.grid(), "direction");
  if (h.time() != base.time) {
    throw UsageError("direction and base trajectory use different time grids");
  }
  for (const auto& s : h.slices()) {
    if (!s.all_finite()) throw UsageError("direction must be finite");
  }
  const StepOperators ops(grid, base.time.dt(), model, cfg);
  LinearizedTrajectory traj{base.time, {}};
  traj.snapshots.reserve(base.snapshots.size());
  traj.snapshots.push_back(LinearizedSnapshot::zero(grid));
  for (int n = 0; n < base.time.steps(); ++n) {
    try {
      traj.snapshots.push_back(step_linearized(base[n], base[n + 1],
                                               traj.snapshots.back(),
                                               h.slice(n), ops));
    } catch (const SolverError& e) {
      throw e.at_step(n + 1);
    }
  }
  return traj;
}

ComponentLevels components(const LinearizedTrajectory& traj) {
  ComponentLevels out;
  out.reserve(traj.snapshots.size());
  for (const auto& s : traj.snapshots) {
    out.push_back(
        {s.zeta.values(), s.xi.values(), s.eta.values(), s.rho.values()});
  }
  return out;
}

TaylorReport taylor_test(const InitialData& init, const SpaceTimeField& u,
                         const SpaceTimeField& h,
                         const std::vector<double>& epsilons,
                         const SolverConfig& cfg, const Model& model) {
  if (epsilons.size() < 3) {
    throw UsageError("taylor_test needs at least three epsilons");
  }
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0) || (i > 0 && !(epsilons[i] < epsilons[i - 1]))) {
      throw UsageError("taylor_test epsilons must be positive and decreasing");
    }
  }
  if (spacetime_norm(h) == 0.0) {
    throw UsageError("taylor_test direction is zero");
  }
  const Grid& grid = init.phi0.grid();
  const double dt = u.time().dt();
  const StateTrajectory base = solve_state(init, u, cfg, model);
  const ComponentLevels base_c = components(base);
  const ComponentLevels lin_c =
      components(solve_linearized(base, h, cfg, model));

  TaylorReport report;
  report.linear_term_norm = y_norm(grid, dt, lin_c);
  const double base_norm = y_norm(grid, dt, base_c);
  constexpr double ulp = std::numeric_limits<double>::epsilon();

  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    const double eps = epsilons[i];
    SpaceTimeField perturbed = u;
    perturbed.axpy(eps, h);
    const ComponentLevels pert_c =
        components(solve_state(init, perturbed, cfg, model));
    ComponentLevels rem(pert_c.size());
    for (std::size_t n = 0; n < pert_c.size(); ++n) {
      for (int k = 0; k < 4; ++k) {
        rem[n][k] = pert_c[n][k] - base_c[n][k] - eps * lin_c[n][k];
      }
    }
    TaylorRow row;
    row.epsilon = eps;
    row.remainder = y_norm(grid, dt, rem);
    row.slope = std::numeric_limits<double>::quiet_NaN();
    if (i > 0) {
      const auto& prev = report.rows.back();
      row.slope = std::log(prev.remainder / row.remainder) /
                  std::log(prev.epsilon / eps);
    }
    // Cancellation in S(u + eps h) - S(u) loses about ulp * ||S(u)||.
    row.roundoff_floor = row.remainder < 1e3 * ulp * base_norm;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace caginalp
