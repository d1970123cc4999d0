#include "caginalp/adjoint_solver.hpp"

#include "caginalp/errors.hpp"

namespace caginalp {

AdjointSources AdjointSources::zero(const Grid& grid, int steps) {
  const Vector z = Vector::Zero(grid.node_count());
  return {std::vector<Vector>(steps + 1, z), std::vector<Vector>(steps + 1, z)};
}

AdjointSources cost_sources(const StateTrajectory& base, const CostSpec& cost) {
  const Grid& grid = base.grid();
  const int nt = base.time.steps();
  const double dt = base.time.dt();
  cost.check(grid, base.time);
  AdjointSources s = AdjointSources::zero(grid, nt);
  for (int k = 1; k < nt; ++k) {
    s.theta[k] =
        dt * cost.b1 * (base[k].theta.values() - cost.theta_Q.slice(k).values());
    s.phi[k] =
        dt * cost.b3 * (base[k].phi.values() - cost.phi_Q.slice(k).values());
  }
  s.theta[nt] =
      cost.b2 * (base.final().theta.values() - cost.theta_Omega.values());
  s.phi[nt] = cost.b4 * (base.final().phi.values() - cost.phi_Omega.values());
  return s;
}

AdjointSnapshot terminal_snapshot(const Grid& grid, const Vector& g_theta,
                                  const Vector& g_phi, const Model& model,
                                  const SolverConfig& cfg) {
  const auto& p = model.params;
  const Vector combo = g_phi - p.ell * g_theta;
  Vector p_T;
  if (p.tau == 0.0) {
    p_T = combo;
  } else {
    p_T = WeightedSpdSolver(grid, {1.0, -p.tau, 0.0, {}}, cfg.linear_tol,
                            cfg.max_linear_iters)
              .solve(combo);
  }
  Vector q_T = -laplacian_apply(grid, p_T);
  return {Field(grid, g_theta), Field(grid, std::move(p_T)),
          Field(grid, std::move(q_T)), Field(grid)};
}

AdjointSnapshot final_conditions(const StateSnapshot& state_T,
                                 const CostSpec& cost, const Model& model,
                                 const SolverConfig& cfg) {
  const Grid& grid = state_T.theta.grid();
  require_same_grid(grid, cost.theta_Omega.grid(), "theta_Omega");
  require_same_grid(grid, cost.phi_Omega.grid(), "phi_Omega");
  const Vector g_theta =
      cost.b2 * (state_T.theta.values() - cost.theta_Omega.values());
  const Vector g_phi = cost.b4 * (state_T.phi.values() - cost.phi_Omega.values());
  return terminal_snapshot(grid, g_theta, g_phi, model, cfg);
}

// Transposed step, derived from the Lagrangian of the scaled step residuals
//   R1 = (zeta' - zeta)/dt + ell (xi' - xi)/dt - A zeta' - h         [z]
//   R2 = (xi' - xi)/dt - A eta' - dsrc                              [p]
//   R3 = c (xi' - xi) - A xi' + dg - eta'                           [q]
//   R4 = (rho' - rho)/dt - A rho' + kappa rho' + chi A xi' + dkappa sigma'  [r]
// Stationarity in eta^k gives q = -A p; in zeta^k, xi^k, rho^k it gives the
// three backward equations solved below (heat, nutrient, then phase).
AdjointSnapshot step_adjoint_backward(const AdjointSnapshot& next,
                                      const StateTrajectory& base, int level,
                                      const Vector& load_theta,
                                      const Vector& load_phi,
                                      const StepOperators& ops) {
  const Grid& grid = ops.grid();
  const int nt = base.time.steps();
  if (level < 1 || level > nt) {
    throw UsageError("step_adjoint_backward: level out of range");
  }
  const auto& par = ops.model().params;
  const auto& nl = ops.model().nonlin;
  const double dt = ops.dt();

  const Vector& z = next.z.values();
  const Vector& p = next.p.values();
  const Vector& q = next.q.values();
  const Vector& r = next.r.values();

  Vector z_load = load_theta + z;
  Vector phi_load = load_phi + par.ell * z + p + par.tau * q;
  Vector rho_load = r;
  if (level < nt) {
    // Couplings of step `level`: base levels k and k + 1.
    const Vector& theta = base[level].theta.values();
    const Vector& phi = base[level].phi.values();
    const Vector& sigma = base[level].sigma.values();
    const Vector& sigma_next = base[level + 1].sigma.values();
    const Vector h_phi = map_values(nl.h_gate.value, phi);
    const Vector dh_phi = map_values(nl.h_gate.d1, phi);
    const Vector dk_theta = map_values(nl.k_temp.d1, theta);
    const Vector fp = map_values(ops.model().potential.f_prime, phi);
    const Vector growth =
        (par.lambda_P * sigma.array() - par.lambda_A -
         par.lambda_E * theta.array())
            .matrix();
    const double lambda_sign = ops.config().debug_flip_adjoint_sign ? -1.0 : 1.0;

    z_load += dt * (lambda_sign * par.Lambda * q -
                        par.lambda_E * (h_phi.array() * p.array()).matrix() -
                        par.lambda_D * (sigma_next.array() * dk_theta.array() *
                                        r.array())
                                           .matrix());
    phi_load += dt * (ops.config().stabilization_S * q +
                      (growth.array() * dh_phi.array() * p.array() -
                       fp.array() * q.array() -
                       par.lambda_C * dh_phi.array() * sigma_next.array() *
                           r.array())
                          .matrix());
    rho_load += dt * (par.lambda_P * (h_phi.array() * p.array()).matrix() +
                         par.chi * q);
  }

  // H z = z_load
  Vector z_prev = ops.solve_heat(z_load);
  // N_{k-1} r = rho_load, decay frozen at level k - 1.
  const Vector& theta_prev = base[level - 1].theta.values();
  const Vector& phi_prev = base[level - 1].phi.values();
  Vector r_prev = ops.nutrient_solver(ops.nutrient_decay(theta_prev, phi_prev))
                      .solve(rho_load);
  // M p = phi_load - ell z - dt chi A r, then q = -A p.
  Vector p_prev = ops.solve_phase(phi_load - par.ell * z_prev -
                                  dt * par.chi * ops.lap(r_prev));
  Vector q_prev = -ops.lap(p_prev);

  return {Field(grid, std::move(z_prev)), Field(grid, std::move(p_prev)),
          Field(grid, std::move(q_prev)), Field(grid, std::move(r_prev))};
}

AdjointTrajectory solve_adjoint(const StateTrajectory& base,
                                const AdjointSources& sources,
                                const SolverConfig& cfg, const Model& model) {
  cfg.check();
  const Grid& grid = base.grid();
  const int nt = base.time.steps();
  if (static_cast<int>(sources.theta.size()) != nt + 1 ||
      static_cast<int>(sources.phi.size()) != nt + 1) {
    throw UsageError("adjoint sources need nt + 1 entries");
  }
  const StepOperators ops(grid, base.time.dt(), model, cfg);

  std::vector<AdjointSnapshot> backward;
  backward.reserve(nt + 1);
  backward.push_back(
      terminal_snapshot(grid, sources.theta[nt], sources.phi[nt], model, cfg));
  const Vector zero = Vector::Zero(grid.node_count());
  for (int k = nt; k >= 1; --k) {
    // Terminal loads are already folded into the terminal snapshot.
    const Vector& lt = k == nt ? zero : sources.theta[k];
    const Vector& lp = k == nt ? zero : sources.phi[k];
    try {
      backward.push_back(
          step_adjoint_backward(backward.back(), base, k, lt, lp, ops));
    } catch (const SolverError& e) {
      throw e.at_step(k - 1);
    }
  }
  return {base.time, {backward.rbegin(), backward.rend()}};
}

AdjointTrajectory solve_adjoint(const StateTrajectory& base,
                                const CostSpec& cost, const SolverConfig& cfg,
                                const Model& model) {
  return solve_adjoint(base, cost_sources(base, cost), cfg, model);
}

GradientResult reduced_gradient(const InitialData& init,
                                const SpaceTimeField& u, const CostSpec& cost,
                                const SolverConfig& cfg, const Model& model) {
  StateTrajectory state = solve_state(init, u, cfg, model);
  const double j = evaluate_cost(state, u, cost);
  AdjointTrajectory adjoint = solve_adjoint(state, cost, cfg, model);
  SpaceTimeField g(u.grid(), u.time());
  for (int n = 0; n < u.time().steps(); ++n) {
    g.slice(n).values() =
        adjoint[n].z.values() + cost.b5 * u.slice(n).values();
  }
  return {j, std::move(g), std::move(state), std::move(adjoint)};
}

}  // namespace caginalp
