#include "caginalp/state_solver.hpp"

#include <algorithm>
#include <cmath>

#include "caginalp/errors.hpp"

namespace caginalp {

void SolverConfig::check() const {
  if (!(linear_tol > 0.0 && linear_tol <= 1e-6)) {
    throw ConfigError("linear_tol must lie in (0, 1e-6]");
  }
  if (!(stabilization_S >= 0.0) || !std::isfinite(stabilization_S)) {
    throw ConfigError("stabilization_s must be nonnegative");
  }
  if (max_linear_iters < 0) {
    throw ConfigError("max_linear_iters must be nonnegative");
  }
}

namespace {

void require_finite(const Vector& v, const char* name) {
  if (!v.allFinite()) {
    throw SolverError(std::string("non-finite values in ") + name, -1, 0.0);
  }
}

}  // namespace

StepOperators::StepOperators(const Grid& grid, double dt, const Model& model,
                             const SolverConfig& cfg)
    : grid_(grid),
      dt_(dt),
      model_(model),
      cfg_(cfg),
      phase_rate_(model.params.tau / dt + cfg.stabilization_S),
      weights_(grid.weights()),
      laplacian_(laplacian_matrix(grid)),
      phase_(grid, {1.0, -dt * phase_rate_, dt, {}}, cfg.linear_tol,
             cfg.max_linear_iters),
      heat_(grid, {1.0, -dt, 0.0, {}}, cfg.linear_tol, cfg.max_linear_iters) {}

WeightedSpdSolver StepOperators::nutrient_solver(const Vector& kappa) const {
  return WeightedSpdSolver(grid_, {1.0, -dt_, 0.0, dt_ * kappa},
                           cfg_.linear_tol, cfg_.max_linear_iters);
}

Vector StepOperators::nutrient_decay(const Vector& theta,
                                     const Vector& phi) const {
  const auto& p = model_.params;
  return p.lambda_C * map_values(model_.nonlin.h_gate.value, phi).array() +
         p.lambda_B +
         p.lambda_D * map_values(model_.nonlin.k_temp.value, theta).array();
}

Vector map_values(const std::function<double(double)>& fn, const Vector& v) {
  Vector out(v.size());
  for (int i = 0; i < v.size(); ++i) out[i] = fn(v[i]);
  return out;
}

StateSnapshot initial_snapshot(const InitialData& init, const Model& model) {
  const Grid& grid = init.phi0.grid();
  require_same_grid(grid, init.theta0.grid(), "initial theta");
  require_same_grid(grid, init.sigma0.grid(), "initial sigma");
  if (!init.theta0.all_finite() || !init.phi0.all_finite() ||
      !init.sigma0.all_finite()) {
    throw UsageError("initial data must be finite");
  }
  const auto& p = model.params;
  const Vector& phi = init.phi0.values();
  Vector mu = -laplacian_apply(grid, phi) +
              map_values(model.potential.f, phi) -
              p.chi * init.sigma0.values() - p.Lambda * init.theta0.values();
  return {init.theta0, init.phi0, Field(grid, std::move(mu)), init.sigma0};
}

StateSnapshot step_state(const StateSnapshot& prev, const Field& u_slice,
                         int level, const StepOperators& ops) {
  const Grid& grid = ops.grid();
  require_same_grid(grid, prev.phi.grid(), "step_state");
  require_same_grid(grid, u_slice.grid(), "control slice");
  const auto& p = ops.model().params;
  const auto& nl = ops.model().nonlin;
  const double dt = ops.dt();
  const double c = ops.phase_rate();

  const Vector& theta = prev.theta.values();
  const Vector& phi = prev.phi.values();
  const Vector& sigma = prev.sigma.values();

  // Phase block: phi' - dt A mu' = phi + dt src, mu' = c (phi' - phi) - A phi' + g.
  const Vector h_phi = map_values(nl.h_gate.value, phi);
  const Vector source =
      ((p.lambda_P * sigma.array() - p.lambda_A - p.lambda_E * theta.array()) *
       h_phi.array())
          .matrix();
  const Vector g = map_values(ops.model().potential.f, phi) - p.chi * sigma -
                   p.Lambda * theta;
  const Vector rhs_phase =
      phi + dt * source - dt * c * ops.lap(phi) + dt * ops.lap(g);
  Vector phi_next = ops.solve_phase(rhs_phase);
  Vector mu_next = c * (phi_next - phi) - ops.lap(phi_next) + g;

  // Heat: (I - dt A) theta' = theta + dt u - ell (phi' - phi).
  Vector theta_next = ops.solve_heat(theta + dt * u_slice.values() -
                                     p.ell * (phi_next - phi));

  // Nutrient with implicit linear decay.
  const Vector kappa = ops.nutrient_decay(theta, phi);
  const Vector rhs_sigma = sigma - dt * p.chi * ops.lap(phi_next) +
                           dt * p.lambda_B * p.sigma_B_at(grid, level);
  Vector sigma_next = ops.nutrient_solver(kappa).solve(rhs_sigma);

  require_finite(phi_next, "phi");
  require_finite(mu_next, "mu");
  require_finite(theta_next, "theta");
  require_finite(sigma_next, "sigma");
  return {Field(grid, std::move(theta_next)), Field(grid, std::move(phi_next)),
          Field(grid, std::move(mu_next)), Field(grid, std::move(sigma_next))};
}

StateSnapshot step_state(const StateSnapshot& prev, const Field& u_slice,
                         int level, double dt, const SolverConfig& cfg,
                         const Model& model) {
  cfg.check();
  const StepOperators ops(prev.phi.grid(), dt, model, cfg);
  return step_state(prev, u_slice, level, ops);
}

double discrete_energy(const Field& phi, const Potential& pot) {
  const Grid& grid = phi.grid();
  const Vector& v = phi.values();
  return 0.5 * inner_product(grid, -laplacian_apply(grid, v), v) +
         integrate(grid, map_values(pot.F_hat, v));
}

StepDiagnostics diagnose(const StateSnapshot& s, int step, double time,
                         const Model& model) {
  const Grid& grid = s.phi.grid();
  StepDiagnostics d;
  d.step = step;
  d.time = time;
  d.mass_theta_ell_phi =
      integrate(grid, s.theta.values() + model.params.ell * s.phi.values());
  d.mass_phi = integrate(s.phi);
  d.energy = discrete_energy(s.phi, model.potential);
  d.linf_theta = s.theta.values().cwiseAbs().maxCoeff();
  d.linf_phi = s.phi.values().cwiseAbs().maxCoeff();
  return d;
}

StateTrajectory solve_state(const InitialData& init, const SpaceTimeField& u,
                            const SolverConfig& cfg, const Model& model) {
  cfg.check();
  const Grid& grid = init.phi0.grid();
  require_same_grid(grid, u.grid(), "control");
  const TimeGrid& time = u.time();
  const StepOperators ops(grid, time.dt(), model, cfg);

  StateTrajectory traj{time, {}, {}};
  traj.snapshots.reserve(time.steps() + 1);
  traj.snapshots.push_back(initial_snapshot(init, model));
  traj.diagnostics.push_back(diagnose(traj.snapshots.back(), 0, 0.0, model));
  for (int n = 0; n < time.steps(); ++n) {
    try {
      traj.snapshots.push_back(
          step_state(traj.snapshots.back(), u.slice(n), n, ops));
    } catch (const SolverError& e) {
      throw e.at_step(n + 1);
    }
    traj.diagnostics.push_back(
        diagnose(traj.snapshots.back(), n + 1, time.time(n + 1), model));
  }
  return traj;
}

ComponentLevels components(const StateTrajectory& traj) {
  ComponentLevels out;
  out.reserve(traj.snapshots.size());
  for (const auto& s : traj.snapshots) {
    out.push_back({s.theta.values(), s.phi.values(), s.mu.values(),
                   s.sigma.values()});
  }
  return out;
}

double y_norm(const Grid& grid, double dt, const ComponentLevels& levels) {
  double max_l2[4] = {0.0, 0.0, 0.0, 0.0};
  double integral[4] = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t n = 0; n < levels.size(); ++n) {
    for (int c = 0; c < 4; ++c) {
      const Vector& v = levels[n][c];
      const Norms nv = norms(grid, v);
      max_l2[c] = std::max(max_l2[c], nv.l2);
      if (n == 0) continue;
      switch (c) {
        case 0:
        case 3:
          integral[c] += dt * (nv.l2 * nv.l2 + nv.h1_semi * nv.h1_semi);
          break;
        case 1: {
          const Vector lap = laplacian_apply(grid, v);
          integral[c] += dt * inner_product(grid, lap, lap);
          break;
        }
        case 2:
          integral[c] += dt * nv.l2 * nv.l2;
          break;
      }
    }
  }
  return max_l2[0] + std::sqrt(integral[0]) + max_l2[1] +
         std::sqrt(integral[1]) + std::sqrt(integral[2]) + max_l2[3] +
         std::sqrt(integral[3]);
}

LipschitzReport lipschitz_probe(const SpaceTimeField& u1,
                                const SpaceTimeField& u2,
                                const InitialData& init,
                                const SolverConfig& cfg, const Model& model) {
  LipschitzReport r;
  r.control_difference = spacetime_norm(u1 - u2);
  if (r.control_difference == 0.0) {
    throw UsageError("lipschitz_probe: controls coincide, ratio undefined");
  }
  const auto a = components(solve_state(init, u1, cfg, model));
  const auto b = components(solve_state(init, u2, cfg, model));
  ComponentLevels diff(a.size());
  for (std::size_t n = 0; n < a.size(); ++n) {
    for (int c = 0; c < 4; ++c) diff[n][c] = a[n][c] - b[n][c];
  }
  r.state_difference = y_norm(init.phi0.grid(), u1.time().dt(), diff);
  r.ratio = r.state_difference / r.control_difference;
  return r;
}

}  // namespace caginalp
