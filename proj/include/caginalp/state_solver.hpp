#pragma once

#include <array>
#include <optional>
#include <vector>

#include "caginalp/grid.hpp"
#include "caginalp/linear_solver.hpp"
#include "caginalp/model.hpp"

namespace caginalp {

struct SolverConfig {
  /// S in the stabilized explicit potential f(phi^n) + S (phi^{n+1} - phi^n).
  double stabilization_S = 2.0;
  double linear_tol = 1e-12;
  int max_linear_iters = 20;
  /// Fault injection for verification: flips the sign of the Lambda coupling
  /// in the adjoint sweep. Never set outside of verification runs.
  bool debug_flip_adjoint_sign = false;

  /// Throws ConfigError unless linear_tol is in (0, 1e-6] and S >= 0.
  void check() const;
};

struct InitialData {
  Field theta0;
  Field phi0;
  Field sigma0;
};

struct StateSnapshot {
  Field theta;
  Field phi;
  Field mu;
  Field sigma;
};

struct StepDiagnostics {
  int step = 0;
  double time = 0.0;
  double mass_theta_ell_phi = 0.0;
  double mass_phi = 0.0;
  double energy = 0.0;
  double linf_theta = 0.0;
  double linf_phi = 0.0;
};

/// Snapshots at t_0 ... t_nt together with per-level diagnostics.
struct StateTrajectory {
  TimeGrid time;
  std::vector<StateSnapshot> snapshots;
  std::vector<StepDiagnostics> diagnostics;

  const Grid& grid() const { return snapshots.front().theta.grid(); }
  const StateSnapshot& operator[](int n) const { return snapshots.at(n); }
  const StateSnapshot& final() const { return snapshots.back(); }
};

/// Linear operators of one time step, shared by the state, linearized and
/// adjoint sweeps. With dt fixed, the Cahn-Hilliard and heat blocks are
/// constant; the nutrient block depends on the frozen reaction coefficient
/// and is factorized per step.
///
///   phase:    M = I + dt (A^2 - c A),  c = tau / dt + S
///   heat:     H = I - dt A
///   nutrient: N = I - dt A + dt diag(kappa)
class StepOperators {
 public:
  StepOperators(const Grid& grid, double dt, const Model& model,
                const SolverConfig& cfg);

  const Grid& grid() const { return grid_; }
  double dt() const { return dt_; }
  /// tau / dt + S
  double phase_rate() const { return phase_rate_; }
  const Model& model() const { return model_; }
  const SolverConfig& config() const { return cfg_; }
  const Vector& weights() const { return weights_; }

  Vector lap(const Vector& v) const { return laplacian_ * v; }
  Vector solve_phase(const Vector& rhs) const { return phase_.solve(rhs); }
  Vector solve_heat(const Vector& rhs) const { return heat_.solve(rhs); }
  WeightedSpdSolver nutrient_solver(const Vector& kappa) const;

  /// lambda_C h(phi) + lambda_B + lambda_D k(theta), the implicit nutrient
  /// decay rate.
  Vector nutrient_decay(const Vector& theta, const Vector& phi) const;

 private:
  Grid grid_;
  double dt_;
  Model model_;
  SolverConfig cfg_;
  double phase_rate_;
  Vector weights_;
  SparseMatrix laplacian_;
  WeightedSpdSolver phase_;
  WeightedSpdSolver heat_;
};

/// Componentwise application of a scalar function.
Vector map_values(const std::function<double(double)>& fn, const Vector& v);

/// mu at t_0 from the chemical potential relation with d/dt phi = 0.
StateSnapshot initial_snapshot(const InitialData& init, const Model& model);

/// One IMEX step t_n -> t_{n+1}: phase block, then heat, then nutrient, every
/// nonlinear coefficient frozen at level n. `level` selects sigma_B(t_n).
StateSnapshot step_state(const StateSnapshot& prev, const Field& u_slice,
                         int level, const StepOperators& ops);
StateSnapshot step_state(const StateSnapshot& prev, const Field& u_slice,
                         int level, double dt, const SolverConfig& cfg,
                         const Model& model);

/// nt steps from the initial data. The control is piecewise constant in time
/// using the left endpoint; slice nt is ignored.
StateTrajectory solve_state(const InitialData& init, const SpaceTimeField& u,
                            const SolverConfig& cfg, const Model& model);

/// 1/2 (-A phi, phi) + integral of F_hat(phi).
double discrete_energy(const Field& phi, const Potential& pot);

StepDiagnostics diagnose(const StateSnapshot& s, int step, double time,
                         const Model& model);

/// The four components of a trajectory-like object at each level, in the
/// order (theta, phi, mu, sigma) or (zeta, xi, eta, rho).
using ComponentLevels = std::vector<std::array<Vector, 4>>;

ComponentLevels components(const StateTrajectory& traj);

/// Discrete surrogate of the continuous-dependence norm:
///   theta, sigma: max_n l2 + (sum dt |.|_{H1}^2)^{1/2}
///   phi:          max_n l2 + (sum dt l2(A .)^2)^{1/2}
///   mu:           (sum dt l2^2)^{1/2}
/// Time sums run over the computed levels 1..nt.
double y_norm(const Grid& grid, double dt, const ComponentLevels& levels);

struct LipschitzReport {
  double state_difference = 0.0;    // ||S(u1) - S(u2)||_Y
  double control_difference = 0.0;  // ||u1 - u2||_{L2(Q)}
  double ratio = 0.0;
};

/// Throws UsageError when the controls coincide.
LipschitzReport lipschitz_probe(const SpaceTimeField& u1,
                                const SpaceTimeField& u2,
                                const InitialData& init,
                                const SolverConfig& cfg, const Model& model);

}  // namespace caginalp
