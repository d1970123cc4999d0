#pragma once

#include <vector>

#include "caginalp/cost.hpp"
#include "caginalp/state_solver.hpp"

namespace caginalp {

/// Adjoint variables (z, p, q, r) paired with the heat, phase, chemical
/// potential and nutrient equations. q = -A p holds exactly at every level.
struct AdjointSnapshot {
  Field z;
  Field p;
  Field q;
  Field r;
};

/// Indexed forward in time, computed backward. Snapshot n < nt holds the
/// multipliers of the step t_n -> t_{n+1}; z^n is the gradient density paired
/// with the control slice u^n. Snapshot nt carries the terminal data.
struct AdjointTrajectory {
  TimeGrid time;
  std::vector<AdjointSnapshot> snapshots;

  const AdjointSnapshot& operator[](int n) const { return snapshots.at(n); }
};

/// Loads of the backward sweep: derivative of a linear functional of the
/// linearized (zeta, xi) with respect to each level k = 1..nt, in the
/// weighted inner product. Entry 0 is ignored.
///
/// For the cost, theta[k] = dt b1 (theta^k - theta_Q^k) for k < nt and
/// theta[nt] = b2 (theta^nt - theta_Omega); phi likewise with b3, b4.
struct AdjointSources {
  std::vector<Vector> theta;
  std::vector<Vector> phi;

  static AdjointSources zero(const Grid& grid, int steps);
};

AdjointSources cost_sources(const StateTrajectory& base, const CostSpec& cost);

/// Terminal snapshot for terminal loads (g_theta, g_phi):
///   z = g_theta, p + tau q = g_phi - ell g_theta, q = -A p, r = 0.
/// For tau > 0 the split solves (I - tau A) p = g_phi - ell g_theta.
AdjointSnapshot terminal_snapshot(const Grid& grid, const Vector& g_theta,
                                  const Vector& g_phi, const Model& model,
                                  const SolverConfig& cfg);

/// Terminal data from the cost: z(T) = b2 (theta(T) - theta_Omega),
/// (p + tau q)(T) = b4 (phi(T) - phi_Omega) - ell b2 (theta(T) - theta_Omega),
/// r(T) = 0.
AdjointSnapshot final_conditions(const StateSnapshot& state_T,
                                 const CostSpec& cost, const Model& model,
                                 const SolverConfig& cfg);

/// Transpose of the linearized step t_{k-1} -> t_k: maps the snapshot at
/// level k (and the loads at level k) to the snapshot at level k - 1.
/// Couplings of step k (base levels k and k + 1) are skipped for k = nt.
AdjointSnapshot step_adjoint_backward(const AdjointSnapshot& next,
                                      const StateTrajectory& base, int level,
                                      const Vector& load_theta,
                                      const Vector& load_phi,
                                      const StepOperators& ops);

AdjointTrajectory solve_adjoint(const StateTrajectory& base,
                                const AdjointSources& sources,
                                const SolverConfig& cfg, const Model& model);

AdjointTrajectory solve_adjoint(const StateTrajectory& base,
                                const CostSpec& cost, const SolverConfig& cfg,
                                const Model& model);

struct GradientResult {
  double cost = 0.0;
  /// Slices n < nt hold z^n + b5 u^n; slice nt is zero (it carries no weight
  /// in the L2(Q) pairing).
  SpaceTimeField gradient;
  StateTrajectory state;
  AdjointTrajectory adjoint;
};

/// Forward solve, cost evaluation, backward sweep, and the gradient density
/// z + b5 u of the reduced cost u -> J(S(u), u).
GradientResult reduced_gradient(const InitialData& init,
                                const SpaceTimeField& u, const CostSpec& cost,
                                const SolverConfig& cfg, const Model& model);

}  // namespace caginalp
