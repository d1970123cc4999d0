#include <cmath>
#include <random>

// The desk control reproduces the tracking targets exactly, so derivative
// checks use the optimizer start instead, where the adjoint is nontrivial.

#include <gtest/gtest.h>

#include "caginalp/adjoint_solver.hpp"
#include "caginalp/linearized_solver.hpp"
#include "caginalp/problem.hpp"

using namespace caginalp;

TEST(Adjoint, TerminalConditions) {
  const Grid g = Grid::line(17, 1.0);
  std::mt19937_64 rng(4);
  const Vector gt = random_smooth_field(g, rng).values();
  const Vector gp = random_smooth_field(g, rng).values();
  for (double tau : {0.0, 0.7}) {
    Model m;
    m.params.ell = 1.3;
    m.params.tau = tau;
    const AdjointSnapshot s = terminal_snapshot(g, gt, gp, m, SolverConfig{});
    EXPECT_EQ(s.z.values(), gt);
    EXPECT_EQ(s.r.values().cwiseAbs().maxCoeff(), 0.0);
    EXPECT_LT((s.q.values() + laplacian_apply(g, s.p.values())).cwiseAbs().maxCoeff(),
              1e-12);
    const Vector combined = s.p.values() + tau * s.q.values();
    EXPECT_LT((combined - (gp - m.params.ell * gt)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Adjoint, FinalConditionsFromCost) {
  const Problem pb = desk_problem();
  const StateTrajectory traj = solve_state(pb.init, SpaceTimeField(pb.grid, pb.time),
                                           pb.solver, pb.model);
  const AdjointSnapshot s = final_conditions(traj.final(), pb.cost, pb.model, pb.solver);
  const Vector expected_z =
      pb.cost.b2 * (traj.final().theta.values() - pb.cost.theta_Omega.values());
  EXPECT_LT((s.z.values() - expected_z).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Adjoint, ZeroCostGivesZeroAdjointAndRegularizationGradient) {
  Problem pb = desk_problem();
  pb.cost.b1 = pb.cost.b2 = pb.cost.b3 = pb.cost.b4 = 0.0;
  pb.cost.b5 = 0.3;
  const GradientResult r =
      reduced_gradient(pb.init, pb.control, pb.cost, pb.solver, pb.model);
  for (const auto& snap : r.adjoint.snapshots) {
    EXPECT_EQ(snap.z.values().cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(snap.p.values().cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(snap.r.values().cwiseAbs().maxCoeff(), 0.0);
  }
  for (int n = 0; n < pb.time.steps(); ++n) {
    EXPECT_LT((r.gradient.slice(n).values() - 0.3 * pb.control.slice(n).values())
                  .cwiseAbs()
                  .maxCoeff(),
              1e-15);
  }
  EXPECT_EQ(r.gradient.slice(pb.time.steps()).values().cwiseAbs().maxCoeff(), 0.0);
}

TEST(Adjoint, QEqualsMinusLaplacianP) {
  Problem pb = desk_problem();
  pb.control = pb.optimizer_start;
  const GradientResult r =
      reduced_gradient(pb.init, pb.control, pb.cost, pb.solver, pb.model);
  for (const auto& s : r.adjoint.snapshots) {
    const Vector gap = s.q.values() + laplacian_apply(pb.grid, s.p.values());
    EXPECT_LT(gap.cwiseAbs().maxCoeff(), 1e-10 * (1.0 + s.p.values().cwiseAbs().maxCoeff()));
  }
}

TEST(Adjoint, DotProductWithLinearizedSweep) {
  for (double tau : {0.0, 0.5}) {
    Problem pb = desk_problem();
    pb.model.params.tau = tau;
    const StateTrajectory base = solve_state(pb.init, pb.control, pb.solver, pb.model);
    std::mt19937_64 rng(19);
    const SpaceTimeField h = random_smooth_field(pb.grid, pb.time, rng);
    AdjointSources w = AdjointSources::zero(pb.grid, pb.time.steps());
    for (int k = 1; k <= pb.time.steps(); ++k) {
      w.theta[k] = random_smooth_field(pb.grid, rng).values();
      w.phi[k] = random_smooth_field(pb.grid, rng).values();
    }
    const LinearizedTrajectory lin = solve_linearized(base, h, pb.solver, pb.model);
    const AdjointTrajectory adj = solve_adjoint(base, w, pb.solver, pb.model);
    double lhs = 0.0;
    for (int k = 1; k <= pb.time.steps(); ++k) {
      lhs += inner_product(pb.grid, w.theta[k], lin[k].zeta.values()) +
             inner_product(pb.grid, w.phi[k], lin[k].xi.values());
    }
    double rhs = 0.0;
    for (int n = 0; n < pb.time.steps(); ++n) {
      rhs += pb.time.dt() * inner_product(adj[n].z, h.slice(n));
    }
    EXPECT_LT(std::abs(lhs - rhs) / std::max(std::abs(lhs), std::abs(rhs)), 1e-10)
        << "tau " << tau;
  }
}

TEST(Adjoint, GradientMatchesCentralDifference) {
  Problem pb = desk_problem();
  pb.control = pb.optimizer_start;
  const GradientResult r =
      reduced_gradient(pb.init, pb.control, pb.cost, pb.solver, pb.model);
  std::mt19937_64 rng(8);
  const SpaceTimeField h = random_smooth_field(pb.grid, pb.time, rng);
  const double eps = 1e-5;
  const auto J = [&](double s) {
    const SpaceTimeField u = pb.control + s * h;
    return evaluate_cost(solve_state(pb.init, u, pb.solver, pb.model), u, pb.cost);
  };
  const double fd = (J(eps) - J(-eps)) / (2 * eps);
  const double an = spacetime_inner(r.gradient, h);
  EXPECT_LT(std::abs(fd - an) / std::abs(an), 1e-6);
}

TEST(Adjoint, FaultInjectionBreaksGradient) {
  Problem pb = desk_problem();
  pb.solver.debug_flip_adjoint_sign = true;
  pb.control = pb.optimizer_start;
  const GradientResult r =
      reduced_gradient(pb.init, pb.control, pb.cost, pb.solver, pb.model);
  std::mt19937_64 rng(8);
  const SpaceTimeField h = random_smooth_field(pb.grid, pb.time, rng);
  const double eps = 1e-5;
  const auto J = [&](double s) {
    const SpaceTimeField u = pb.control + s * h;
    return evaluate_cost(solve_state(pb.init, u, pb.solver, pb.model), u, pb.cost);
  };
  const double fd = (J(eps) - J(-eps)) / (2 * eps);
  EXPECT_GT(std::abs(fd - spacetime_inner(r.gradient, h)) / std::abs(fd), 1e-6);
}
