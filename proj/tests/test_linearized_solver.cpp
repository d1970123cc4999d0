#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "caginalp/linearized_solver.hpp"
#include "caginalp/problem.hpp"

using namespace caginalp;

namespace {

struct DeskBase {
  Problem pb = desk_problem();
  StateTrajectory base = solve_state(pb.init, pb.control, pb.solver, pb.model);
};

double max_gap(const ComponentLevels& a, const ComponentLevels& b) {
  double gap = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) {
    for (int c = 0; c < 4; ++c) {
      gap = std::max(gap, (a[n][c] - b[n][c]).cwiseAbs().maxCoeff());
    }
  }
  return gap;
}

double max_abs(const ComponentLevels& a) {
  double m = 0.0;
  for (const auto& lvl : a) {
    for (const auto& v : lvl) m = std::max(m, v.cwiseAbs().maxCoeff());
  }
  return m;
}

}  // namespace

TEST(Linearized, InitialLevelIsZeroForTauZero) {
  DeskBase s;
  std::mt19937_64 rng(3);
  const SpaceTimeField h = random_smooth_field(s.pb.grid, s.pb.time, rng);
  const LinearizedTrajectory lin = solve_linearized(s.base, h, s.pb.solver, s.pb.model);
  EXPECT_EQ(lin[0].zeta.values().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(lin[0].xi.values().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(lin[0].rho.values().cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(lin.snapshots.size(), 51u);
}

TEST(Linearized, LinearAndHomogeneousInDirection) {
  DeskBase s;
  std::mt19937_64 rng(11);
  const SpaceTimeField h1 = random_smooth_field(s.pb.grid, s.pb.time, rng);
  const SpaceTimeField h2 = random_smooth_field(s.pb.grid, s.pb.time, rng);
  const auto L = [&](const SpaceTimeField& h) {
    return components(solve_linearized(s.base, h, s.pb.solver, s.pb.model));
  };
  const auto a = L(h1);
  const auto b = L(h2);
  const auto sum = L(h1 + h2);
  const auto scaled = L(-3.5 * h1);
  ComponentLevels expect_sum = a, expect_scaled = a;
  for (std::size_t n = 0; n < a.size(); ++n) {
    for (int c = 0; c < 4; ++c) {
      expect_sum[n][c] = a[n][c] + b[n][c];
      expect_scaled[n][c] = -3.5 * a[n][c];
    }
  }
  const double scale = max_abs(a) + max_abs(b);
  EXPECT_LT(max_gap(sum, expect_sum), 1e-12 * scale);
  EXPECT_LT(max_gap(scaled, expect_scaled), 1e-12 * scale);
}

TEST(Linearized, SingleStepFiniteDifferenceSlope) {
  DeskBase s;
  const StepOperators ops(s.pb.grid, s.pb.time.dt(), s.pb.model, s.pb.solver);
  std::mt19937_64 rng(5);
  const Grid& g = s.pb.grid;
  const StateSnapshot& prev = s.base[10];
  const StateSnapshot next = step_state(prev, s.pb.control.slice(10), 10, ops);
  const LinearizedSnapshot dprev{random_smooth_field(g, rng), random_smooth_field(g, rng),
                                 Field(g), random_smooth_field(g, rng)};
  const Field dh = random_smooth_field(g, rng);
  const LinearizedSnapshot lin = step_linearized(prev, next, dprev, dh, ops);

  const auto remainder = [&](double eps) {
    StateSnapshot p = prev;
    p.theta.values() += eps * dprev.zeta.values();
    p.phi.values() += eps * dprev.xi.values();
    p.sigma.values() += eps * dprev.rho.values();
    Field u = s.pb.control.slice(10);
    u.values() += eps * dh.values();
    const StateSnapshot q = step_state(p, u, 10, ops);
    return (q.theta.values() - next.theta.values() - eps * lin.zeta.values()).norm() +
           (q.phi.values() - next.phi.values() - eps * lin.xi.values()).norm() +
           (q.mu.values() - next.mu.values() - eps * lin.eta.values()).norm() +
           (q.sigma.values() - next.sigma.values() - eps * lin.rho.values()).norm();
  };
  const double r1 = remainder(1e-2);
  const double r2 = remainder(1e-3);
  const double slope = std::log10(r1 / r2);
  EXPECT_GT(slope, 1.9);
  EXPECT_LT(slope, 2.1);
}

TEST(Taylor, QuadraticRemainderOnDesk) {
  DeskBase s;
  std::mt19937_64 rng(2);
  const SpaceTimeField h = random_smooth_field(s.pb.grid, s.pb.time, rng);
  const TaylorReport r =
      taylor_test(s.pb.init, s.pb.control, h, {1e-1, 1e-2, 1e-3, 1e-4}, s.pb.solver,
                  s.pb.model);
  ASSERT_EQ(r.rows.size(), 4u);
  EXPECT_TRUE(std::isnan(r.rows[0].slope));
  for (int i = 1; i < 4; ++i) {
    EXPECT_GT(r.rows[i].slope, 1.9);
    EXPECT_LT(r.rows[i].slope, 2.1);
  }
}

TEST(Taylor, RejectsBadEpsilons) {
  DeskBase s;
  const SpaceTimeField h = SpaceTimeField::constant(s.pb.grid, s.pb.time, 1.0);
  EXPECT_ANY_THROW(taylor_test(s.pb.init, s.pb.control, h, {1e-1, 1e-2},
                               s.pb.solver, s.pb.model));
  EXPECT_ANY_THROW(taylor_test(s.pb.init, s.pb.control, h, {1e-1, 1e-1, 1e-3},
                               s.pb.solver, s.pb.model));
  EXPECT_ANY_THROW(taylor_test(s.pb.init, s.pb.control,
                               SpaceTimeField(s.pb.grid, s.pb.time),
                               {1e-1, 1e-2, 1e-3}, s.pb.solver, s.pb.model));
}
