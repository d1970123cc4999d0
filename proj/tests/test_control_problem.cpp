#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "caginalp/control_problem.hpp"
#include "caginalp/errors.hpp"
#include "caginalp/problem.hpp"

using namespace caginalp;

namespace {

Problem pure_regularization(double lo, double hi, double start) {
  Problem pb = desk_problem();
  pb.cost = CostSpec::with_zero_targets(pb.grid, pb.time, 0, 0, 0, 0, 1.0);
  pb.admissible = AdmissibleSet::constant(pb.grid, pb.time, lo, hi, 4.0);
  pb.optimizer.initial_step = 1.0;
  pb.optimizer_start = SpaceTimeField::constant(pb.grid, pb.time, start);
  return pb;
}

}  // namespace

TEST(Cost, RegularizationOnly) {
  const Grid g = Grid::line(9, 1.0);
  const TimeGrid t(1.0, 10);
  const CostSpec c = CostSpec::with_zero_targets(g, t, 0, 0, 0, 0, 2.0);
  const InitialData init{Field(g), Field(g), Field::constant(g, 1.0)};
  const SpaceTimeField u = SpaceTimeField::constant(g, t, 1.0);
  const StateTrajectory traj = solve_state(init, u, SolverConfig{}, Model{});
  EXPECT_NEAR(evaluate_cost(traj, u, c), 1.0, 1e-14);
}

TEST(Cost, TrackingTermsAndChange) {
  const Problem pb = desk_problem();
  const StateTrajectory ref = solve_state(pb.init, pb.control, pb.solver, pb.model);
  CostSpec c = pb.cost;
  c.b5 = 1e-300;
  EXPECT_NEAR(evaluate_cost(ref, pb.control, c), 0.0, 1e-20);

  const SpaceTimeField zero(pb.grid, pb.time);
  const StateTrajectory other = solve_state(pb.init, zero, pb.solver, pb.model);
  const double direct = evaluate_cost(other, zero, pb.cost) -
                        evaluate_cost(ref, pb.control, pb.cost);
  EXPECT_NEAR(cost_change(ref, pb.control, other, zero, pb.cost), direct,
              1e-12 * std::abs(direct));
}

TEST(Cost, WeightChecks) {
  const Grid g = Grid::line(5, 1.0);
  const TimeGrid t(1.0, 2);
  EXPECT_THROW(CostSpec::with_zero_targets(g, t, -1, 0, 0, 0, 1).check(g, t), ConfigError);
  EXPECT_THROW(CostSpec::with_zero_targets(g, t, 0, 0, 0, 0, 0).check(g, t), ConfigError);
  EXPECT_THROW(CostSpec::with_zero_targets(g, t, 0, 0, 0, 0, 1).check(g, TimeGrid(1.0, 3)),
               UsageError);
}

TEST(Admissible, ChecksFeasibilityAndBound) {
  const Grid g = Grid::line(5, 1.0);
  const TimeGrid t(1.0, 2);
  EXPECT_NO_THROW(AdmissibleSet::constant(g, t, -1, 1, 2).check());
  EXPECT_THROW(AdmissibleSet::constant(g, t, 1, -1, 2).check(), ConfigError);
  EXPECT_THROW(AdmissibleSet::constant(g, t, -1, 3, 2).check(), ConfigError);
}

TEST(Admissible, ProjectionProperties) {
  const Grid g = Grid::line(9, 1.0);
  const TimeGrid t(1.0, 6);
  const AdmissibleSet adm = AdmissibleSet::constant(g, t, -0.5, 0.8, 2);
  std::mt19937_64 rng(12);
  const SpaceTimeField u = 3.0 * random_smooth_field(g, t, rng);
  const SpaceTimeField v = 3.0 * random_smooth_field(g, t, rng);
  const SpaceTimeField pu = project_admissible(u, adm);
  EXPECT_TRUE(adm.contains(pu));
  EXPECT_FALSE(adm.contains(u));
  // Idempotent.
  const SpaceTimeField ppu = project_admissible(pu, adm);
  for (int n = 0; n <= 6; ++n) EXPECT_EQ(ppu.slice(n).values(), pu.slice(n).values());
  // Nonexpansive, and (u - Pu, w - Pu) <= 0 for admissible w.
  const SpaceTimeField pv = project_admissible(v, adm);
  EXPECT_LE(spacetime_norm(pu - pv), spacetime_norm(u - v) + 1e-15);
  EXPECT_LE(spacetime_inner(u - pu, pv - pu), 1e-15);
}

TEST(Stationarity, ZeroAtClampedPoint) {
  const Grid g = Grid::line(9, 1.0);
  const TimeGrid t(1.0, 4);
  const AdmissibleSet adm = AdmissibleSet::constant(g, t, 0.0, 1.0, 2);
  const SpaceTimeField u(g, t);
  const SpaceTimeField grad = SpaceTimeField::constant(g, t, 0.7);  // pushes below 0
  EXPECT_EQ(stationarity_measure(u, grad, adm), 0.0);
  const StationarityReport r = stationarity_check(u, grad, adm, 50, 1);
  EXPECT_EQ(r.vi_samples.size(), 50u);
  EXPECT_GE(r.min_vi_sample(), 0.0);
}

TEST(Optimizer, PureRegularizationClampsToLowerBound) {
  const Problem pb = pure_regularization(0.2, 1.0, 0.5);
  const OptimizationReport r = projected_gradient_descent(
      pb.init, pb.optimizer_start, pb.admissible, pb.cost, pb.optimizer, pb.solver,
      pb.model);
  EXPECT_EQ(r.reason, StopReason::Converged);
  EXPECT_LE(r.iterates.size(), 3u);  // start plus at most two steps
  for (int n = 0; n < pb.time.steps(); ++n) {
    EXPECT_NEAR(r.control.slice(n).values().maxCoeff(), 0.2, 1e-14);
    EXPECT_NEAR(r.control.slice(n).values().minCoeff(), 0.2, 1e-14);
  }
}

TEST(Optimizer, PureRegularizationReachesZeroInsideBox) {
  const Problem pb = pure_regularization(-1.0, 1.0, 0.5);
  const OptimizationReport r = projected_gradient_descent(
      pb.init, pb.optimizer_start, pb.admissible, pb.cost, pb.optimizer, pb.solver,
      pb.model);
  EXPECT_EQ(r.reason, StopReason::Converged);
  EXPECT_LE(r.iterates.size(), 3u);
  EXPECT_LT(spacetime_norm(r.control), 1e-14);
}

TEST(Optimizer, DeskTrackingConverges) {
  const Problem pb = desk_problem();
  const OptimizationReport r = projected_gradient_descent(
      pb.init, pb.optimizer_start, pb.admissible, pb.cost, pb.optimizer, pb.solver,
      pb.model);
  EXPECT_LE(r.final_stationarity(), 1e-6);
  EXPECT_LE(static_cast<int>(r.iterates.size()) - 1, 200);
  for (std::size_t k = 1; k < r.iterates.size(); ++k) {
    EXPECT_LE(r.iterates[k].cost, r.iterates[k - 1].cost);
  }
  EXPECT_TRUE(pb.admissible.contains(r.control));
}

TEST(Optimizer, ConfigCheck) {
  OptimizerConfig c;
  EXPECT_NO_THROW(c.check());
  c.backtrack_factor = 1.5;
  EXPECT_THROW(c.check(), ConfigError);
  c = OptimizerConfig{};
  c.max_iters = -1;
  EXPECT_THROW(c.check(), ConfigError);
}
