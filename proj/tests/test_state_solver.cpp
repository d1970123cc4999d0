#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "caginalp/dense_oracle.hpp"
#include "caginalp/errors.hpp"
#include "caginalp/problem.hpp"
#include "caginalp/state_solver.hpp"

using namespace caginalp;

namespace {

Model coupled_model(double tau) {
  Model m;
  auto& p = m.params;
  p.ell = 1.0;
  p.Lambda = 1.0;
  p.chi = 0.5;
  p.tau = tau;
  p.lambda_P = 1.0;
  p.lambda_A = 0.5;
  p.lambda_E = 0.5;
  p.lambda_C = 1.0;
  p.lambda_B = 1.0;
  p.lambda_D = 0.5;
  return m;
}

InitialData smooth_data(const Grid& g) {
  return {cosine_field(g, 0.1, 0.2, 2), cosine_field(g, 0.0, 0.6, 1),
          Field::constant(g, 1.0)};
}

}  // namespace

TEST(WeightedSpdSolver, SolvesPolynomialSystem) {
  const Grid g = Grid::rect(9, 7, 1.0, 0.8);
  const LaplacianPolynomial poly{1.0, 0.3, 0.01, Vector::LinSpaced(63, 0.0, 2.0)};
  const WeightedSpdSolver solver(g, poly, 1e-12, 20);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> d(-1, 1);
  Vector x(g.node_count());
  for (int i = 0; i < x.size(); ++i) x[i] = d(rng);
  const Vector b = solver.op() * x;
  EXPECT_LT((solver.solve(b) - x).cwiseAbs().maxCoeff(), 1e-11);
}

TEST(WeightedSpdSolver, ConstantsAreExact) {
  const Grid g = Grid::line(33, 1.0);
  const double dt = 0.02;
  const WeightedSpdSolver phase(g, {1.0, -dt * (2.0 + 0.0 / dt), dt, {}}, 1e-12, 20);
  const Vector ones = Vector::Constant(33, 0.37);
  EXPECT_EQ((phase.solve(ones) - ones).cwiseAbs().maxCoeff(), 0.0);
}

TEST(WeightedSpdSolver, SingularOperatorFails) {
  // The bare Laplacian has constants in its kernel and cannot reach them.
  const Grid g = Grid::line(5, 1.0);
  EXPECT_ANY_THROW({
    const WeightedSpdSolver s(g, {0.0, 1.0, 0.0, {}}, 1e-12, 20);
    s.solve(Vector::Ones(5));
  });
}

TEST(SolverConfig, Check) {
  SolverConfig c;
  EXPECT_NO_THROW(c.check());
  c.linear_tol = 1e-3;
  EXPECT_THROW(c.check(), ConfigError);
  c = SolverConfig{};
  c.stabilization_S = -1.0;
  EXPECT_THROW(c.check(), ConfigError);
}

TEST(StateStep, EquilibriumChemicalPotential) {
  const Grid g = Grid::line(9, 1.0);
  Model m = coupled_model(0.0);
  m.params.lambda_P = m.params.lambda_A = m.params.lambda_E = 0.0;
  m.params.lambda_C = m.params.lambda_B = m.params.lambda_D = 0.0;
  const double s = 1.5;
  const InitialData init{Field::constant(g, 0.0), Field::constant(g, 0.0),
                         Field::constant(g, s)};
  const StateSnapshot next = step_state(initial_snapshot(init, m),
                                        Field::constant(g, 0.0), 0, 0.05,
                                        SolverConfig{}, m);
  for (int i = 0; i < g.node_count(); ++i) {
    EXPECT_NEAR(next.mu[i], -m.params.chi * s, 1e-14);
    EXPECT_NEAR(next.phi[i], 0.0, 1e-14);
    EXPECT_NEAR(next.sigma[i], s, 1e-14);
    EXPECT_NEAR(next.theta[i], 0.0, 1e-14);
  }
}

TEST(StateStep, MatchesDenseOracle) {
  for (double tau : {0.0, 1.0}) {
    const Grid g = Grid::line(5, 1.0);
    const TimeGrid t(0.3, 3);
    const Model m = coupled_model(tau);
    const InitialData init = smooth_data(g);
    const SpaceTimeField u = wave_field(g, t, 0.5, 1.0, 1);
    const StateTrajectory traj = solve_state(init, u, SolverConfig{}, m);
    const auto dense = DenseOracle(g, t, m, SolverConfig{}).state(init, u);
    for (int n = 0; n <= 3; ++n) {
      const int N = g.node_count();
      const auto& s = traj[n];
      const Vector v = (Vector(4 * N) << s.theta.values(), s.phi.values(),
                        s.mu.values(), s.sigma.values())
                           .finished();
      EXPECT_LT((v - dense[n]).cwiseAbs().maxCoeff(), 1e-10) << tau << " " << n;
    }
  }
}

TEST(DenseOracle, RefusesLargeProblems) {
  const Model m;
  EXPECT_THROW(DenseOracle(Grid::line(6, 1.0), TimeGrid(1.0, 2), m, SolverConfig{}),
               ConfigError);
  EXPECT_THROW(DenseOracle(Grid::line(5, 1.0), TimeGrid(1.0, 4), m, SolverConfig{}),
               ConfigError);
}

TEST(StateSolve, DiscreteConservationIdentities) {
  const Grid g = Grid::rect(9, 7, 1.0, 1.0);
  const TimeGrid t(0.2, 20);
  const Model m = coupled_model(0.5);
  const InitialData init = smooth_data(g);
  const SpaceTimeField u = wave_field(g, t, 1.0, 2.0, 1);
  const StateTrajectory traj = solve_state(init, u, SolverConfig{}, m);
  const double dt = t.dt();
  const auto& p = m.params;
  for (int n = 0; n < t.steps(); ++n) {
    const auto& a = traj[n];
    const auto& b = traj[n + 1];
    const double heat = integrate(g, b.theta.values() + p.ell * b.phi.values()) -
                        integrate(g, a.theta.values() + p.ell * a.phi.values());
    EXPECT_NEAR(heat, dt * integrate(u.slice(n)), 1e-13);

    const Vector h = map_values(m.nonlin.h_gate.value, a.phi.values());
    const Vector src = ((p.lambda_P * a.sigma.values().array() - p.lambda_A -
                         p.lambda_E * a.theta.values().array()) *
                        h.array())
                           .matrix();
    const double mass = integrate(g, b.phi.values()) - integrate(g, a.phi.values());
    EXPECT_NEAR(mass, dt * integrate(g, src), 1e-13);
  }
  EXPECT_EQ(traj.diagnostics.size(), 21u);
  EXPECT_DOUBLE_EQ(traj.diagnostics[20].time, 0.2);
}

TEST(StateSolve, NonFiniteControlRaisesSolverError) {
  const Grid g = Grid::line(9, 1.0);
  const TimeGrid t(0.1, 5);
  SpaceTimeField u(g, t);
  u.slice(2).values()[4] = std::numeric_limits<double>::quiet_NaN();
  try {
    solve_state(smooth_data(g), u, SolverConfig{}, coupled_model(0.0));
    FAIL() << "expected SolverError";
  } catch (const SolverError& e) {
    EXPECT_EQ(e.step(), 3);
  }
}

TEST(StateSolve, ControlSliceNtIsIgnored) {
  const Grid g = Grid::line(9, 1.0);
  const TimeGrid t(0.1, 4);
  SpaceTimeField u = SpaceTimeField::constant(g, t, 1.0);
  const StateTrajectory a = solve_state(smooth_data(g), u, SolverConfig{}, coupled_model(0));
  u.slice(4) = Field::constant(g, 50.0);
  const StateTrajectory b = solve_state(smooth_data(g), u, SolverConfig{}, coupled_model(0));
  EXPECT_EQ(a.final().theta.values(), b.final().theta.values());
}

TEST(LipschitzProbe, RatioIsFiniteAndCoincidentControlsRejected) {
  const Grid g = Grid::line(17, 1.0);
  const TimeGrid t(0.5, 10);
  const SpaceTimeField u = SpaceTimeField::constant(g, t, 1.0);
  const SpaceTimeField v = wave_field(g, t, 1.0, 0.1, 2);
  const LipschitzReport r =
      lipschitz_probe(u, v, smooth_data(g), SolverConfig{}, coupled_model(0.0));
  EXPECT_GT(r.ratio, 0.0);
  EXPECT_TRUE(std::isfinite(r.ratio));
  EXPECT_THROW(lipschitz_probe(u, u, smooth_data(g), SolverConfig{}, coupled_model(0.0)),
               UsageError);
}

TEST(Energy, DecreasesForPureCahnHilliard) {
  const Grid g = Grid::line(33, 1.0);
  const TimeGrid t(1.0, 50);
  Model m = coupled_model(0.0);
  auto& p = m.params;
  p.Lambda = p.chi = p.ell = 0.0;
  p.lambda_P = p.lambda_A = p.lambda_E = p.lambda_C = p.lambda_B = p.lambda_D = 0.0;
  const InitialData init{Field::constant(g, 0.0), cosine_field(g, 0.1, 0.5, 3),
                         Field::constant(g, 0.0)};
  const StateTrajectory traj = solve_state(init, SpaceTimeField(g, t), SolverConfig{}, m);
  for (int n = 0; n < t.steps(); ++n) {
    EXPECT_LE(traj.diagnostics[n + 1].energy,
              traj.diagnostics[n].energy + 1e-13 * std::abs(traj.diagnostics[n].energy));
  }
}
