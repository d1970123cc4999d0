#include "caginalp/problem.hpp"

#include <cmath>
#include <numbers>

namespace caginalp {

namespace {

Vector cosine_profile(const Grid& grid, int mode) {
  Vector v(grid.node_count());
  for (int k = 0; k < grid.node_count(); ++k) {
    const auto ij = grid.multi_index(k);
    double value = 1.0;
    for (int d = 0; d < grid.dim(); ++d) {
      value *= std::cos(mode * std::numbers::pi * grid.coordinate(d, ij[d]) /
                        grid.length(d));
    }
    v[k] = value;
  }
  return v;
}

}  // namespace

Field cosine_field(const Grid& grid, double mean, double amp, int mode) {
  Vector v = cosine_profile(grid, mode);
  return Field(grid, (mean + amp * v.array()).matrix());
}

SpaceTimeField wave_field(const Grid& grid, const TimeGrid& time, double mean,
                          double amp, int mode) {
  const Vector profile = cosine_profile(grid, mode);
  SpaceTimeField u(grid, time);
  for (int n = 0; n < u.slice_count(); ++n) {
    const double s = std::sin(std::numbers::pi * time.time(n) / time.horizon());
    u.slice(n).values() = (mean + amp * s * profile.array()).matrix();
  }
  return u;
}

Field random_smooth_field(const Grid& grid, std::mt19937_64& rng, int modes) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  Vector v = Vector::Zero(grid.node_count());
  for (int kx = 0; kx < modes; ++kx) {
    for (int ky = 0; ky < (grid.dim() == 2 ? modes : 1); ++ky) {
      const double a = coef(rng) / (1.0 + kx + ky);
      for (int k = 0; k < grid.node_count(); ++k) {
        const auto ij = grid.multi_index(k);
        double value = std::cos(kx * std::numbers::pi *
                                grid.coordinate(0, ij[0]) / grid.length(0));
        if (grid.dim() == 2) {
          value *= std::cos(ky * std::numbers::pi * grid.coordinate(1, ij[1]) /
                            grid.length(1));
        }
        v[k] += a * value;
      }
    }
  }
  return Field(grid, std::move(v));
}

SpaceTimeField random_smooth_field(const Grid& grid, const TimeGrid& time,
                                   std::mt19937_64& rng, int modes) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::vector<Field> shapes;
  std::vector<double> phase_sin;
  std::vector<double> phase_cos;
  for (int m = 0; m < modes; ++m) {
    shapes.push_back(random_smooth_field(grid, rng, modes));
    phase_sin.push_back(coef(rng));
    phase_cos.push_back(coef(rng));
  }
  SpaceTimeField out(grid, time);
  for (int n = 0; n < out.slice_count(); ++n) {
    const double t = std::numbers::pi * time.time(n) / time.horizon();
    Vector& v = out.slice(n).values();
    for (int m = 0; m < modes; ++m) {
      const double w = (phase_sin[m] * std::sin(m * t) +
                        phase_cos[m] * std::cos(m * t)) /
                       (1.0 + m);
      v += w * shapes[m].values();
    }
  }
  return out;
}

void set_targets_from(CostSpec& cost, const StateTrajectory& reference) {
  std::vector<Field> theta;
  std::vector<Field> phi;
  for (const auto& s : reference.snapshots) {
    theta.push_back(s.theta);
    phi.push_back(s.phi);
  }
  cost.theta_Q = SpaceTimeField(reference.time, std::move(theta));
  cost.phi_Q = SpaceTimeField(reference.time, std::move(phi));
  cost.theta_Omega = reference.final().theta;
  cost.phi_Omega = reference.final().phi;
}

Problem desk_problem() {
  const Grid grid = Grid::line(33, 1.0);
  const TimeGrid time(1.0, 50);

  Model model;
  ModelParams& p = model.params;
  p.ell = 1.0;
  p.Lambda = 1.0;
  p.chi = 0.5;
  p.tau = 0.0;
  p.lambda_P = 1.0;
  p.lambda_A = 0.5;
  p.lambda_E = 0.5;
  p.lambda_C = 1.0;
  p.lambda_B = 1.0;
  p.lambda_D = 0.5;
  p.sigma_B = 1.0;

  SolverConfig solver;
  InitialData init{cosine_field(grid, 0.0, 0.2, 2),
                   cosine_field(grid, 0.0, 0.6, 1),
                   Field::constant(grid, 1.0)};
  SpaceTimeField u_ref = wave_field(grid, time, 1.0, 1.0, 1);

  CostSpec cost = CostSpec::with_zero_targets(grid, time, 1.0, 1.0, 1.0, 1.0, 0.1);
  set_targets_from(cost, solve_state(init, u_ref, solver, model));

  OptimizerConfig optimizer;
  optimizer.initial_step = 10.0;
  optimizer.stationarity_tol = 1e-8;

  return Problem{grid,
                 time,
                 model,
                 solver,
                 init,
                 u_ref,
                 cost,
                 AdmissibleSet::constant(grid, time, -1.0, 3.0, 4.0),
                 optimizer,
                 SpaceTimeField(grid, time)};
}

}  // namespace caginalp
