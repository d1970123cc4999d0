#include "caginalp/control_problem.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "caginalp/errors.hpp"

namespace caginalp {

AdmissibleSet AdmissibleSet::constant(const Grid& grid, const TimeGrid& time,
                                      double lower, double upper,
                                      double m_bound) {
  return {SpaceTimeField::constant(grid, time, lower),
          SpaceTimeField::constant(grid, time, upper), m_bound};
}

void AdmissibleSet::check() const {
  if (lower.time() != upper.time()) {
    throw UsageError("admissible bounds use different time grids");
  }
  require_same_grid(lower.grid(), upper.grid(), "admissible bounds");
  double largest = 0.0;
  for (int n = 0; n < lower.slice_count(); ++n) {
    const Vector& lo = lower.slice(n).values();
    const Vector& hi = upper.slice(n).values();
    for (int i = 0; i < lo.size(); ++i) {
      if (!(lo[i] <= hi[i])) {
        throw ConfigError("u_min > u_max at slice " + std::to_string(n) +
                          ", node " + std::to_string(i));
      }
      largest = std::max({largest, std::abs(lo[i]), std::abs(hi[i])});
    }
  }
  if (!(largest < m_bound)) {
    throw ConfigError("m_bound must exceed max(|u_min|, |u_max|)");
  }
}

bool AdmissibleSet::contains(const SpaceTimeField& u) const {
  for (int n = 0; n < u.slice_count(); ++n) {
    const Vector& v = u.slice(n).values();
    const Vector& lo = lower.slice(n).values();
    const Vector& hi = upper.slice(n).values();
    for (int i = 0; i < v.size(); ++i) {
      if (v[i] < lo[i] || v[i] > hi[i]) return false;
    }
  }
  return true;
}

SpaceTimeField project_admissible(const SpaceTimeField& u,
                                  const AdmissibleSet& adm) {
  adm.check();
  if (u.time() != adm.lower.time()) {
    throw UsageError("project_admissible: time grid mismatch");
  }
  require_same_grid(u.grid(), adm.lower.grid(), "project_admissible");
  SpaceTimeField out = u;
  for (int n = 0; n < out.slice_count(); ++n) {
    Vector& v = out.slice(n).values();
    v = v.cwiseMax(adm.lower.slice(n).values())
            .cwiseMin(adm.upper.slice(n).values());
  }
  return out;
}

void OptimizerConfig::check() const {
  if (!(armijo_c > 0.0 && armijo_c < 1.0)) {
    throw ConfigError("armijo_c must lie in (0, 1)");
  }
  if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0)) {
    throw ConfigError("backtrack_factor must lie in (0, 1)");
  }
  if (!(initial_step > 0.0) || !(min_step > 0.0) ||
      !(stationarity_tol >= 0.0) || max_iters < 0) {
    throw ConfigError("optimizer steps, tolerance and max_iters must be positive");
  }
}

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::Converged:
      return "converged";
    case StopReason::MaxIterations:
      return "max_iterations";
    case StopReason::StepTooSmall:
      return "step_too_small";
  }
  return "unknown";
}

double stationarity_measure(const SpaceTimeField& u, const SpaceTimeField& g,
                            const AdmissibleSet& adm) {
  return spacetime_norm(u - project_admissible(u - g, adm));
}

namespace {

SpaceTimeField adjoint_z_field(const AdjointTrajectory& adj) {
  std::vector<Field> slices;
  slices.reserve(adj.snapshots.size());
  for (const auto& s : adj.snapshots) slices.push_back(s.z);
  return SpaceTimeField(adj.time, std::move(slices));
}

SpaceTimeField gradient_from(const AdjointTrajectory& adj,
                             const SpaceTimeField& u, double b5) {
  SpaceTimeField g(u.grid(), u.time());
  for (int n = 0; n < u.time().steps(); ++n) {
    g.slice(n).values() = adj[n].z.values() + b5 * u.slice(n).values();
  }
  return g;
}

}  // namespace

OptimizationReport projected_gradient_descent(
    const InitialData& init, const SpaceTimeField& u0, const AdmissibleSet& adm,
    const CostSpec& cost, const OptimizerConfig& opt, const SolverConfig& cfg,
    const Model& model) {
  opt.check();
  adm.check();

  SpaceTimeField u = project_admissible(u0, adm);
  StateTrajectory state = solve_state(init, u, cfg, model);
  double j = evaluate_cost(state, u, cost);
  AdjointTrajectory adj = solve_adjoint(state, cost, cfg, model);
  SpaceTimeField g = gradient_from(adj, u, cost.b5);
  int sweeps = 2;

  OptimizationReport report{{}, StopReason::MaxIterations, u, adjoint_z_field(adj), g};
  double stat = stationarity_measure(u, g, adm);
  report.iterates.push_back({0, j, stat, 0.0, 0, sweeps});

  for (int k = 1;; ++k) {
    if (stat <= opt.stationarity_tol) {
      report.reason = StopReason::Converged;
      break;
    }
    if (k > opt.max_iters) {
      report.reason = StopReason::MaxIterations;
      break;
    }
    double alpha = opt.initial_step;
    int backtracks = 0;
    bool accepted = false;
    SpaceTimeField trial = u;
    StateTrajectory trial_state = state;
    double trial_j = j;
    while (alpha >= opt.min_step) {
      trial = project_admissible(u - alpha * g, adm);
      const double decrease = spacetime_inner(g, trial - u);
      // A trial that no longer moves u (steps below the resolution of u) is
      // not progress, whatever the cost comparison says.
      if (!(decrease < 0.0)) break;
      trial_state = solve_state(init, trial, cfg, model);
      ++sweeps;
      const double change = cost_change(state, u, trial_state, trial, cost);
      if (change <= opt.armijo_c * decrease) {
        trial_j = evaluate_cost(trial_state, trial, cost);
        accepted = true;
        break;
      }
      alpha *= opt.backtrack_factor;
      ++backtracks;
    }
    if (!accepted) {
      report.reason = StopReason::StepTooSmall;
      break;
    }
    u = std::move(trial);
    state = std::move(trial_state);
    j = trial_j;
    adj = solve_adjoint(state, cost, cfg, model);
    ++sweeps;
    g = gradient_from(adj, u, cost.b5);
    stat = stationarity_measure(u, g, adm);
    report.iterates.push_back({k, j, stat, alpha, backtracks, sweeps});
  }
  report.control = u;
  report.adjoint_z = adjoint_z_field(adj);
  report.gradient = g;
  return report;
}

double StationarityReport::min_vi_sample() const {
  return vi_samples.empty()
             ? 0.0
             : *std::min_element(vi_samples.begin(), vi_samples.end());
}

StationarityReport stationarity_check(const SpaceTimeField& u,
                                      const SpaceTimeField& gradient,
                                      const AdmissibleSet& adm, int samples,
                                      std::uint64_t seed) {
  StationarityReport report;
  report.measure = stationarity_measure(u, gradient, adm);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int s = 0; s < samples; ++s) {
    SpaceTimeField v = adm.lower;
    for (int n = 0; n < v.slice_count(); ++n) {
      Vector& vals = v.slice(n).values();
      const Vector& hi = adm.upper.slice(n).values();
      for (int i = 0; i < vals.size(); ++i) {
        vals[i] += unit(rng) * (hi[i] - vals[i]);
      }
    }
    report.vi_samples.push_back(spacetime_inner(gradient, v - u));
  }
  return report;
}

StationarityReport stationarity_check(const InitialData& init,
                                      const SpaceTimeField& u,
                                      const AdmissibleSet& adm,
                                      const CostSpec& cost,
                                      const SolverConfig& cfg,
                                      const Model& model, int samples,
                                      std::uint64_t seed) {
  const GradientResult gr = reduced_gradient(init, u, cost, cfg, model);
  return stationarity_check(u, gr.gradient, adm, samples, seed);
}

}  // namespace caginalp
