#include "caginalp/verification.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>

#include "caginalp/csv_io.hpp"
#include "caginalp/dense_oracle.hpp"
#include "caginalp/errors.hpp"
#include "caginalp/linearized_solver.hpp"

namespace caginalp {

namespace {

Measurement at_most(const std::string& name, double value, double tol) {
  return {name, value, tol, "<=", 0.0, value <= tol};
}

Measurement at_least(const std::string& name, double value, double tol) {
  return {name, value, tol, ">=", 0.0, value >= tol};
}

Measurement within(const std::string& name, double value, double lo,
                   double hi) {
  return {name, value, lo, "in", hi, value >= lo && value <= hi};
}

double relative_gap(double a, double b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

// Independent random streams per test, so that selecting a subset of tests
// does not change what each of them sees.
std::mt19937_64 stream(std::uint64_t seed, const std::string& test) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(std::hash<std::string>{}(test))};
  return std::mt19937_64(seq);
}

SpaceTimeField normalized(SpaceTimeField f) {
  const double n = spacetime_norm(f);
  if (n > 0.0) f *= 1.0 / n;
  return f;
}

// Base point of the derivative checks: the configured control plus a random
// smooth offset, so that tracking residuals are generically nonzero.
SpaceTimeField probe_control(const Problem& pb, std::mt19937_64& rng) {
  return pb.control + 0.5 * random_smooth_field(pb.grid, pb.time, rng);
}

void require_cost(const VerifySuiteConfig& cfg, const char* test) {
  if (!cfg.has_cost) {
    throw ConfigError(std::string(test) + " needs a [cost] section");
  }
}

void require_bounds(const VerifySuiteConfig& cfg, const char* test) {
  require_cost(cfg, test);
  if (!cfg.has_admissible) {
    throw ConfigError(std::string(test) + " needs an [admissible] section");
  }
}

// --- individual tests --------------------------------------------------------

void test_conservation(const VerifySuiteConfig& cfg, const Problem& pb,
                       TestResult& out) {
  auto rng = stream(cfg.seed, "conservation");
  const TimeGrid time(pb.time.dt() * cfg.conservation_steps,
                      cfg.conservation_steps);
  const SpaceTimeField u = random_smooth_field(pb.grid, time, rng);
  const StateTrajectory traj = solve_state(pb.init, u, pb.solver, pb.model);
  const auto& par = pb.model.params;
  const auto& nl = pb.model.nonlin;
  const double dt = time.dt();

  double worst_heat = 0.0;
  double worst_phase = 0.0;
  for (int n = 0; n < time.steps(); ++n) {
    const StateSnapshot& a = traj[n];
    const StateSnapshot& b = traj[n + 1];
    const Vector mass_a = a.theta.values() + par.ell * a.phi.values();
    const Vector mass_b = b.theta.values() + par.ell * b.phi.values();
    const double lhs_heat = integrate(pb.grid, mass_b - mass_a);
    const double rhs_heat = dt * integrate(u.slice(n));
    const double scale_heat =
        dt * integrate(pb.grid, u.slice(n).values().cwiseAbs());
    worst_heat = std::max(worst_heat, std::abs(lhs_heat - rhs_heat) /
                                          std::max(scale_heat, 1e-300));

    const Vector source =
        ((par.lambda_P * a.sigma.values().array() - par.lambda_A -
          par.lambda_E * a.theta.values().array()) *
         map_values(nl.h_gate.value, a.phi.values()).array())
            .matrix();
    const double lhs_phase = integrate(pb.grid, b.phi.values() - a.phi.values());
    const double rhs_phase = dt * integrate(pb.grid, source);
    const double scale_phase = dt * integrate(pb.grid, source.cwiseAbs());
    if (scale_phase > 0.0) {
      worst_phase = std::max(worst_phase,
                             std::abs(lhs_phase - rhs_phase) / scale_phase);
    } else {
      // No source at all: the phase mass must not move, relative to its size.
      const double m = std::max(integrate(pb.grid, a.phi.values().cwiseAbs()), 1.0);
      worst_phase = std::max(worst_phase, std::abs(lhs_phase) / m);
    }
  }
  out.measurements.push_back(
      at_most("max_rel_error_theta_ell_phi", worst_heat, cfg.tol.conservation));
  out.measurements.push_back(
      at_most("max_rel_error_phi", worst_phase, cfg.tol.conservation));
}

void test_equilibrium(const VerifySuiteConfig& cfg, const Problem& pb,
                      TestResult& out) {
  const TimeGrid time(pb.time.dt() * cfg.equilibrium_steps,
                      cfg.equilibrium_steps);
  Model model = pb.model;
  auto& p = model.params;
  p.lambda_P = p.lambda_A = p.lambda_E = 0.0;
  p.lambda_C = p.lambda_B = p.lambda_D = 0.0;
  const InitialData init{Field::constant(pb.grid, 0.3),
                         Field::constant(pb.grid, 0.5),
                         Field::constant(pb.grid, 0.8)};
  const StateTrajectory traj =
      solve_state(init, SpaceTimeField(pb.grid, time), pb.solver, model);
  double drift = 0.0;
  const StateSnapshot& s0 = traj[0];
  for (const auto& s : traj.snapshots) {
    drift = std::max({drift,
                      (s.theta.values() - s0.theta.values()).lpNorm<Eigen::Infinity>(),
                      (s.phi.values() - s0.phi.values()).lpNorm<Eigen::Infinity>(),
                      (s.mu.values() - s0.mu.values()).lpNorm<Eigen::Infinity>(),
                      (s.sigma.values() - s0.sigma.values()).lpNorm<Eigen::Infinity>()});
  }
  out.measurements.push_back(at_most("max_linf_drift", drift, cfg.tol.equilibrium));
}

void test_oracle(const VerifySuiteConfig& cfg, const Problem& pb,
                 TestResult& out) {
  Table table{"oracle_report.csv",
              {"case", "state", "linearized", "adjoint"},
              {}};
  double worst_state = 0.0;
  double worst_lin = 0.0;
  double worst_adj = 0.0;
  const auto cases = pinned_oracle_cases();
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const OracleComparison c =
        compare_with_oracle(cases[i], pb.solver, cfg.seed + i);
    worst_state = std::max(worst_state, c.state);
    worst_lin = std::max(worst_lin, c.linearized);
    worst_adj = std::max(worst_adj, c.adjoint);
    table.rows.push_back({cases[i].label, format_real(c.state),
                          format_real(c.linearized), format_real(c.adjoint)});
  }
  out.measurements.push_back(at_most("max_state_gap", worst_state, cfg.tol.oracle));
  out.measurements.push_back(at_most("max_linearized_gap", worst_lin, cfg.tol.oracle));
  out.measurements.push_back(at_most("max_adjoint_gap", worst_adj, cfg.tol.oracle));
  out.tables.push_back(std::move(table));
}

void test_taylor(const VerifySuiteConfig& cfg, const Problem& pb,
                 TestResult& out) {
  auto rng = stream(cfg.seed, "taylor");
  const SpaceTimeField h = random_smooth_field(pb.grid, pb.time, rng);
  const TaylorReport rep =
      taylor_test(pb.init, pb.control, h, cfg.taylor_epsilons, pb.solver, pb.model);

  Table table{"taylor_report.csv", {"epsilon", "remainder_norm", "slope"}, {}};
  double slope_min = std::numeric_limits<double>::infinity();
  double slope_max = -std::numeric_limits<double>::infinity();
  int in_window = 0;
  for (const auto& row : rep.rows) {
    table.rows.push_back({format_real(row.epsilon), format_real(row.remainder),
                          format_real(row.slope)});
    const bool window = row.epsilon <= cfg.taylor_window_max * (1 + 1e-12) &&
                        row.epsilon >= cfg.taylor_window_min * (1 - 1e-12);
    // A slope needs its own and the previous row inside the window.
    const bool prev_in = row.epsilon * 10.0 <= cfg.taylor_window_max * (1 + 1e-9);
    if (window && prev_in && !std::isnan(row.slope) && !row.roundoff_floor) {
      slope_min = std::min(slope_min, row.slope);
      slope_max = std::max(slope_max, row.slope);
      ++in_window;
    }
  }
  out.tables.push_back(std::move(table));
  if (in_window == 0) {
    out.measurements.push_back(at_least("slopes_before_floor", 0, 1));
  } else {
    out.measurements.push_back(within("min_slope", slope_min,
                                      cfg.tol.taylor_slope_min,
                                      cfg.tol.taylor_slope_max));
    out.measurements.push_back(within("max_slope", slope_max,
                                      cfg.tol.taylor_slope_min,
                                      cfg.tol.taylor_slope_max));
  }

  // Affine regime: the remainder is pure roundoff.
  Model linear = fully_linear_model(pb.model);
  const TaylorReport lin =
      taylor_test(pb.init, pb.control, h, cfg.taylor_epsilons, pb.solver, linear);
  double worst = 0.0;
  for (const auto& row : lin.rows) worst = std::max(worst, row.remainder);
  out.measurements.push_back(
      at_most("linear_regime_max_remainder", worst, cfg.tol.taylor_linear));
}

// Random loads w on (zeta^k, xi^k), k = 1..nt, and the pairing
// sum_k (zeta^k, w_theta^k) + (xi^k, w_phi^k).
AdjointSources random_loads(const Grid& grid, const TimeGrid& time,
                            std::mt19937_64& rng) {
  AdjointSources w = AdjointSources::zero(grid, time.steps());
  const SpaceTimeField a = random_smooth_field(grid, time, rng);
  const SpaceTimeField b = random_smooth_field(grid, time, rng);
  for (int k = 1; k <= time.steps(); ++k) {
    w.theta[k] = a.slice(k).values();
    w.phi[k] = b.slice(k).values();
  }
  return w;
}

double pair_loads(const LinearizedTrajectory& lin, const AdjointSources& w) {
  const Grid& grid = lin[0].zeta.grid();
  double s = 0.0;
  for (int k = 1; k <= lin.time.steps(); ++k) {
    s += inner_product(grid, lin[k].zeta.values(), w.theta[k]) +
         inner_product(grid, lin[k].xi.values(), w.phi[k]);
  }
  return s;
}

double pair_controls(const AdjointTrajectory& adj, const SpaceTimeField& h) {
  double s = 0.0;
  for (int n = 0; n < h.time().steps(); ++n) {
    s += h.time().dt() * inner_product(h.slice(n), adj[n].z);
  }
  return s;
}

void test_adjoint(const VerifySuiteConfig& cfg, const Problem& pb,
                  TestResult& out) {
  require_cost(cfg, "adjoint");
  auto rng = stream(cfg.seed, "adjoint");
  const SpaceTimeField u = probe_control(pb, rng);
  const StateTrajectory base = solve_state(pb.init, u, pb.solver, pb.model);

  Table dot{"dot_product_report.csv", {"trial", "lhs", "rhs", "relative_error"}, {}};
  double worst_dot = 0.0;
  for (int t = 0; t < cfg.dot_product_trials; ++t) {
    const SpaceTimeField h = random_smooth_field(pb.grid, pb.time, rng);
    const AdjointSources w = random_loads(pb.grid, pb.time, rng);
    const double lhs =
        pair_loads(solve_linearized(base, h, pb.solver, pb.model), w);
    const double rhs =
        pair_controls(solve_adjoint(base, w, pb.solver, pb.model), h);
    const double rel = relative_gap(lhs, rhs);
    worst_dot = std::max(worst_dot, rel);
    dot.rows.push_back({std::to_string(t), format_real(lhs), format_real(rhs),
                        format_real(rel)});
  }

  Table dual{"duality_report.csv", {"trial", "lhs", "rhs", "relative_error"}, {}};
  const AdjointTrajectory adj = solve_adjoint(base, pb.cost, pb.solver, pb.model);
  const CostSpec& c = pb.cost;
  const double dt = pb.time.dt();
  const int nt = pb.time.steps();
  double worst_dual = 0.0;
  for (int t = 0; t < cfg.duality_trials; ++t) {
    const SpaceTimeField h = random_smooth_field(pb.grid, pb.time, rng);
    const LinearizedTrajectory lin = solve_linearized(base, h, pb.solver, pb.model);
    const double lhs = pair_controls(adj, h);
    double rhs = 0.0;
    for (int n = 0; n < nt; ++n) {
      rhs += dt * (c.b1 * inner_product(pb.grid,
                                        base[n].theta.values() - c.theta_Q.slice(n).values(),
                                        lin[n].zeta.values()) +
                   c.b3 * inner_product(pb.grid,
                                        base[n].phi.values() - c.phi_Q.slice(n).values(),
                                        lin[n].xi.values()));
    }
    rhs += c.b2 * inner_product(pb.grid, base.final().theta.values() - c.theta_Omega.values(),
                                lin[nt].zeta.values()) +
           c.b4 * inner_product(pb.grid, base.final().phi.values() - c.phi_Omega.values(),
                                lin[nt].xi.values());
    const double rel = relative_gap(lhs, rhs);
    worst_dual = std::max(worst_dual, rel);
    dual.rows.push_back({std::to_string(t), format_real(lhs), format_real(rhs),
                         format_real(rel)});
  }
  out.measurements.push_back(
      at_most("dot_product_max_rel_error", worst_dot, cfg.tol.dot_product));
  out.measurements.push_back(
      at_most("duality_max_rel_error", worst_dual, cfg.tol.duality));
  out.tables.push_back(std::move(dot));
  out.tables.push_back(std::move(dual));
}

void test_gradient(const VerifySuiteConfig& cfg, const Problem& pb,
                   TestResult& out) {
  require_cost(cfg, "gradient");
  auto rng = stream(cfg.seed, "gradient");
  const SpaceTimeField u = probe_control(pb, rng);
  const GradientResult gr = reduced_gradient(pb.init, u, pb.cost, pb.solver, pb.model);
  const double eps = cfg.gradient_epsilon;

  Table table{"gradient_report.csv",
              {"trial", "finite_difference", "adjoint", "relative_error"},
              {}};
  double worst = 0.0;
  for (int t = 0; t < cfg.gradient_trials; ++t) {
    const SpaceTimeField h = normalized(random_smooth_field(pb.grid, pb.time, rng));
    const SpaceTimeField up = u + eps * h;
    const SpaceTimeField um = u - eps * h;
    const StateTrajectory sp = solve_state(pb.init, up, pb.solver, pb.model);
    const StateTrajectory sm = solve_state(pb.init, um, pb.solver, pb.model);
    const double fd = cost_change(sm, um, sp, up, pb.cost) / (2.0 * eps);
    const double ad = spacetime_inner(gr.gradient, h);
    const double rel = relative_gap(fd, ad);
    worst = std::max(worst, rel);
    table.rows.push_back({std::to_string(t), format_real(fd), format_real(ad),
                          format_real(rel)});
  }
  out.measurements.push_back(at_most("max_rel_error", worst, cfg.tol.gradient));
  out.tables.push_back(std::move(table));
}

struct OptimizerRun {
  OptimizationReport report;
  double seconds = 0.0;
};

OptimizerRun run_optimizer(const Problem& pb) {
  const auto t0 = std::chrono::steady_clock::now();
  OptimizationReport rep =
      projected_gradient_descent(pb.init, pb.optimizer_start, pb.admissible,
                                 pb.cost, pb.optimizer, pb.solver, pb.model);
  return {std::move(rep), std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - t0)
                              .count()};
}

void test_optimizer(const VerifySuiteConfig& cfg, const Problem& pb,
                    const OptimizationReport& rep, TestResult& out) {
  int increases = 0;
  for (std::size_t i = 1; i < rep.iterates.size(); ++i) {
    if (rep.iterates[i].cost > rep.iterates[i - 1].cost) ++increases;
  }
  SpaceTimeField clamp(pb.grid, pb.time);
  for (int n = 0; n < clamp.slice_count(); ++n) {
    clamp.slice(n).values() = -rep.adjoint_z.slice(n).values() / pb.cost.b5;
  }
  clamp = project_admissible(clamp, pb.admissible);
  const double unorm = spacetime_norm(rep.control);
  const double clamp_gap =
      spacetime_norm(rep.control - clamp) / (unorm > 0.0 ? unorm : 1.0);

  out.measurements.push_back(at_most("cost_increases", increases, 0));
  out.measurements.push_back(at_most("final_stationarity",
                                     rep.final_stationarity(),
                                     cfg.tol.stationarity));
  out.measurements.push_back(
      at_most("iterations", rep.iterates.back().iter, pb.optimizer.max_iters));
  out.measurements.push_back(at_most("clamp_rel_gap", clamp_gap, cfg.tol.clamp));

  Table table{"optim_report.csv",
              {"iter", "J", "stationarity", "step", "backtracks"},
              {}};
  for (const auto& r : rep.iterates) {
    table.rows.push_back({std::to_string(r.iter), format_real(r.cost),
                          format_real(r.stationarity), format_real(r.step),
                          std::to_string(r.backtracks)});
  }
  out.tables.push_back(std::move(table));
}

void test_variational(const VerifySuiteConfig& cfg, const Problem& pb,
                      const OptimizationReport& rep, TestResult& out) {
  const StationarityReport st = stationarity_check(
      rep.control, rep.gradient, pb.admissible, cfg.vi_samples,
      stream(cfg.seed, "variational")());
  out.measurements.push_back(
      at_least("min_vi_sample", st.min_vi_sample(), cfg.tol.variational));
  Table table{"variational_report.csv", {"sample", "value"}, {}};
  for (std::size_t i = 0; i < st.vi_samples.size(); ++i) {
    table.rows.push_back({std::to_string(i), format_real(st.vi_samples[i])});
  }
  out.tables.push_back(std::move(table));
}

void test_energy(const VerifySuiteConfig& cfg, const Problem& pb,
                 TestResult& out) {
  auto rng = stream(cfg.seed, "energy");
  const Model model = decoupled_cahn_hilliard_model(pb.model);
  const TimeGrid time(cfg.energy_dt * cfg.energy_steps, cfg.energy_steps);
  Field phi0 = random_smooth_field(pb.grid, rng);
  const double peak = phi0.values().lpNorm<Eigen::Infinity>();
  if (peak > 0.0) phi0.values() *= 0.9 / peak;
  const InitialData init{Field(pb.grid), phi0, Field::constant(pb.grid, 1.0)};
  const StateTrajectory traj =
      solve_state(init, SpaceTimeField(pb.grid, time), pb.solver, model);

  Table table{"energy_report.csv", {"step", "time", "energy"}, {}};
  double worst_rise = -std::numeric_limits<double>::infinity();
  double max_fprime = 0.0;
  for (int n = 0; n <= time.steps(); ++n) {
    const double e = traj.diagnostics[n].energy;
    table.rows.push_back({std::to_string(n), format_real(time.time(n)),
                          format_real(e)});
    if (n > 0) {
      const double prev = traj.diagnostics[n - 1].energy;
      worst_rise = std::max(worst_rise,
                            (e - prev) / std::max(std::abs(prev), 1e-300));
    }
    max_fprime = std::max(
        max_fprime, map_values(model.potential.f_prime, traj[n].phi.values())
                        .lpNorm<Eigen::Infinity>());
  }
  out.measurements.push_back(
      at_most("max_relative_energy_rise", worst_rise, cfg.tol.energy_slack));
  // The stabilization has to dominate the stiffness of the explicit part.
  out.measurements.push_back(at_least("stabilization_margin",
                                      pb.solver.stabilization_S - max_fprime,
                                      0.0));
  out.tables.push_back(std::move(table));
}

void test_lipschitz(const VerifySuiteConfig& cfg, const Problem& pb,
                    TestResult& out) {
  auto rng = stream(cfg.seed, "lipschitz");
  const SpaceTimeField h = normalized(random_smooth_field(pb.grid, pb.time, rng));
  Table table{"lipschitz_report.csv",
              {"scale", "state_difference", "control_difference", "ratio"},
              {}};
  const auto ratios = [&](const Model& model, bool record) {
    std::vector<double> r;
    for (double eps : cfg.lipschitz_scales) {
      const LipschitzReport rep = lipschitz_probe(
          pb.control + eps * h, pb.control, pb.init, pb.solver, model);
      r.push_back(rep.ratio);
      if (record) {
        table.rows.push_back({format_real(eps), format_real(rep.state_difference),
                              format_real(rep.control_difference),
                              format_real(rep.ratio)});
      }
    }
    return r;
  };
  const auto spread = [](const std::vector<double>& r) {
    const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
    return *hi / *lo - 1.0;
  };
  const std::vector<double> r = ratios(pb.model, true);
  out.measurements.push_back(
      at_most("ratio_spread", spread(r), cfg.tol.lipschitz_spread));
  const std::vector<double> lin = ratios(fully_linear_model(pb.model), false);
  out.measurements.push_back(
      at_most("linear_regime_ratio_spread", spread(lin), cfg.tol.lipschitz_linear));
  out.tables.push_back(std::move(table));
}

}  // namespace

bool VerifyReport::all_passed() const {
  return std::all_of(results.begin(), results.end(),
                     [](const TestResult& r) { return r.passed; });
}

const TestResult* VerifyReport::find(const std::string& test) const {
  for (const auto& r : results) {
    if (r.test == test) return &r;
  }
  return nullptr;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{
      "conservation", "equilibrium", "oracle",      "taylor", "adjoint",
      "gradient",     "optimizer",   "variational", "energy", "lipschitz"};
  return names;
}

VerifyReport run_suite(const VerifySuiteConfig& cfg, const Problem& problem) {
  std::vector<std::string> selected;
  for (const auto& t : cfg.tests) {
    const auto& all = suite_names();
    if (std::find(all.begin(), all.end(), t) == all.end()) {
      throw UsageError("unknown verification test '" + t + "'");
    }
  }
  for (const auto& name : suite_names()) {
    if (cfg.tests.empty() ||
        std::find(cfg.tests.begin(), cfg.tests.end(), name) != cfg.tests.end()) {
      selected.push_back(name);
    }
  }

  VerifyReport report;
  report.seed = cfg.seed;
  std::optional<OptimizerRun> optimum;
  const auto optimizer_result = [&]() -> const OptimizerRun& {
    if (!optimum) {
      require_bounds(cfg, "optimizer");
      optimum = run_optimizer(problem);
    }
    return *optimum;
  };

  for (const auto& name : selected) {
    TestResult result;
    result.test = name;
    const auto t0 = std::chrono::steady_clock::now();
    double extra = 0.0;
    try {
      if (name == "conservation") {
        test_conservation(cfg, problem, result);
      } else if (name == "equilibrium") {
        test_equilibrium(cfg, problem, result);
      } else if (name == "oracle") {
        test_oracle(cfg, problem, result);
      } else if (name == "taylor") {
        test_taylor(cfg, problem, result);
      } else if (name == "adjoint") {
        test_adjoint(cfg, problem, result);
      } else if (name == "gradient") {
        test_gradient(cfg, problem, result);
      } else if (name == "optimizer") {
        const bool cached = optimum.has_value();
        const OptimizerRun& run = optimizer_result();
        if (cached) extra = run.seconds;
        test_optimizer(cfg, problem, run.report, result);
      } else if (name == "variational") {
        require_bounds(cfg, "variational");
        test_variational(cfg, problem, optimizer_result().report, result);
      } else if (name == "energy") {
        test_energy(cfg, problem, result);
      } else if (name == "lipschitz") {
        test_lipschitz(cfg, problem, result);
      }
      result.passed =
          !result.measurements.empty() &&
          std::all_of(result.measurements.begin(), result.measurements.end(),
                      [](const Measurement& m) { return m.passed; });
    } catch (const std::exception& e) {
      result.passed = false;
      result.error = e.what();
    }
    result.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count() +
        extra;
    report.results.push_back(std::move(result));
  }
  return report;
}

void write_verify_report(const std::filesystem::path& dir,
                         const VerifyReport& report) {
  std::vector<std::vector<std::string>> rows;
  const std::string seed = std::to_string(report.seed);
  for (const auto& r : report.results) {
    if (!r.error.empty()) {
      rows.push_back({r.test, "error", "nan", "nan", "", "false", seed});
    }
    for (const auto& m : r.measurements) {
      const std::string tol =
          m.comparison == "in"
              ? "[" + format_real(m.tolerance) + ";" + format_real(m.upper) + "]"
              : format_real(m.tolerance);
      rows.push_back({r.test, m.name, format_real(m.value), tol, m.comparison,
                      m.passed ? "true" : "false", seed});
    }
  }
  write_table(dir / "verify_report.csv",
              {"test", "measure", "value", "tolerance", "comparison", "passed",
               "seed"},
              rows);
}

// --- oracle matrix and regimes -------------------------------------------------

Model fully_linear_model(const Model& base) {
  Model m = base;
  auto& p = m.params;
  p.lambda_P = p.lambda_A = p.lambda_E = 0.0;
  p.lambda_C = p.lambda_B = p.lambda_D = 0.0;
  p.chi = 0.0;
  p.Lambda = 0.0;
  m.potential = zero_potential();
  return m;
}

Model decoupled_cahn_hilliard_model(const Model& base) {
  Model m = base;
  auto& p = m.params;
  p.lambda_P = p.lambda_A = p.lambda_E = 0.0;
  p.lambda_C = p.lambda_B = p.lambda_D = 0.0;
  p.chi = 0.0;
  p.Lambda = 0.0;
  m.potential = default_potential();
  return m;
}

std::vector<OracleCase> pinned_oracle_cases() {
  Model coupled;
  {
    auto& p = coupled.params;
    p.ell = 1.0;
    p.Lambda = 1.0;
    p.chi = 0.5;
    p.lambda_P = 1.0;
    p.lambda_A = 0.5;
    p.lambda_E = 0.5;
    p.lambda_C = 1.0;
    p.lambda_B = 1.0;
    p.lambda_D = 0.5;
    p.sigma_B = 1.0;
  }
  Model strong;
  {
    auto& p = strong.params;
    p.ell = 0.7;
    p.Lambda = 1.6;
    p.chi = 1.2;
    p.lambda_P = 2.5;
    p.lambda_A = 0.3;
    p.lambda_E = 1.4;
    p.lambda_C = 2.0;
    p.lambda_B = 0.4;
    p.lambda_D = 1.5;
    p.sigma_B = 0.6;
  }
  struct GridCase {
    std::string label;
    Grid grid;
    TimeGrid time;
  };
  const std::vector<GridCase> grids{
      {"line5", Grid::line(5, 1.0), TimeGrid(0.3, 3)},
      {"rect4x3", Grid::rect(4, 3, 1.0, 0.6), TimeGrid(0.2, 2)}};
  const std::vector<std::pair<std::string, Model>> params{{"coupled", coupled},
                                                          {"strong", strong}};
  std::vector<OracleCase> out;
  for (const auto& g : grids) {
    for (const auto& [plabel, model] : params) {
      for (double tau : {0.0, 1.0}) {
        Model m = model;
        m.params.tau = tau;
        out.push_back({g.label + "/" + plabel + "/tau" + format_real(tau), g.grid,
                       g.time, m});
      }
    }
  }
  return out;
}

OracleComparison compare_with_oracle(const OracleCase& c,
                                     const SolverConfig& solver,
                                     std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Grid& grid = c.grid;
  const TimeGrid& time = c.time;
  Field phi0 = random_smooth_field(grid, rng);
  phi0.values() *= 0.8 / std::max(1.0, phi0.values().lpNorm<Eigen::Infinity>());
  const Field theta0 = random_smooth_field(grid, rng);
  Field sigma0 = random_smooth_field(grid, rng);
  sigma0.values().array() += 1.5;
  const InitialData init{theta0, phi0, sigma0};
  const SpaceTimeField u = random_smooth_field(grid, time, rng);
  const SpaceTimeField h = random_smooth_field(grid, time, rng);
  CostSpec cost = CostSpec::with_zero_targets(grid, time, 1.0, 0.7, 1.3, 0.4, 0.1);
  cost.theta_Q = random_smooth_field(grid, time, rng);
  cost.phi_Q = random_smooth_field(grid, time, rng);
  cost.theta_Omega = random_smooth_field(grid, rng);
  cost.phi_Omega = random_smooth_field(grid, rng);

  const DenseOracle oracle(grid, time, c.model, solver);
  const auto gap = [](const Vector& sparse, const Vector& dense) {
    return (sparse - dense).lpNorm<Eigen::Infinity>() /
           std::max(1.0, dense.lpNorm<Eigen::Infinity>());
  };
  const auto stack = [&](const Field& a, const Field& b, const Field& d,
                         const Field& e) {
    const int n = grid.node_count();
    Vector v(4 * n);
    v << a.values(), b.values(), d.values(), e.values();
    return v;
  };

  OracleComparison out;
  const StateTrajectory traj = solve_state(init, u, solver, c.model);
  const auto dense_state = oracle.state(init, u);
  for (int n = 0; n <= time.steps(); ++n) {
    const auto& s = traj[n];
    out.state = std::max(out.state,
                         gap(stack(s.theta, s.phi, s.mu, s.sigma), dense_state[n]));
  }
  const LinearizedTrajectory lin = solve_linearized(traj, h, solver, c.model);
  const auto dense_lin = oracle.linearized(init, u, h);
  for (int n = 0; n <= time.steps(); ++n) {
    const auto& s = lin[n];
    out.linearized = std::max(
        out.linearized, gap(stack(s.zeta, s.xi, s.eta, s.rho), dense_lin[n]));
  }
  const AdjointTrajectory adj = solve_adjoint(traj, cost, solver, c.model);
  const auto dense_z = oracle.adjoint_z(init, u, cost);
  for (int n = 0; n < time.steps(); ++n) {
    out.adjoint = std::max(out.adjoint, gap(adj[n].z.values(), dense_z[n]));
  }
  return out;
}

}  // namespace caginalp
