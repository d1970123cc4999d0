#pragma once

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "caginalp/grid.hpp"

namespace caginalp {

/// Constants of the Caginalp tumor system plus the far-field nutrient level.
///
/// Construction does not enforce the sign conditions; `validate` reports them.
/// Degenerate regimes (chi = 0, Lambda = 0) are legitimate verification
/// setups even though they fall outside the well-posedness hypotheses.
struct ModelParams {
  double ell = 1.0;          // latent heat, heat equation
  double Lambda = 1.0;       // latent heat, chemical potential
  double chi = 1.0;          // chemotaxis / active transport
  double tau = 0.0;          // viscosity of the phase equation
  double lambda_P = 0.0;     // proliferation
  double lambda_A = 0.0;     // apoptosis
  double lambda_E = 0.0;     // thermal cytotoxicity
  double lambda_C = 0.0;     // nutrient consumption
  double lambda_B = 0.0;     // vascular supply
  double lambda_D = 0.0;     // temperature-driven uptake
  std::variant<double, SpaceTimeField> sigma_B = 1.0;

  /// sigma_B at time level n, on the given grid.
  Vector sigma_B_at(const Grid& grid, int n) const;
};

/// A scalar C^2 function with its first two derivatives.
struct ScalarFunction {
  std::function<double(double)> value;
  std::function<double(double)> d1;
  std::function<double(double)> d2;
};

/// Gating function h(phi) and temperature response k(theta), with their
/// declared upper bounds.
struct Nonlinearities {
  ScalarFunction h_gate;
  ScalarFunction k_temp;
  double h_star = 1.0;
  double k_star = 1.0;
};

/// Double-well potential F and its derivatives f = F', f', f''.
struct Potential {
  std::string name;
  std::function<double(double)> F_hat;
  std::function<double(double)> f;
  std::function<double(double)> f_prime;
  std::function<double(double)> f_second;
  /// Declared c0 with F_hat >= -c0.
  double lower_bound = 0.0;
};

/// (1 + tanh(steepness * s)) / 2, rescaled to [0, height].
ScalarFunction tanh_switch(double steepness, double height = 1.0);

/// h(s) = (1 + tanh 2s)/2, k(s) = (1 + tanh s)/2.
Nonlinearities default_nonlinearities();

/// F(s) = (s^2 - 1)^2 / 4, f(s) = s^3 - s.
Potential default_potential();

/// F = f = 0. Turns the phase equation linear; used by verification regimes.
Potential zero_potential();

Potential potential_by_name(const std::string& name);

/// Solver inputs bundled: constants, nonlinear terms, potential.
struct Model {
  ModelParams params;
  Nonlinearities nonlin = default_nonlinearities();
  Potential potential = default_potential();
};

struct HypothesisCheck {
  std::string hypothesis;  // "H1" ... "H4"
  std::string item;        // field or property name
  bool passed = true;
  double witness = 0.0;    // offending value or sample point
  std::string message;
};

struct ValidationReport {
  std::vector<HypothesisCheck> checks;

  bool all_passed() const;
  std::vector<HypothesisCheck> failures() const;
};

struct ValidationOptions {
  double sample_min = -50.0;
  double sample_max = 50.0;
  int samples = 10001;
  double fd_step = 1e-5;
  double fd_rel_tol = 1e-6;
};

/// Checks the sign conditions on the constants and, on a sample interval, the
/// bounds and derivative consistency of h, k and the potential. Growth
/// conditions of the potential are global and only checked on the sample.
ValidationReport validate(const ModelParams& params, const Nonlinearities& nl,
                          const Potential& pot,
                          const ValidationOptions& opts = {});
ValidationReport validate(const Model& model,
                          const ValidationOptions& opts = {});

}  // namespace caginalp
