#include "caginalp/model.hpp"

#include <cmath>
#include <sstream>

#include "caginalp/errors.hpp"

namespace caginalp {

Vector ModelParams::sigma_B_at(const Grid& grid, int n) const {
  if (const auto* c = std::get_if<double>(&sigma_B)) {
    return Vector::Constant(grid.node_count(), *c);
  }
  const auto& field = std::get<SpaceTimeField>(sigma_B);
  require_same_grid(grid, field.grid(), "sigma_B");
  return field.slice(n).values();
}

ScalarFunction tanh_switch(double steepness, double height) {
  const double a = steepness;
  const double c = 0.5 * height;
  ScalarFunction fn;
  fn.value = [a, c](double s) { return c * (1.0 + std::tanh(a * s)); };
  fn.d1 = [a, c](double s) {
    const double t = std::tanh(a * s);
    return c * a * (1.0 - t * t);
  };
  fn.d2 = [a, c](double s) {
    const double t = std::tanh(a * s);
    return -2.0 * c * a * a * t * (1.0 - t * t);
  };
  return fn;
}

Nonlinearities default_nonlinearities() {
  Nonlinearities nl;
  nl.h_gate = tanh_switch(2.0);
  nl.k_temp = tanh_switch(1.0);
  nl.h_star = 1.0;
  nl.k_star = 1.0;
  return nl;
}

Potential default_potential() {
  Potential p;
  p.name = "quartic";
  p.F_hat = [](double s) {
    const double w = s * s - 1.0;
    return 0.25 * w * w;
  };
  p.f = [](double s) { return s * s * s - s; };
  p.f_prime = [](double s) { return 3.0 * s * s - 1.0; };
  p.f_second = [](double s) { return 6.0 * s; };
  p.lower_bound = 0.25;
  return p;
}

Potential zero_potential() {
  Potential p;
  p.name = "zero";
  const auto zero = [](double) { return 0.0; };
  p.F_hat = zero;
  p.f = zero;
  p.f_prime = zero;
  p.f_second = zero;
  p.lower_bound = 0.0;
  return p;
}

Potential potential_by_name(const std::string& name) {
  if (name == "quartic") return default_potential();
  if (name == "zero") return zero_potential();
  throw ConfigError("unknown potential '" + name +
                    "' (expected quartic or zero)");
}

bool ValidationReport::all_passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

std::vector<HypothesisCheck> ValidationReport::failures() const {
  std::vector<HypothesisCheck> out;
  for (const auto& c : checks) {
    if (!c.passed) out.push_back(c);
  }
  return out;
}

namespace {

std::string fmt_value(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

void check_sign(ValidationReport& report, const char* item, double value,
                bool strict) {
  HypothesisCheck c{"H1", item, true, value, ""};
  const bool ok = std::isfinite(value) && (strict ? value > 0.0 : value >= 0.0);
  if (!ok) {
    c.passed = false;
    c.message = std::string(item) + " must be " +
                (strict ? "positive" : "nonnegative") + ", got " +
                fmt_value(value);
  }
  report.checks.push_back(c);
}

double rel_err(double approx, double exact) {
  return std::abs(approx - exact) / std::max(1.0, std::abs(exact));
}

// Central difference of `parent` against `derivative`; returns the first
// failing sample or NaN.
double first_fd_mismatch(const std::function<double(double)>& parent,
                         const std::function<double(double)>& derivative,
                         const std::vector<double>& samples,
                         const ValidationOptions& opts) {
  const double h = opts.fd_step;
  for (double s : samples) {
    const double fd = (parent(s + h) - parent(s - h)) / (2.0 * h);
    if (!(rel_err(fd, derivative(s)) <= opts.fd_rel_tol)) return s;
  }
  return std::nan("");
}

void check_bounded_function(ValidationReport& report, const char* name,
                            const ScalarFunction& fn, double upper,
                            const std::vector<double>& samples,
                            const ValidationOptions& opts) {
  HypothesisCheck bound{"H3", std::string(name) + ".bounds", true, 0.0, ""};
  for (double s : samples) {
    const double v = fn.value(s);
    if (!(v >= 0.0 && v <= upper)) {
      bound.passed = false;
      bound.witness = s;
      bound.message = std::string(name) + "(" + fmt_value(s) +
                      ") = " + fmt_value(v) + " outside [0, " +
                      fmt_value(upper) + "]";
      break;
    }
  }
  report.checks.push_back(bound);

  HypothesisCheck lip{"H3", std::string(name) + ".lipschitz", true, 0.0, ""};
  double max_slope = 0.0;
  for (double s : samples) {
    const double d = std::abs(fn.d1(s));
    if (!std::isfinite(d)) {
      lip.passed = false;
      lip.witness = s;
      lip.message = std::string(name) + "' is not finite";
      break;
    }
    max_slope = std::max(max_slope, d);
  }
  if (lip.passed) lip.witness = max_slope;
  report.checks.push_back(lip);

  const std::pair<const char*, std::pair<const std::function<double(double)>*,
                                         const std::function<double(double)>*>>
      pairs[] = {{"d1", {&fn.value, &fn.d1}}, {"d2", {&fn.d1, &fn.d2}}};
  for (const auto& [label, fns] : pairs) {
    HypothesisCheck c{"H3", std::string(name) + "." + label, true, 0.0, ""};
    const double bad = first_fd_mismatch(*fns.first, *fns.second, samples, opts);
    if (!std::isnan(bad)) {
      c.passed = false;
      c.witness = bad;
      c.message = std::string(name) + " derivative " + label +
                  " disagrees with finite differences at s = " +
                  fmt_value(bad);
    }
    report.checks.push_back(c);
  }
}

}  // namespace

ValidationReport validate(const ModelParams& params, const Nonlinearities& nl,
                          const Potential& pot,
                          const ValidationOptions& opts) {
  ValidationReport report;

  check_sign(report, "ell", params.ell, true);
  check_sign(report, "Lambda", params.Lambda, true);
  check_sign(report, "chi", params.chi, true);
  check_sign(report, "tau", params.tau, false);
  check_sign(report, "lambda_P", params.lambda_P, false);
  check_sign(report, "lambda_A", params.lambda_A, false);
  check_sign(report, "lambda_E", params.lambda_E, false);
  check_sign(report, "lambda_C", params.lambda_C, false);
  check_sign(report, "lambda_B", params.lambda_B, false);
  check_sign(report, "lambda_D", params.lambda_D, false);

  {
    HypothesisCheck c{"H2", "sigma_B", true, 0.0, ""};
    if (const auto* v = std::get_if<double>(&params.sigma_B)) {
      if (!std::isfinite(*v)) {
        c.passed = false;
        c.witness = *v;
        c.message = "sigma_B is not finite";
      }
    } else {
      const auto& st = std::get<SpaceTimeField>(params.sigma_B);
      for (int n = 0; n < st.slice_count(); ++n) {
        if (!st.slice(n).all_finite()) {
          c.passed = false;
          c.witness = n;
          c.message = "sigma_B has non-finite values at slice " +
                      std::to_string(n);
          break;
        }
      }
    }
    report.checks.push_back(c);
  }

  std::vector<double> samples(opts.samples);
  for (int i = 0; i < opts.samples; ++i) {
    samples[i] = opts.sample_min + (opts.sample_max - opts.sample_min) * i /
                                       (opts.samples - 1);
  }

  check_bounded_function(report, "h_gate", nl.h_gate, nl.h_star, samples, opts);
  check_bounded_function(report, "k_temp", nl.k_temp, nl.k_star, samples, opts);

  {
    HypothesisCheck c{"H4", "F_hat.lower_bound", true, 0.0, ""};
    for (double s : samples) {
      const double v = pot.F_hat(s);
      if (!(v >= -pot.lower_bound)) {
        c.passed = false;
        c.witness = s;
        c.message = "F_hat(" + fmt_value(s) + ") = " + fmt_value(v) +
                    " below -c0 = " + fmt_value(-pot.lower_bound);
        break;
      }
    }
    report.checks.push_back(c);
  }
  const std::pair<const char*, std::pair<const std::function<double(double)>*,
                                         const std::function<double(double)>*>>
      chain[] = {{"f", {&pot.F_hat, &pot.f}},
                 {"f_prime", {&pot.f, &pot.f_prime}},
                 {"f_second", {&pot.f_prime, &pot.f_second}}};
  for (const auto& [label, fns] : chain) {
    HypothesisCheck c{"H4", label, true, 0.0, ""};
    const double bad = first_fd_mismatch(*fns.first, *fns.second, samples, opts);
    if (!std::isnan(bad)) {
      c.passed = false;
      c.witness = bad;
      c.message = std::string(label) +
                  " disagrees with the finite difference of its parent at s = " +
                  fmt_value(bad);
    }
    report.checks.push_back(c);
  }
  return report;
}

ValidationReport validate(const Model& model, const ValidationOptions& opts) {
  return validate(model.params, model.nonlin, model.potential, opts);
}

}  // namespace caginalp
