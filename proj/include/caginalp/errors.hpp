#pragma once

#include <stdexcept>
#include <string>

namespace caginalp {

/// Invalid grid, parameter or config value. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller combined incompatible objects (grid mismatch, wrong slice count).
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A time step could not be completed: linear solve stalled or a value
/// became non-finite.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, int step, double residual);

  int step() const { return step_; }
  double residual() const { return residual_; }

  /// Copy of this error tagged with the step index it occurred at.
  SolverError at_step(int step) const;

 private:
  int step_;
  double residual_;
};

}  // namespace caginalp
