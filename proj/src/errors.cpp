#include "caginalp/errors.hpp"

namespace caginalp {

SolverError::SolverError(const std::string& what, int step, double residual)
    : std::runtime_error(what), step_(step), residual_(residual) {}

SolverError SolverError::at_step(int step) const {
  std::string msg = what();
  if (step_ < 0) {
    msg = "step " + std::to_string(step) + ": " + msg;
  }
  return SolverError(msg, step, residual_);
}

}  // namespace caginalp
