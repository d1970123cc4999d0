#include "caginalp/linear_solver.hpp"

#include <cmath>
#include <limits>

#include "caginalp/errors.hpp"

namespace caginalp {

WeightedSpdSolver::WeightedSpdSolver(const Grid& grid,
                                     const LaplacianPolynomial& poly,
                                     double tol, int max_iters)
    : poly_(poly), weights_(grid.weights()), tol_(tol), max_iters_(max_iters) {
  const int n = grid.node_count();
  if (poly_.diag.size() != 0 && poly_.diag.size() != n) {
    throw UsageError("diagonal term does not match the grid");
  }
  const SparseMatrix lap = laplacian_matrix(grid);
  lap_extended_ = lap.cast<long double>();

  SparseMatrix eye(n, n);
  eye.setIdentity();
  op_ = poly_.a0 * eye + poly_.a1 * lap;
  if (poly_.a2 != 0.0) op_ += poly_.a2 * SparseMatrix(lap * lap);
  if (poly_.diag.size() != 0) {
    SparseMatrix d(n, n);
    d = poly_.diag.asDiagonal();
    op_ += d;
  }
  op_.makeCompressed();

  SparseMatrix weighted = weights_.asDiagonal() * op_;
  // W * K is symmetric in exact arithmetic; average away roundoff asymmetry.
  SparseMatrix sym = 0.5 * (weighted + SparseMatrix(weighted.transpose()));
  factor_.compute(sym);
  if (factor_.info() != Eigen::Success) {
    throw SolverError("factorization of the step operator failed", -1, 0.0);
  }
  Vector row_sums = Vector::Zero(n);
  for (int k = 0; k < op_.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(op_, k); it; ++it) {
      row_sums[it.row()] += std::abs(it.value());
    }
  }
  op_norm_ = n ? row_sums.maxCoeff() : 0.0;
}

WeightedSpdSolver::Extended WeightedSpdSolver::apply_extended(
    const Extended& x) const {
  const long double a0 = poly_.a0;
  const long double a1 = poly_.a1;
  const long double a2 = poly_.a2;
  Extended inner = a1 * x;
  if (poly_.a2 != 0.0) inner += a2 * (lap_extended_ * x);
  Extended y = lap_extended_ * inner + a0 * x;
  if (poly_.diag.size() != 0) {
    y += poly_.diag.cast<long double>().cwiseProduct(x);
  }
  return y;
}

Vector WeightedSpdSolver::solve(const Vector& rhs) const {
  const double rhs_norm = rhs.lpNorm<Eigen::Infinity>();
  if (rhs_norm == 0.0) {
    return Vector::Zero(rhs.size());
  }
  const Extended b = rhs.cast<long double>();
  const auto residual = [&](const Vector& x) -> Extended {
    return b - apply_extended(x.cast<long double>());
  };
  Vector x = factor_.solve(weights_.cwiseProduct(rhs));
  Extended r = residual(x);
  for (int it = 0; it < max_iters_; ++it) {
    const Vector dx = factor_.solve(weights_.cwiseProduct(r.cast<double>()));
    x += dx;
    r = residual(x);
    if (dx.lpNorm<Eigen::Infinity>() <=
        2.0 * std::numeric_limits<double>::epsilon() *
            x.lpNorm<Eigen::Infinity>()) {
      break;
    }
  }
  const double backward_error =
      static_cast<double>(r.cwiseAbs().maxCoeff()) /
      (op_norm_ * x.lpNorm<Eigen::Infinity>() + rhs_norm);
  if (!(backward_error <= tol_) || !x.allFinite()) {
    throw SolverError("linear solve did not reach tolerance", -1,
                      backward_error);
  }
  return x;
}

}  // namespace caginalp
