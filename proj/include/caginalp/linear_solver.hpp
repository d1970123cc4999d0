#pragma once

#include <Eigen/SparseCholesky>

#include "caginalp/grid.hpp"

namespace caginalp {

/// K = a0 I + a1 A + a2 A^2 + diag(d), A the Neumann Laplacian of the grid.
/// Every step operator of the scheme has this form.
struct LaplacianPolynomial {
  double a0 = 1.0;
  double a1 = 0.0;
  double a2 = 0.0;
  /// Empty for no diagonal term.
  Vector diag;
};

/// Direct solver for K = a0 I + a1 A + a2 A^2 + diag(d), which is
/// self-adjoint and positive definite in the quadrature inner product
/// whenever the coefficients make it so.
///
/// W * K is factorized once (sparse LDLT). Each solve is followed by
/// iterative refinement whose residuals apply K in unassembled form,
/// x -> a0 x + A (a1 x + a2 A x) + d x, in extended precision. Since the
/// Laplacian stencil kills constants exactly and integrates to zero, this
/// keeps constants and the mass balance exact to roundoff, which the rounded
/// entries of an assembled A^2 would not. Refinement stops after `max_iters`
/// sweeps or when the correction is below working precision; SolverError if
/// the normwise backward error ||b - K x|| / (||K|| ||x|| + ||b||) (max norms)
/// then exceeds `tol`.
class WeightedSpdSolver {
 public:
  WeightedSpdSolver(const Grid& grid, const LaplacianPolynomial& poly,
                    double tol, int max_iters);

  Vector solve(const Vector& rhs) const;

  /// Assembled K.
  const SparseMatrix& op() const { return op_; }

 private:
  using Extended = Eigen::Matrix<long double, Eigen::Dynamic, 1>;
  Extended apply_extended(const Extended& x) const;

  LaplacianPolynomial poly_;
  Eigen::SparseMatrix<long double> lap_extended_;
  SparseMatrix op_;
  Vector weights_;
  Eigen::SimplicialLDLT<SparseMatrix> factor_;
  double op_norm_ = 0.0;
  double tol_;
  int max_iters_;
};

}  // namespace caginalp
