#pragma once

#include <vector>

#include <Eigen/Dense>

#include "caginalp/cost.hpp"
#include "caginalp/model.hpp"
#include "caginalp/state_solver.hpp"

namespace caginalp {

/// Brute-force reference for tiny problems.
///
/// Every step is assembled as one dense 4N x 4N block system in
/// (theta, phi, mu, sigma) and solved by LU; the linearization is the explicit
/// Jacobian K^{-1}(db/dy - dK/dy y'); the adjoint is the explicit transpose of
/// the assembled space-time Jacobian h -> (zeta, xi). The Laplacian and the
/// quadrature weights are rebuilt here from scratch, so nothing but the scalar
/// nonlinearities is shared with the sparse sweeps.
class DenseOracle {
 public:
  static constexpr int kMaxNodesPerAxis = 5;
  static constexpr int kMaxSteps = 3;

  /// ConfigError when the grid has an axis with more than 5 nodes or the time
  /// grid more than 3 steps.
  DenseOracle(const Grid& grid, const TimeGrid& time, const Model& model,
              const SolverConfig& cfg);

  /// Levels 0..nt, each the stacked (theta, phi, mu, sigma).
  std::vector<Eigen::VectorXd> state(const InitialData& init,
                                     const SpaceTimeField& u) const;

  /// Levels 0..nt of (zeta, xi, eta, rho) for direction h around the state
  /// trajectory of u.
  std::vector<Eigen::VectorXd> linearized(const InitialData& init,
                                          const SpaceTimeField& u,
                                          const SpaceTimeField& h) const;

  /// Jacobian of h (slices 0..nt-1 stacked) -> (zeta^k, xi^k), k = 1..nt.
  Eigen::MatrixXd control_jacobian(const InitialData& init,
                                   const SpaceTimeField& u) const;

  /// Gradient densities z^n, n = 0..nt-1, of the tracking part of the cost:
  /// (dt W)^{-1} J^T W g with g the cost derivative in (zeta, xi).
  std::vector<Eigen::VectorXd> adjoint_z(const InitialData& init,
                                         const SpaceTimeField& u,
                                         const CostSpec& cost) const;

  const Eigen::MatrixXd& laplacian() const { return lap_; }
  const Eigen::VectorXd& weights() const { return weights_; }

 private:
  struct StepJacobian {
    Eigen::MatrixXd wrt_state;    // 4N x 3N, columns (theta, phi, sigma)
    Eigen::MatrixXd wrt_control;  // 4N x N
  };

  Eigen::VectorXd step(const Eigen::VectorXd& prev, const Eigen::VectorXd& u,
                       int level) const;
  StepJacobian step_jacobian(const Eigen::VectorXd& prev,
                             const Eigen::VectorXd& next) const;
  Eigen::MatrixXd step_matrix(const Eigen::VectorXd& prev) const;

  Grid grid_;
  TimeGrid time_;
  Model model_;
  SolverConfig cfg_;
  int n_;
  Eigen::MatrixXd lap_;
  Eigen::VectorXd weights_;
};

}  // namespace caginalp
