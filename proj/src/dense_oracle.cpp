#include "caginalp/dense_oracle.hpp"

#include <string>

#include "caginalp/errors.hpp"

namespace caginalp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd dense_axis_laplacian(int n, double h) {
  MatrixXd d = MatrixXd::Zero(n, n);
  const double s = 1.0 / (h * h);
  for (int i = 0; i < n; ++i) {
    d(i, i) = -2.0 * s;
    if (i == 0) {
      d(i, 1) = 2.0 * s;
    } else if (i == n - 1) {
      d(i, n - 2) = 2.0 * s;
    } else {
      d(i, i - 1) = s;
      d(i, i + 1) = s;
    }
  }
  return d;
}

VectorXd dense_axis_weights(int n, double h) {
  VectorXd w = VectorXd::Constant(n, h);
  w[0] = 0.5 * h;
  w[n - 1] = 0.5 * h;
  return w;
}

MatrixXd kron(const MatrixXd& a, const MatrixXd& b) {
  MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

VectorXd apply(const std::function<double(double)>& fn, const VectorXd& v) {
  VectorXd out(v.size());
  for (int i = 0; i < v.size(); ++i) out[i] = fn(v[i]);
  return out;
}

MatrixXd diag(const VectorXd& v) { return v.asDiagonal(); }

}  // namespace

DenseOracle::DenseOracle(const Grid& grid, const TimeGrid& time,
                         const Model& model, const SolverConfig& cfg)
    : grid_(grid), time_(time), model_(model), cfg_(cfg), n_(grid.node_count()) {
  for (int a = 0; a < grid.dim(); ++a) {
    if (grid.nodes(a) > kMaxNodesPerAxis) {
      throw ConfigError("dense oracle refuses grids with more than " +
                        std::to_string(kMaxNodesPerAxis) + " nodes per axis");
    }
  }
  if (time.steps() > kMaxSteps) {
    throw ConfigError("dense oracle refuses more than " +
                      std::to_string(kMaxSteps) + " time steps");
  }
  const int nx = grid.nodes(0);
  const MatrixXd dx = dense_axis_laplacian(nx, grid.length(0) / (nx - 1));
  const VectorXd wx = dense_axis_weights(nx, grid.length(0) / (nx - 1));
  if (grid.dim() == 1) {
    lap_ = dx;
    weights_ = wx;
  } else {
    const int ny = grid.nodes(1);
    const MatrixXd dy = dense_axis_laplacian(ny, grid.length(1) / (ny - 1));
    const VectorXd wy = dense_axis_weights(ny, grid.length(1) / (ny - 1));
    // x runs fastest in the flat index.
    lap_ = kron(MatrixXd::Identity(ny, ny), dx) +
           kron(dy, MatrixXd::Identity(nx, nx));
    weights_.resize(nx * ny);
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) weights_[i + nx * j] = wx[i] * wy[j];
    }
  }
}

// Block rows: heat, phase (two rows), nutrient; unknowns theta', phi', mu',
// sigma'.
MatrixXd DenseOracle::step_matrix(const VectorXd& prev) const {
  const int n = n_;
  const auto& p = model_.params;
  const double dt = time_.dt();
  const double c = p.tau / dt + cfg_.stabilization_S;
  const MatrixXd eye = MatrixXd::Identity(n, n);
  const VectorXd theta = prev.segment(0, n);
  const VectorXd phi = prev.segment(n, n);
  const VectorXd kappa =
      p.lambda_C * apply(model_.nonlin.h_gate.value, phi).array() + p.lambda_B +
      p.lambda_D * apply(model_.nonlin.k_temp.value, theta).array();

  MatrixXd k = MatrixXd::Zero(4 * n, 4 * n);
  k.block(0, 0, n, n) = eye - dt * lap_;
  k.block(0, n, n, n) = p.ell * eye;
  k.block(n, n, n, n) = eye;
  k.block(n, 2 * n, n, n) = -dt * lap_;
  k.block(2 * n, n, n, n) = -c * eye + lap_;
  k.block(2 * n, 2 * n, n, n) = eye;
  k.block(3 * n, n, n, n) = dt * p.chi * lap_;
  k.block(3 * n, 3 * n, n, n) = eye - dt * lap_ + dt * diag(kappa);
  return k;
}

VectorXd DenseOracle::step(const VectorXd& prev, const VectorXd& u,
                           int level) const {
  const int n = n_;
  const auto& p = model_.params;
  const double dt = time_.dt();
  const double c = p.tau / dt + cfg_.stabilization_S;
  const VectorXd theta = prev.segment(0, n);
  const VectorXd phi = prev.segment(n, n);
  const VectorXd sigma = prev.segment(3 * n, n);
  const VectorXd h = apply(model_.nonlin.h_gate.value, phi);
  const VectorXd src =
      ((p.lambda_P * sigma.array() - p.lambda_A - p.lambda_E * theta.array()) *
       h.array())
          .matrix();
  const VectorXd g =
      apply(model_.potential.f, phi) - p.chi * sigma - p.Lambda * theta;

  VectorXd b(4 * n);
  b.segment(0, n) = theta + p.ell * phi + dt * u;
  b.segment(n, n) = phi + dt * src;
  b.segment(2 * n, n) = -c * phi + g;
  b.segment(3 * n, n) =
      sigma + dt * p.lambda_B * p.sigma_B_at(grid_, level);
  return step_matrix(prev).fullPivLu().solve(b);
}

DenseOracle::StepJacobian DenseOracle::step_jacobian(
    const VectorXd& prev, const VectorXd& next) const {
  const int n = n_;
  const auto& p = model_.params;
  const auto& nl = model_.nonlin;
  const double dt = time_.dt();
  const double c = p.tau / dt + cfg_.stabilization_S;
  const MatrixXd eye = MatrixXd::Identity(n, n);
  const VectorXd theta = prev.segment(0, n);
  const VectorXd phi = prev.segment(n, n);
  const VectorXd sigma = prev.segment(3 * n, n);
  const VectorXd sigma_next = next.segment(3 * n, n);
  const VectorXd h = apply(nl.h_gate.value, phi);
  const VectorXd dh = apply(nl.h_gate.d1, phi);
  const VectorXd a =
      (p.lambda_P * sigma.array() - p.lambda_A - p.lambda_E * theta.array())
          .matrix();

  // d b / d (theta, phi, sigma)
  MatrixXd db = MatrixXd::Zero(4 * n, 3 * n);
  db.block(0, 0, n, n) = eye;
  db.block(0, n, n, n) = p.ell * eye;
  db.block(n, 0, n, n) = -dt * p.lambda_E * diag(h);
  db.block(n, n, n, n) = eye + dt * diag(a.cwiseProduct(dh));
  db.block(n, 2 * n, n, n) = dt * p.lambda_P * diag(h);
  db.block(2 * n, 0, n, n) = -p.Lambda * eye;
  db.block(2 * n, n, n, n) =
      -c * eye + diag(apply(model_.potential.f_prime, phi));
  db.block(2 * n, 2 * n, n, n) = -p.chi * eye;
  db.block(3 * n, 2 * n, n, n) = eye;

  // d (K y') / d (theta, phi, sigma) with y' held fixed.
  MatrixXd dk = MatrixXd::Zero(4 * n, 3 * n);
  dk.block(3 * n, 0, n, n) =
      dt * p.lambda_D * diag(sigma_next.cwiseProduct(apply(nl.k_temp.d1, theta)));
  dk.block(3 * n, n, n, n) = dt * p.lambda_C * diag(sigma_next.cwiseProduct(dh));

  MatrixXd du = MatrixXd::Zero(4 * n, n);
  du.block(0, 0, n, n) = dt * eye;

  const auto lu = step_matrix(prev).fullPivLu();
  return {lu.solve(db - dk), lu.solve(du)};
}

std::vector<VectorXd> DenseOracle::state(const InitialData& init,
                                         const SpaceTimeField& u) const {
  const int n = n_;
  const auto& p = model_.params;
  VectorXd y(4 * n);
  y.segment(0, n) = init.theta0.values();
  y.segment(n, n) = init.phi0.values();
  y.segment(2 * n, n) = -lap_ * init.phi0.values() +
                        apply(model_.potential.f, init.phi0.values()) -
                        p.chi * init.sigma0.values() -
                        p.Lambda * init.theta0.values();
  y.segment(3 * n, n) = init.sigma0.values();
  std::vector<VectorXd> levels{y};
  for (int k = 0; k < time_.steps(); ++k) {
    levels.push_back(step(levels.back(), u.slice(k).values(), k));
  }
  return levels;
}

std::vector<VectorXd> DenseOracle::linearized(const InitialData& init,
                                              const SpaceTimeField& u,
                                              const SpaceTimeField& h) const {
  const int n = n_;
  const auto base = state(init, u);
  std::vector<VectorXd> levels{VectorXd::Zero(4 * n)};
  for (int k = 0; k < time_.steps(); ++k) {
    const StepJacobian jac = step_jacobian(base[k], base[k + 1]);
    const VectorXd& prev = levels.back();
    VectorXd reduced(3 * n);
    reduced << prev.segment(0, n), prev.segment(n, n), prev.segment(3 * n, n);
    levels.push_back(jac.wrt_state * reduced +
                     jac.wrt_control * h.slice(k).values());
  }
  return levels;
}

MatrixXd DenseOracle::control_jacobian(const InitialData& init,
                                       const SpaceTimeField& u) const {
  const int n = n_;
  const int nt = time_.steps();
  const auto base = state(init, u);
  // Derivative of (theta, phi, sigma) at the current level w.r.t. all of h.
  MatrixXd carried = MatrixXd::Zero(3 * n, nt * n);
  MatrixXd out = MatrixXd::Zero(2 * nt * n, nt * n);
  for (int k = 0; k < nt; ++k) {
    const StepJacobian jac = step_jacobian(base[k], base[k + 1]);
    MatrixXd full = jac.wrt_state * carried;
    full.block(0, k * n, 4 * n, n) += jac.wrt_control;
    out.block(2 * k * n, 0, n, nt * n) = full.block(0, 0, n, nt * n);
    out.block((2 * k + 1) * n, 0, n, nt * n) = full.block(n, 0, n, nt * n);
    carried.block(0, 0, n, nt * n) = full.block(0, 0, n, nt * n);
    carried.block(n, 0, n, nt * n) = full.block(n, 0, n, nt * n);
    carried.block(2 * n, 0, n, nt * n) = full.block(3 * n, 0, n, nt * n);
  }
  return out;
}

std::vector<VectorXd> DenseOracle::adjoint_z(const InitialData& init,
                                             const SpaceTimeField& u,
                                             const CostSpec& cost) const {
  const int n = n_;
  const int nt = time_.steps();
  const double dt = time_.dt();
  const auto base = state(init, u);
  const MatrixXd jac = control_jacobian(init, u);

  // Weighted cost derivative with respect to (zeta^k, xi^k), k = 1..nt.
  VectorXd g = VectorXd::Zero(2 * nt * n);
  for (int k = 1; k <= nt; ++k) {
    const VectorXd theta = base[k].segment(0, n);
    const VectorXd phi = base[k].segment(n, n);
    VectorXd gt;
    VectorXd gp;
    if (k < nt) {
      gt = dt * cost.b1 * (theta - cost.theta_Q.slice(k).values());
      gp = dt * cost.b3 * (phi - cost.phi_Q.slice(k).values());
    } else {
      gt = cost.b2 * (theta - cost.theta_Omega.values());
      gp = cost.b4 * (phi - cost.phi_Omega.values());
    }
    g.segment(2 * (k - 1) * n, n) = weights_.cwiseProduct(gt);
    g.segment((2 * (k - 1) + 1) * n, n) = weights_.cwiseProduct(gp);
  }
  const VectorXd dj = jac.transpose() * g;
  std::vector<VectorXd> z;
  for (int k = 0; k < nt; ++k) {
    z.push_back(dj.segment(k * n, n).cwiseQuotient(dt * weights_));
  }
  return z;
}

}  // namespace caginalp
