#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace caginalp {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

/// Uniform tensor-product node grid on [0, L_x] (x [0, L_y]).
///
/// Nodes sit on the boundary, so spacing is length / (n - 1). Node (i, j) has
/// flat index i + n_x * j. Every axis needs at least three nodes for the
/// mirror-closed Laplacian to be well defined.
class Grid {
 public:
  static Grid line(int n, double length);
  static Grid rect(int nx, int ny, double lx, double ly);

  int dim() const { return dim_; }
  int nodes(int axis) const { return n_[axis]; }
  double length(int axis) const { return length_[axis]; }
  double spacing(int axis) const { return spacing_[axis]; }
  int node_count() const { return dim_ == 1 ? n_[0] : n_[0] * n_[1]; }
  /// |Omega|
  double measure() const;

  int index(int i, int j = 0) const { return i + n_[0] * j; }
  std::array<int, 2> multi_index(int flat) const;
  double coordinate(int axis, int i) const { return i * spacing_[axis]; }

  /// Trapezoid weights: cell volume, halved per boundary axis.
  Vector weights() const;

  bool operator==(const Grid& other) const;
  bool operator!=(const Grid& other) const { return !(*this == other); }

 private:
  Grid(int dim, std::array<int, 2> n, std::array<double, 2> length);

  int dim_;
  std::array<int, 2> n_;
  std::array<double, 2> length_;
  std::array<double, 2> spacing_;
};

/// Uniform partition of [0, T] into nt steps.
class TimeGrid {
 public:
  TimeGrid(double horizon, int steps);

  /// Stored as dt * nt so that the identity holds exactly.
  double horizon() const { return horizon_; }
  int steps() const { return steps_; }
  double dt() const { return dt_; }
  double time(int n) const { return n * dt_; }

  bool operator==(const TimeGrid& other) const {
    return steps_ == other.steps_ && dt_ == other.dt_;
  }
  bool operator!=(const TimeGrid& other) const { return !(*this == other); }

 private:
  double horizon_;
  int steps_;
  double dt_;
};

/// Nodal values of one spatial function.
class Field {
 public:
  explicit Field(const Grid& grid);
  Field(const Grid& grid, Vector values);
  static Field constant(const Grid& grid, double value);

  const Grid& grid() const { return grid_; }
  const Vector& values() const { return values_; }
  Vector& values() { return values_; }
  double operator[](int i) const { return values_[i]; }
  int size() const { return static_cast<int>(values_.size()); }
  bool all_finite() const { return values_.allFinite(); }

 private:
  Grid grid_;
  Vector values_;
};

/// nt + 1 slices of a Field sampled at t_0 ... t_nt.
class SpaceTimeField {
 public:
  SpaceTimeField(const Grid& grid, const TimeGrid& time);
  SpaceTimeField(const TimeGrid& time, std::vector<Field> slices);
  static SpaceTimeField constant(const Grid& grid, const TimeGrid& time,
                                 double value);

  const Grid& grid() const { return slices_.front().grid(); }
  const TimeGrid& time() const { return time_; }
  int slice_count() const { return static_cast<int>(slices_.size()); }
  const Field& slice(int n) const { return slices_.at(n); }
  Field& slice(int n) { return slices_.at(n); }
  const std::vector<Field>& slices() const { return slices_; }

  SpaceTimeField& operator+=(const SpaceTimeField& other);
  SpaceTimeField& operator*=(double scale);
  /// this += scale * other
  SpaceTimeField& axpy(double scale, const SpaceTimeField& other);

 private:
  TimeGrid time_;
  std::vector<Field> slices_;
};

SpaceTimeField operator+(SpaceTimeField a, const SpaceTimeField& b);
SpaceTimeField operator-(SpaceTimeField a, const SpaceTimeField& b);
SpaceTimeField operator*(double scale, SpaceTimeField a);

// Neumann Laplacian ----------------------------------------------------------

/// Second-order stencil with ghost-node reflection at the boundary. Rows sum
/// to zero and the operator is self-adjoint in the weighted inner product.
Field laplacian_apply(const Field& f);
Vector laplacian_apply(const Grid& grid, const Vector& f);
SparseMatrix laplacian_matrix(const Grid& grid);

// Quadrature -----------------------------------------------------------------

double inner_product(const Field& f, const Field& g);
double inner_product(const Grid& grid, const Vector& f, const Vector& g);
double integrate(const Field& f);
double integrate(const Grid& grid, const Vector& f);
double mean_value(const Field& f);

struct Norms {
  double l2 = 0.0;
  double h1_semi = 0.0;
  double linf = 0.0;
};

Norms norms(const Field& f);
Norms norms(const Grid& grid, const Vector& f);

/// sum_{n < nt} dt * (a^n, b^n): left-endpoint rule in time, the L2(Q)
/// pairing for controls.
double spacetime_inner(const SpaceTimeField& a, const SpaceTimeField& b);
double spacetime_norm(const SpaceTimeField& a);

void require_same_grid(const Grid& a, const Grid& b, const char* what);

}  // namespace caginalp
