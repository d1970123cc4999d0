#include "caginalp/grid.hpp"

#include <cmath>
#include <string>

#include "caginalp/errors.hpp"

namespace caginalp {

namespace {

void check_axis(int n, double length, const char* axis) {
  if (n < 3) {
    throw ConfigError(std::string("grid axis ") + axis +
                      " needs at least 3 nodes, got " + std::to_string(n));
  }
  if (!(length > 0.0) || !std::isfinite(length)) {
    throw ConfigError(std::string("grid axis ") + axis +
                      " length must be positive and finite");
  }
}

// 1D mirror stencil along one axis, accumulated into out.
void add_axis_laplacian(const Grid& grid, int axis, const Vector& f,
                        Vector& out) {
  const int nx = grid.nodes(0);
  const int ny = grid.dim() == 2 ? grid.nodes(1) : 1;
  const int n = grid.nodes(axis);
  const double inv_h2 = 1.0 / (grid.spacing(axis) * grid.spacing(axis));
  const int stride = axis == 0 ? 1 : nx;
  const int lines = axis == 0 ? ny : nx;
  for (int line = 0; line < lines; ++line) {
    const int base = axis == 0 ? line * nx : line;
    for (int i = 0; i < n; ++i) {
      const int k = base + i * stride;
      // Ghost node f_{-1} = f_{1}, f_{n} = f_{n-2}.
      const double left = i == 0 ? f[k + stride] : f[k - stride];
      const double right = i == n - 1 ? f[k - stride] : f[k + stride];
      out[k] += (left - 2.0 * f[k] + right) * inv_h2;
    }
  }
}

}  // namespace

Grid::Grid(int dim, std::array<int, 2> n, std::array<double, 2> length)
    : dim_(dim), n_(n), length_(length), spacing_{0.0, 0.0} {
  for (int a = 0; a < dim_; ++a) {
    spacing_[a] = length_[a] / (n_[a] - 1);
  }
}

Grid Grid::line(int n, double length) {
  check_axis(n, length, "x");
  return Grid(1, {n, 1}, {length, 0.0});
}

Grid Grid::rect(int nx, int ny, double lx, double ly) {
  check_axis(nx, lx, "x");
  check_axis(ny, ly, "y");
  return Grid(2, {nx, ny}, {lx, ly});
}

double Grid::measure() const {
  return dim_ == 1 ? length_[0] : length_[0] * length_[1];
}

std::array<int, 2> Grid::multi_index(int flat) const {
  return {flat % n_[0], flat / n_[0]};
}

Vector Grid::weights() const {
  const auto axis_weights = [this](int axis) {
    Vector w = Vector::Constant(n_[axis], spacing_[axis]);
    w[0] *= 0.5;
    w[n_[axis] - 1] *= 0.5;
    return w;
  };
  const Vector wx = axis_weights(0);
  if (dim_ == 1) {
    return wx;
  }
  const Vector wy = axis_weights(1);
  Vector w(node_count());
  for (int j = 0; j < n_[1]; ++j) {
    for (int i = 0; i < n_[0]; ++i) {
      w[index(i, j)] = wx[i] * wy[j];
    }
  }
  return w;
}

bool Grid::operator==(const Grid& other) const {
  if (dim_ != other.dim_) return false;
  for (int a = 0; a < dim_; ++a) {
    if (n_[a] != other.n_[a] || length_[a] != other.length_[a]) return false;
  }
  return true;
}

TimeGrid::TimeGrid(double horizon, int steps) : steps_(steps) {
  if (steps < 1) {
    throw ConfigError("time grid needs at least one step");
  }
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw ConfigError("time horizon must be positive and finite");
  }
  dt_ = horizon / steps;
  horizon_ = dt_ * steps;
}

Field::Field(const Grid& grid)
    : grid_(grid), values_(Vector::Zero(grid.node_count())) {}

Field::Field(const Grid& grid, Vector values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.node_count()) {
    throw UsageError("field value count " + std::to_string(values_.size()) +
                     " does not match grid node count " +
                     std::to_string(grid_.node_count()));
  }
}

Field Field::constant(const Grid& grid, double value) {
  return Field(grid, Vector::Constant(grid.node_count(), value));
}

SpaceTimeField::SpaceTimeField(const Grid& grid, const TimeGrid& time)
    : time_(time), slices_(time.steps() + 1, Field(grid)) {}

SpaceTimeField::SpaceTimeField(const TimeGrid& time, std::vector<Field> slices)
    : time_(time), slices_(std::move(slices)) {
  if (static_cast<int>(slices_.size()) != time_.steps() + 1) {
    throw UsageError("space-time field needs nt + 1 = " +
                     std::to_string(time_.steps() + 1) + " slices, got " +
                     std::to_string(slices_.size()));
  }
  for (const auto& s : slices_) {
    require_same_grid(slices_.front().grid(), s.grid(), "space-time slice");
  }
}

SpaceTimeField SpaceTimeField::constant(const Grid& grid, const TimeGrid& time,
                                        double value) {
  return SpaceTimeField(
      time, std::vector<Field>(time.steps() + 1, Field::constant(grid, value)));
}

SpaceTimeField& SpaceTimeField::operator+=(const SpaceTimeField& other) {
  return axpy(1.0, other);
}

SpaceTimeField& SpaceTimeField::operator*=(double scale) {
  for (auto& s : slices_) s.values() *= scale;
  return *this;
}

SpaceTimeField& SpaceTimeField::axpy(double scale,
                                     const SpaceTimeField& other) {
  if (other.time_ != time_) {
    throw UsageError("space-time fields live on different time grids");
  }
  require_same_grid(grid(), other.grid(), "space-time axpy");
  for (int n = 0; n < slice_count(); ++n) {
    slices_[n].values() += scale * other.slices_[n].values();
  }
  return *this;
}

SpaceTimeField operator+(SpaceTimeField a, const SpaceTimeField& b) {
  a += b;
  return a;
}

SpaceTimeField operator-(SpaceTimeField a, const SpaceTimeField& b) {
  a.axpy(-1.0, b);
  return a;
}

SpaceTimeField operator*(double scale, SpaceTimeField a) {
  a *= scale;
  return a;
}

Vector laplacian_apply(const Grid& grid, const Vector& f) {
  if (f.size() != grid.node_count()) {
    throw UsageError("laplacian_apply: size mismatch");
  }
  Vector out = Vector::Zero(f.size());
  for (int axis = 0; axis < grid.dim(); ++axis) {
    add_axis_laplacian(grid, axis, f, out);
  }
  return out;
}

Field laplacian_apply(const Field& f) {
  return Field(f.grid(), laplacian_apply(f.grid(), f.values()));
}

SparseMatrix laplacian_matrix(const Grid& grid) {
  const int size = grid.node_count();
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(size) * (1 + 2 * grid.dim()));
  for (int axis = 0; axis < grid.dim(); ++axis) {
    const int n = grid.nodes(axis);
    const int stride = axis == 0 ? 1 : grid.nodes(0);
    const double inv_h2 = 1.0 / (grid.spacing(axis) * grid.spacing(axis));
    for (int k = 0; k < size; ++k) {
      const int i = grid.multi_index(k)[axis];
      entries.emplace_back(k, k, -2.0 * inv_h2);
      if (i == 0) {
        entries.emplace_back(k, k + stride, 2.0 * inv_h2);
      } else if (i == n - 1) {
        entries.emplace_back(k, k - stride, 2.0 * inv_h2);
      } else {
        entries.emplace_back(k, k - stride, inv_h2);
        entries.emplace_back(k, k + stride, inv_h2);
      }
    }
  }
  SparseMatrix a(size, size);
  a.setFromTriplets(entries.begin(), entries.end());
  a.makeCompressed();
  return a;
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (a != b) {
    throw UsageError(std::string(what) + ": grid mismatch");
  }
}

double inner_product(const Grid& grid, const Vector& f, const Vector& g) {
  if (f.size() != grid.node_count() || g.size() != grid.node_count()) {
    throw UsageError("inner_product: size mismatch");
  }
  return (grid.weights().array() * f.array() * g.array()).sum();
}

double inner_product(const Field& f, const Field& g) {
  require_same_grid(f.grid(), g.grid(), "inner_product");
  return inner_product(f.grid(), f.values(), g.values());
}

double integrate(const Grid& grid, const Vector& f) {
  return grid.weights().dot(f);
}

double integrate(const Field& f) { return integrate(f.grid(), f.values()); }

double mean_value(const Field& f) {
  return integrate(f) / f.grid().measure();
}

Norms norms(const Grid& grid, const Vector& f) {
  Norms out;
  out.l2 = std::sqrt(inner_product(grid, f, f));
  // Clamp tiny negative roundoff for near-constant fields.
  const double energy = -inner_product(grid, laplacian_apply(grid, f), f);
  out.h1_semi = std::sqrt(std::max(0.0, energy));
  out.linf = f.size() == 0 ? 0.0 : f.cwiseAbs().maxCoeff();
  return out;
}

Norms norms(const Field& f) { return norms(f.grid(), f.values()); }

double spacetime_inner(const SpaceTimeField& a, const SpaceTimeField& b) {
  if (a.time() != b.time()) {
    throw UsageError("spacetime_inner: time grid mismatch");
  }
  double sum = 0.0;
  for (int n = 0; n < a.time().steps(); ++n) {
    sum += inner_product(a.slice(n), b.slice(n));
  }
  return a.time().dt() * sum;
}

double spacetime_norm(const SpaceTimeField& a) {
  return std::sqrt(spacetime_inner(a, a));
}

}  // namespace caginalp
