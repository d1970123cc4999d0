#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "caginalp/errors.hpp"
#include "caginalp/grid.hpp"

using namespace caginalp;

namespace {

Vector sample(const Grid& g, double (*fn)(double, double)) {
  Vector v(g.node_count());
  for (int k = 0; k < g.node_count(); ++k) {
    const auto ij = g.multi_index(k);
    const double x = g.coordinate(0, ij[0]);
    const double y = g.dim() == 2 ? g.coordinate(1, ij[1]) : 0.0;
    v[k] = fn(x, y);
  }
  return v;
}

}  // namespace

TEST(Grid, RejectsTooFewNodes) {
  EXPECT_THROW(Grid::line(2, 1.0), ConfigError);
  EXPECT_THROW(Grid::rect(3, 2, 1.0, 1.0), ConfigError);
  EXPECT_THROW(Grid::line(5, -1.0), ConfigError);
}

TEST(Grid, SpacingAndIndexing) {
  const Grid g = Grid::rect(5, 3, 2.0, 1.0);
  EXPECT_DOUBLE_EQ(g.spacing(0), 0.5);
  EXPECT_DOUBLE_EQ(g.spacing(1), 0.5);
  EXPECT_EQ(g.node_count(), 15);
  EXPECT_EQ(g.index(2, 1), 7);
  EXPECT_EQ(g.multi_index(7), (std::array<int, 2>{2, 1}));
  EXPECT_DOUBLE_EQ(g.measure(), 2.0);
}

TEST(Grid, TimeGridIdentity) {
  const TimeGrid t(1.0, 50);
  EXPECT_EQ(t.steps(), 50);
  EXPECT_DOUBLE_EQ(t.dt() * t.steps(), t.horizon());
  EXPECT_THROW(TimeGrid(1.0, 0), ConfigError);
}

TEST(Laplacian, ThreeNodeStencil) {
  const Grid g = Grid::line(3, 2.0);  // h = 1
  const Eigen::MatrixXd a = Eigen::MatrixXd(laplacian_matrix(g));
  Eigen::MatrixXd expected(3, 3);
  expected << -2, 2, 0, 1, -2, 1, 0, 2, -2;
  EXPECT_LT((a - expected).cwiseAbs().maxCoeff(), 1e-15);

  const Vector out = laplacian_apply(g, Vector::Unit(3, 1));
  EXPECT_DOUBLE_EQ(out[0], 2.0);
  EXPECT_DOUBLE_EQ(out[1], -2.0);
  EXPECT_DOUBLE_EQ(out[2], 2.0);
}

TEST(Laplacian, AnnihilatesConstantsAndIntegratesToZero) {
  const Grid g = Grid::rect(7, 5, 1.0, 0.6);
  EXPECT_EQ(laplacian_apply(g, Vector::Constant(g.node_count(), 3.7))
                .cwiseAbs()
                .maxCoeff(),
            0.0);
  const Vector f = sample(g, [](double x, double y) { return x * x * y + std::sin(5 * y); });
  EXPECT_LT(std::abs(integrate(g, laplacian_apply(g, f))), 1e-12);
}

TEST(Laplacian, SelfAdjointInWeightedProduct) {
  for (const Grid& g : {Grid::line(9, 1.3), Grid::rect(6, 4, 1.0, 2.0)}) {
    const Eigen::MatrixXd a = Eigen::MatrixXd(laplacian_matrix(g));
    const Eigen::MatrixXd wa = g.weights().asDiagonal() * a;
    EXPECT_LT((wa - wa.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Laplacian, SecondOrderUnderMeshHalving) {
  constexpr double pi = std::numbers::pi;
  const auto error = [&](int n) {
    const Grid g = Grid::line(n, 1.0);
    const Vector f = sample(g, [](double x, double) { return std::cos(pi * x); });
    const Vector exact = -pi * pi * f;
    return (laplacian_apply(g, f) - exact).cwiseAbs().maxCoeff();
  };
  for (int n : {9, 17, 33}) {
    const double ratio = error(n) / error(2 * n - 1);
    EXPECT_GE(ratio, 3.6) << n;
    EXPECT_LE(ratio, 4.4) << n;
  }
  const auto error2d = [&](int n) {
    const Grid g = Grid::rect(n, n, 1.0, 1.0);
    const Vector f = sample(g, [](double x, double y) {
      return std::cos(pi * x) * std::cos(2 * pi * y);
    });
    return (laplacian_apply(g, f) + 5 * pi * pi * f).cwiseAbs().maxCoeff();
  };
  const double ratio = error2d(17) / error2d(33);
  EXPECT_GE(ratio, 3.6);
  EXPECT_LE(ratio, 4.4);
}

TEST(Quadrature, Trapezoid) {
  const Grid g = Grid::line(11, 2.0);
  EXPECT_DOUBLE_EQ(integrate(g, Vector::Ones(11)), 2.0);
  const Grid unit = Grid::line(11, 1.0);
  const Field ramp(unit, sample(unit, [](double x, double) { return x; }));
  EXPECT_NEAR(mean_value(ramp), 0.5, 1e-15);
  const Grid r = Grid::rect(4, 6, 1.5, 2.0);
  EXPECT_NEAR(integrate(r, Vector::Ones(r.node_count())), 3.0, 1e-14);
  EXPECT_NEAR(r.weights().sum(), 3.0, 1e-14);
}

TEST(Quadrature, H1SemiNormIsEdgeDifferenceSum) {
  const Grid g = Grid::line(13, 1.7);
  const Vector f = sample(g, [](double x, double) { return std::exp(x) - x * x; });
  double sum = 0.0;
  for (int i = 0; i + 1 < 13; ++i) {
    const double d = (f[i + 1] - f[i]) / g.spacing(0);
    sum += g.spacing(0) * d * d;
  }
  EXPECT_NEAR(norms(g, f).h1_semi, std::sqrt(sum), 1e-10);

  const Grid r = Grid::rect(5, 4, 1.0, 0.9);
  const Vector h = sample(r, [](double x, double y) { return std::sin(3 * x) * y; });
  const double hx = r.spacing(0), hy = r.spacing(1);
  double s2 = 0.0;
  for (int j = 0; j < 4; ++j) {
    const double wy = (j == 0 || j == 3) ? 0.5 * hy : hy;
    for (int i = 0; i + 1 < 5; ++i) {
      const double d = (h[r.index(i + 1, j)] - h[r.index(i, j)]) / hx;
      s2 += wy * hx * d * d;
    }
  }
  for (int i = 0; i < 5; ++i) {
    const double wx = (i == 0 || i == 4) ? 0.5 * hx : hx;
    for (int j = 0; j + 1 < 4; ++j) {
      const double d = (h[r.index(i, j + 1)] - h[r.index(i, j)]) / hy;
      s2 += wx * hy * d * d;
    }
  }
  EXPECT_NEAR(norms(r, h).h1_semi, std::sqrt(s2), 1e-10);
}

TEST(Quadrature, SpaceTimePairingUsesLeftEndpoint) {
  const Grid g = Grid::line(5, 1.0);
  const TimeGrid t(2.0, 4);
  SpaceTimeField a = SpaceTimeField::constant(g, t, 1.0);
  a.slice(4) = Field::constant(g, 100.0);  // ignored
  EXPECT_NEAR(spacetime_inner(a, a), 2.0, 1e-15);
}

TEST(Fields, MismatchedGridsAreRejected) {
  const Grid a = Grid::line(5, 1.0);
  const Grid b = Grid::line(6, 1.0);
  EXPECT_THROW(require_same_grid(a, b, "test"), UsageError);
  SpaceTimeField x(a, TimeGrid(1.0, 2));
  SpaceTimeField y(b, TimeGrid(1.0, 2));
  EXPECT_THROW(x += y, UsageError);
}
