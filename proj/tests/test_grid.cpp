#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "susy/grid.hpp"
#include "susy/residual.hpp"

namespace {

using susy::Grid1D;
using susy::Grid2D;
using susy::Point;
using susy::RadialGrid;

TEST(Grid1D, SpacingAndPoints) {
  const Grid1D g(0.0, 1.0, 11);
  EXPECT_DOUBLE_EQ(g.spacing(), 0.1);
  EXPECT_DOUBLE_EQ(g.x(10), 1.0);
  for (std::size_t i = 1; i < g.size(); ++i) EXPECT_GT(g.x(i), g.x(i - 1));
}

TEST(Grid1D, RejectsDegenerateInput) {
  EXPECT_THROW(Grid1D(0.0, 1.0, 2), susy::InvalidArgument);
  EXPECT_THROW(Grid1D(1.0, 1.0, 5), susy::InvalidArgument);
  EXPECT_THROW((void)Grid1D(0.0, 1.0, 5).spacing(1), susy::InvalidArgument);
}

TEST(RadialGrid, StaggeredStartsHalfCellOut) {
  const auto g = RadialGrid::staggered(60.0, 6000);
  EXPECT_NEAR(g.spacing(), 0.01, 1e-15);
  EXPECT_NEAR(g.r(0), 0.005, 1e-15);
  EXPECT_NEAR(g.r(g.size() - 1), 59.995, 1e-10);
  EXPECT_THROW(RadialGrid(0.0, 1.0, 10), susy::InvalidArgument);
}

TEST(Grid2D, RowMajorOrdering) {
  const Grid2D g(0.0, 2.0, 3, 0.0, 3.0, 4);
  EXPECT_EQ(g.size(), 12u);
  EXPECT_EQ(g.index(1, 2), 6u);
  const Point p = g.point(6);
  EXPECT_DOUBLE_EQ(p.x, 1.0);
  EXPECT_DOUBLE_EQ(p.y, 2.0);
  EXPECT_EQ(g.stride(0), 4u);
  EXPECT_EQ(g.stride(1), 1u);
  EXPECT_THROW((void)g.extent(2), susy::InvalidArgument);
}

TEST(Grid2D, CenteredGridAvoidsOrigin) {
  for (std::size_t n : {8u, 9u, 64u, 65u}) {
    const auto g = Grid2D::centered(5.0, n);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_GT(g.point(i).radius(), 0.1 * g.spacing(0));
  }
}

TEST(Grid2D, DoubledKeepsSpacing) {
  const auto g = Grid2D::centered(4.0, 17);
  const auto d = g.doubled();
  EXPECT_NEAR(d.spacing(0), g.spacing(0), 1e-14);
  EXPECT_EQ(d.nx(), 33u);
  EXPECT_NEAR(d.x_max() - d.x_min(), 2 * (g.x_max() - g.x_min()), 1e-12);
}

TEST(ScalarField, Invariants) {
  const Grid1D g(0.0, 1.0, 5);
  EXPECT_THROW(susy::ScalarField<Grid1D>(g, susy::Vector::Zero(4)), susy::InvalidArgument);
  susy::Vector v = susy::Vector::Zero(5);
  v[2] = NAN;
  EXPECT_THROW(susy::ScalarField<Grid1D>(g, v), susy::NumericalError);
  const susy::ScalarField<Grid1D> a(g);
  const susy::ScalarField<Grid1D> b(Grid1D(0.0, 2.0, 5));
  EXPECT_THROW(susy::VectorField<Grid1D>(a, b), susy::InvalidArgument);
}

TEST(ForwardDiff, ConstantGivesZero) {
  const Grid2D g(0.0, 1.0, 6, 0.0, 1.0, 7);
  const auto c = susy::sample(g, [](Point) { return 3.5; });
  for (int axis : {0, 1}) EXPECT_LT(susy::forward_diff(c, axis).values().lpNorm<Eigen::Infinity>(), 1e-12);
}

TEST(ForwardDiff, ExactOnLinear) {
  const Grid1D g(-1.0, 2.0, 31);
  const auto d = susy::forward_diff(susy::sample(g, [](Point p) { return p.x; }), 0);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(d[i], 1.0, 1e-12);
}

TEST(ForwardDiff, HandStencilOnSquare) {
  const Grid1D g(0.0, 2.0, 21);  // h = 0.1, x = 1 at i = 10
  const auto d = susy::forward_diff(susy::sample(g, [](Point p) { return p.x * p.x; }), 0);
  EXPECT_NEAR(d[10], 2.1, 1e-12);
}

TEST(ForwardDiff, AxisOutOfRange) {
  const Grid1D g(0.0, 1.0, 5);
  EXPECT_THROW(susy::forward_diff(susy::ScalarField<Grid1D>(g), 1), susy::InvalidArgument);
}

TEST(ForwardDiff, TransposeIsMinusBackwardAwayFromEdges) {
  const Grid1D g(0.0, 1.0, 12);
  const susy::SparseMatrix fwd = susy::difference_matrix(g, 0, susy::Stencil::Forward);
  const susy::SparseMatrix bwd = susy::difference_matrix(g, 0, susy::Stencil::Backward);
  const Eigen::MatrixXd sum = Eigen::MatrixXd(fwd.transpose()) + Eigen::MatrixXd(bwd);
  for (Eigen::Index i = 0; i < sum.rows(); ++i) {
    const bool touches_edge = i <= 0 || i >= sum.rows() - 2;
    if (!touches_edge) {
      EXPECT_EQ(sum.row(i).cwiseAbs().maxCoeff(), 0.0) << "row " << i;
    }
  }
  EXPECT_GT(sum.cwiseAbs().maxCoeff(), 0.0);
  // Transpose is the adjoint in the discrete product.
  const auto xs = susy::random_fields(12, 7, 2);
  EXPECT_NEAR(susy::inner(fwd * xs[0], xs[1], g.cell_volume()),
              susy::inner(xs[0], susy::Vector(fwd.transpose() * xs[1]), g.cell_volume()), 1e-13);
}

TEST(CentralDifference, IsAntisymmetric) {
  const Grid2D g(0.0, 1.0, 5, 0.0, 2.0, 6);
  for (int axis : {0, 1}) {
    const susy::SparseMatrix d = susy::difference_matrix(g, axis, susy::Stencil::Central);
    EXPECT_EQ((Eigen::MatrixXd(d) + Eigen::MatrixXd(d.transpose())).cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(GradientComponent, SecondOrderIncludingEdges) {
  std::vector<double> errors;
  for (std::size_t n : {21u, 41u, 81u}) {
    const Grid1D g(0.0, 2.0, n);
    const auto d = susy::gradient_component(susy::sample(g, [](Point p) { return std::sin(p.x); }), 0);
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) e = std::max(e, std::abs(d[i] - std::cos(g.x(i))));
    errors.push_back(e);
  }
  for (double order : susy::observed_orders(errors)) EXPECT_GT(order, 1.8);
}

TEST(Quadrature, UnitIntegral) {
  const Grid1D g(0.0, 1.0, 17);
  EXPECT_NEAR(susy::quadrature(susy::sample(g, [](Point) { return 1.0; })), 1.0, 1e-14);
  const Grid2D g2(0.0, 2.0, 9, 0.0, 3.0, 7);
  EXPECT_NEAR(susy::quadrature(susy::sample(g2, [](Point) { return 1.0; })), 6.0, 1e-13);
}

TEST(Quadrature, RadialMeasure) {
  // 2 pi int r^3 e^{-2r} dr = 2 pi Gamma(4) / 2^4 and 2 pi int r e^{-2r} dr = 2 pi / 4.
  const auto g = RadialGrid::staggered(40.0, 8000);
  const double a = susy::quadrature(susy::sample(g, [](Point p) { return p.x * p.x * std::exp(-2 * p.x); }));
  const double b = susy::quadrature(susy::sample(g, [](Point p) { return std::exp(-2 * p.x); }));
  EXPECT_NEAR(a, 2 * M_PI * 6.0 / 16.0, 1e-4);
  EXPECT_NEAR(b, 2 * M_PI / 4.0, 1e-4);
}

TEST(Quadrature, ConvergesAtSecondOrder) {
  std::vector<double> errors;
  for (std::size_t n : {11u, 21u, 41u, 81u}) {
    const Grid1D g(0.0, 1.0, n);
    errors.push_back(std::abs(susy::quadrature(susy::sample(g, [](Point p) { return std::exp(p.x); })) - (M_E - 1.0)));
  }
  for (double order : susy::observed_orders(errors)) EXPECT_GE(order, 1.95);
}

TEST(Quadrature, ProductIsSymmetric) {
  const Grid2D g(-1.0, 1.0, 13, -2.0, 2.0, 11);
  const auto xs = susy::random_fields(static_cast<Eigen::Index>(g.size()), 3, 2);
  const susy::ScalarField<Grid2D> f(g, xs[0]);
  const susy::ScalarField<Grid2D> h(g, xs[1]);
  EXPECT_EQ(susy::quadrature(susy::product(f, h)), susy::quadrature(susy::product(h, f)));
  EXPECT_EQ(susy::inner(f, h), susy::inner(h, f));
}

TEST(Csv, RoundTrip1D) {
  const Grid1D g(-2.0, 3.0, 9);
  const auto f = susy::sample(g, [](Point p) { return std::sin(p.x); });
  std::stringstream ss;
  susy::write_csv(ss, f);
  EXPECT_EQ(ss.str().substr(0, 8), "x,value\n");
  const auto back = susy::read_csv_1d(ss);
  EXPECT_EQ(back.grid(), g);
  EXPECT_EQ((back.values() - f.values()).norm(), 0.0);
}

TEST(Csv, RoundTrip2D) {
  const Grid2D g(-1.0, 1.0, 4, 0.0, 2.0, 5);
  const auto f = susy::sample(g, [](Point p) { return p.x * 10 + p.y; });
  std::stringstream ss;
  susy::write_csv(ss, f);
  const auto back = susy::read_csv_2d(ss);
  EXPECT_EQ(back.grid().nx(), 4u);
  EXPECT_EQ(back.grid().ny(), 5u);
  EXPECT_EQ((back.values() - f.values()).norm(), 0.0);
}

TEST(Csv, RejectsMalformedRows) {
  std::stringstream ss("x,value\n0,1\n1,abc\n2,3\n");
  EXPECT_THROW(susy::read_csv_1d(ss), susy::InvalidArgument);
}

}  // namespace
