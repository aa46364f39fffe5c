#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "susy/moutard2d.hpp"
#include "susy/residual.hpp"

namespace {

using susy::Grid2D;
using susy::GridIndex;
using susy::PathOrder;
using susy::Point;

// Away from the origin: [0.5, 3.5]^2 keeps atan2 single-valued.
Grid2D quadrant(std::size_t n) { return {0.5, 3.5, n, 0.5, 3.5, n}; }

// Closed-form partner of the Coulomb pair: (theta_corner - theta) / phi.
double coulomb_partner(Point p, Point corner) {
  return (std::atan2(corner.y, corner.x) - std::atan2(p.y, p.x)) * std::exp(p.radius());
}

double max_abs_error(const susy::ScalarField<Grid2D>& f, const std::function<double(Point)>& exact) {
  double e = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) e = std::max(e, std::abs(f[i] - exact(f.grid().point(i))));
  return e;
}

double max_rel_error(const susy::ScalarField<Grid2D>& f, const std::function<double(Point)>& exact) {
  double scale = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) scale = std::max(scale, std::abs(exact(f.grid().point(i))));
  return max_abs_error(f, exact) / scale;
}

TEST(PartnerPotential2D, CoulombSignFlips) {
  const auto g = quadrant(31);
  const auto u1 = susy::partner_potential_2d([](Point p) { return -1.0 / p.radius(); }, susy::coulomb_ground_support(1.0), g);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(u1[i], 1.0 / g.point(i).radius(), 1e-13);
}

TEST(PartnerPotential2D, StencilFallbackIsSecondOrder) {
  std::vector<double> errors;
  for (std::size_t n : {81u, 161u, 321u}) {
    const auto g = quadrant(n);
    auto s = susy::coulomb_ground_support(1.0);
    s.laplacian_log_phi = nullptr;
    const auto u1 = susy::partner_potential_2d([](Point) { return 0.0; }, s, g);
    errors.push_back(max_abs_error(u1, [](Point p) { return 2.0 / p.radius(); }));
  }
  for (double order : susy::observed_orders(errors)) EXPECT_GT(order, 1.8);
}

TEST(MoutardPair, RejectsNonPositivePhi) {
  const auto g = quadrant(5);
  const auto phi = susy::sample(g, [](Point p) { return p.x - 2.0; });
  try {
    susy::MoutardPair bad(phi, phi, 0.0);
    FAIL();
  } catch (const susy::InvalidSupport& e) {
    EXPECT_NE(std::string(e.what()).find("grid point 0"), std::string::npos) << e.what();
  }
  const auto ones = susy::sample(g, [](Point) { return 1.0; });
  EXPECT_THROW(susy::MoutardPair(susy::sample(quadrant(6), [](Point) { return 1.0; }), ones, 0.0), susy::InvalidArgument);
}

TEST(MoutardPair, CoulombPairConservesFlux) {
  std::vector<double> res;
  // exp(2r) growth keeps coarser grids pre-asymptotic.
  for (std::size_t n : {161u, 321u, 641u}) res.push_back(susy::conservation_residual(susy::coulomb_pair(1.0, quadrant(n))));
  for (double order : susy::observed_orders(res)) EXPECT_GT(order, 1.7);
}

TEST(MoutardTransform, CoulombPartnerMatchesClosedForm) {
  std::vector<double> errors;
  for (std::size_t n : {21u, 41u, 81u}) {
    const auto g = quadrant(n);
    const Point corner = g.point(0);
    const auto psi1 = susy::moutard_transform(susy::coulomb_pair(1.0, g));
    EXPECT_EQ(psi1[0], 0.0);
    errors.push_back(max_rel_error(psi1, [&](Point p) { return coulomb_partner(p, corner); }));
  }
  EXPECT_LT(errors.back(), 1e-2);
  for (double order : susy::observed_orders(errors)) EXPECT_GT(order, 1.8);
}

TEST(MoutardTransform, PathOrdersAgreeToSecondOrder) {
  std::vector<double> gaps;
  for (std::size_t n : {21u, 41u, 81u}) {
    const auto pair = susy::coulomb_pair(1.0, quadrant(n));
    const auto a = susy::moutard_transform(pair, PathOrder::HorizontalFirst);
    const auto b = susy::moutard_transform(pair, PathOrder::VerticalFirst);
    gaps.push_back((a.values() - b.values()).cwiseAbs().maxCoeff());
  }
  for (double order : susy::observed_orders(gaps)) EXPECT_GT(order, 1.8);
}

TEST(MoutardTransform, ExplicitPathMatchesLPathAndStaircase) {
  const auto g = quadrant(41);
  const auto pair = susy::coulomb_pair(1.0, g);
  std::vector<GridIndex> l_path{{0, 0}};
  for (std::size_t i = 1; i < 41; ++i) l_path.push_back({i, 0});
  for (std::size_t j = 1; j < 41; ++j) l_path.push_back({40, j});
  const auto full = susy::moutard_transform(pair);
  EXPECT_NEAR(susy::moutard_line_integral(pair, l_path), full[g.index(40, 40)], 1e-9);

  std::vector<GridIndex> stairs{{0, 0}};
  for (std::size_t k = 1; k <= 40; ++k) {
    stairs.push_back({k, k - 1});
    stairs.push_back({k, k});
  }
  const double exact = coulomb_partner(g.point(g.index(40, 40)), g.point(0));
  // On the diagonal the closed form vanishes; compare against the field's scale.
  EXPECT_NEAR(susy::moutard_line_integral(pair, stairs), exact, 1e-2 * full.values().cwiseAbs().maxCoeff());
}

TEST(MoutardTransform, RejectsMalformedPaths) {
  const auto pair = susy::coulomb_pair(1.0, quadrant(11));
  EXPECT_THROW((void)susy::moutard_line_integral(pair, {{1, 0}, {2, 0}}), susy::InvalidArgument);
  EXPECT_THROW((void)susy::moutard_line_integral(pair, {{0, 0}, {1, 1}}), susy::InvalidArgument);
  try {
    (void)susy::moutard_line_integral(pair, {{0, 0}, {0, 11}});
    FAIL();
  } catch (const susy::InvalidArgument& e) {
    EXPECT_NE(std::string(e.what()).find("leaves grid"), std::string::npos);
  }
  EXPECT_THROW((void)susy::moutard_line_integral(pair, {}), susy::InvalidArgument);
}

TEST(MoutardTransform, PartnerSolvesPartnerEquation) {
  std::vector<double> res;
  for (std::size_t n : {81u, 161u, 321u}) {
    const auto pair = susy::coulomb_pair(1.0, quadrant(n));
    res.push_back(susy::partner_eigen_residual(pair, susy::moutard_transform(pair)));
  }
  EXPECT_LT(res.back(), 1e-3);
  for (double order : susy::observed_orders(res)) EXPECT_GT(order, 1.8);
}

TEST(MatrixCandidate, AgreesWithFactorizedForm) {
  const auto g = quadrant(41);
  const auto pair = susy::coulomb_pair(1.0, g);
  const auto grad_f = [](Point p) {
    const double r = p.radius();
    const double d = std::exp(2.0 * r) / (r * r);
    return std::array<double, 2>{d * p.x, d * p.y};
  };
  const auto numeric = susy::matrix_candidate(pair);
  const auto analytic = susy::matrix_candidate(pair, 0.05, grad_f);
  EXPECT_LT(numeric.discrepancy, 5e-3);
  EXPECT_LT(analytic.discrepancy, 5e-3);
  // The analytic field is the oracle: phi grad f = (x, y) exp(r) / r^2.
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point p = g.point(i);
    EXPECT_NEAR(analytic.field[0][i], std::exp(p.radius()) * p.x / (p.radius() * p.radius()), 1e-12 * std::exp(p.radius()));
  }
}

TEST(MatrixCandidate, SupportItselfMapsToZero) {
  const auto g = quadrant(21);
  const auto phi = susy::sample(g, [](Point p) { return std::exp(-p.radius()); });
  const auto c = susy::matrix_candidate(susy::MoutardPair(phi, phi, -1.0));
  EXPECT_EQ(c.discrepancy, 0.0);
  EXPECT_EQ(c.field[0].values().cwiseAbs().maxCoeff(), 0.0);
}

TEST(MatrixCandidate, InconsistentGradientThrows) {
  const auto pair = susy::coulomb_pair(1.0, quadrant(21));
  const auto wrong = [](Point p) { return std::array<double, 2>{p.y, p.x}; };
  EXPECT_THROW((void)susy::matrix_candidate(pair, 0.05, wrong), susy::NumericalError);
}

// For an exact discrete eigenvector h0 psi = E psi, the field q psi satisfies
// h q psi = E q psi and H q psi = E0 q psi, since the two q's commute.
class MembershipOracle : public ::testing::Test {
 protected:
  void SetUp() override {
    hs = susy::assemble_hamiltonians(susy::coulomb_ground_support(1.0), grid);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es{Eigen::MatrixXd(hs.h0.matrix())};
    energy = es.eigenvalues()[5];
    const susy::Vector psi = es.eigenvectors().col(5);
    raw = susy::VectorField<Grid2D>({grid, hs.q[0].apply(psi)}, {grid, hs.q[1].apply(psi)});
  }

  Grid2D grid = Grid2D::centered(4.0, 12);
  susy::Hamiltonians2D hs = susy::assemble_hamiltonians(susy::constant_support(), Grid2D::centered(1.0, 3));
  double energy = 0.0;
  susy::VectorField<Grid2D> raw{susy::ScalarField<Grid2D>(grid), susy::ScalarField<Grid2D>(grid)};
};

TEST_F(MembershipOracle, ReproducesEigenrelations) {
  const auto f = susy::normalized(raw);
  const auto r = susy::level_membership_diagnostics(f, hs);
  const double e0 = hs.e0;
  EXPECT_NEAR(r.norm, 1.0, 1e-12);
  EXPECT_NEAR(r.rho_residual, std::abs(energy - e0), 1e-9);
  EXPECT_LT(r.sigma_residual, 1e-9);
  EXPECT_LT(r.annihilation_p, 1e-9);
  EXPECT_NEAR(r.rho_sigma_inner, energy / e0, 1e-9);
  EXPECT_NEAR(r.rho_sigma_sum, (energy + e0) * (energy + e0) / (4.0 * e0 * e0), 1e-9);
  EXPECT_EQ(r.points, grid.size());
}

TEST_F(MembershipOracle, RequiresNormalizedInput) {
  EXPECT_THROW((void)susy::level_membership_diagnostics(raw, hs), susy::InvalidArgument);
}

TEST_F(MembershipOracle, CoreRadiusRestrictsRegion) {
  const auto f = susy::normalized(raw, 1.0);
  const auto r = susy::level_membership_diagnostics(f, hs, {.core_radius = 1.0});
  EXPECT_NEAR(r.norm, 1.0, 1e-12);
  EXPECT_LT(r.points, grid.size());
  EXPECT_GT(r.points, 0u);
}

}  // namespace
