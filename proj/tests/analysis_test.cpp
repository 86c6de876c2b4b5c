#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "wbv/analysis.hpp"
#include "wbv/cli/fixtures.hpp"

using namespace wbv;

namespace {

PiecewiseFunction1D tent() { return PiecewiseFunction1D::interpolant({-1.0, 0.0, 1.0}, {0.0, 1.0, 0.0}); }

}  // namespace

TEST(Coarea, TentUnderUnitWeight) {
  // {tent > t} is an interval for t in (0, 1): perimeter 2 at every level.
  const CoareaReport r = coarea_check(tent(), Weight::constant(1.0), -2.0, 2.0, 200);
  EXPECT_NEAR(r.integral, 2.0, 1e-9);
  EXPECT_NEAR(r.direct, 2.0, 1e-9);
  ASSERT_TRUE(r.gap.has_value());
  EXPECT_LT(*r.gap, 1e-6);
  for (double p : r.perimeters) EXPECT_NEAR(p, 2.0, 1e-12);
}

TEST(Coarea, TentUnderAffineWeight) {
  // Level t cuts at +-(1 - t), where |x| + 1 is 2 - t; integral of 2(2 - t) is 3.
  const CoareaReport r = coarea_check(tent(), Weight::expression(Expr("abs(x)+1")), -2.0, 2.0, 800);
  EXPECT_NEAR(r.integral, 3.0, 1e-6);
  EXPECT_NEAR(r.direct, 3.0, 1e-8);
}

TEST(Coarea, GridFunctionIsExactInOneDimension) {
  const Grid g = make_grid(BoxDomain::interval(-2, 2), 512);
  const GridFunction f = sample([](const Point& p) { return std::max(0.0, 1.0 - std::fabs(p[0])); }, g);
  const CoareaReport r = coarea_check(f, Weight::expression(Expr("abs(x)+1")), 2000);
  ASSERT_TRUE(r.gap.has_value());
  EXPECT_LT(*r.gap, 1e-3);
}

// The discrete gradient of f is the level integral of those of {f > t}, so the
// isotropic variation sits below the level integral (it is not equal in 2-D).
TEST(Coarea, GridLevelIntegralBoundsVariationInTwoDimensions) {
  const Grid g = make_grid(BoxDomain::cube(2, -2, 2), 128);
  const GridFunction f = sample([](const Point& p) { return std::max(0.0, 1.0 - std::hypot(p[0], p[1])); }, g);
  const CoareaReport r = coarea_check(f, Weight::constant(1.0), 400);
  EXPECT_LE(r.direct, r.integral * (1 + 1e-3));
  EXPECT_NEAR(r.direct, std::numbers::pi, 5e-2);  // |grad f| = 1 on the unit disk
}

TEST(Isometry, StepSubgraphMatchesWeightedVariation) {
  const Grid base = make_grid(BoxDomain::interval(-2, 2), 256);
  const IsometryReport r = isometry_check(ShapeSet::interval(0, 1), Weight::step(0.0, 1.0, 2.0), base, 256);
  EXPECT_NEAR(r.base_variation, 3.0, 1e-12);
  EXPECT_NEAR(r.lifted_variation, 3.0, 1e-12);
  EXPECT_LT(r.l1_gap, 1e-9);
}

TEST(Isometry, ContinuousWeightWithinTwoPercent) {
  const Grid base = make_grid(BoxDomain::interval(-1, 2), 256);
  const IsometryReport r = isometry_check(ShapeSet::interval(0, 1), Weight::expression(Expr("x+2")), base, 256);
  EXPECT_NEAR(r.base_variation, 5.0, 1e-9);
  EXPECT_LT(r.variation_gap, 2e-2);
}

TEST(Gns, UnitDiskConstant) {
  // ||chi_B||_{L^2} / P(B) = sqrt(pi) / (2 pi) = 1 / (2 sqrt pi).
  const Grid g = cli::gns_grid();
  const GnsReport r = gns_check(SetIndicator{ShapeSet::disk(Point{}, 1.0), g}, Weight::constant(1.0), 1.0, false);
  EXPECT_EQ(r.n, 2);
  EXPECT_DOUBLE_EQ(r.one_star, 2.0);
  EXPECT_NEAR(r.required_c1(), 0.5 / std::sqrt(std::numbers::pi), 2e-2 * 0.28209);
  EXPECT_GT(r.residual, 0.0);
}

// Property: the empirical constant admits every member of the suite it was
// fitted on, and the dilated held-out members.
TEST(Gns, EmpiricalConstantCoversSuiteAndHeldOut) {
  const std::vector<GnsFixture> suite = cli::gns_suite();
  const double c1 = empirical_c1(suite);
  EXPECT_GT(c1, 0.0);
  for (const GnsFixture& fx : suite) EXPECT_GE(gns_check(fx, c1).residual, -1e-9) << fx.name;
  for (const GnsFixture& fx : cli::gns_held_out(suite)) EXPECT_GE(gns_check(fx, c1).residual, -1e-9) << fx.name;
}

TEST(Isoperimetric, UnitSquareRatio) {
  const Grid g = cli::gns_grid();
  const IsoperimetricReport r =
      isoperimetric_check(ShapeSet::box(2, {0, 0, 0}, {1, 1, 0}), Weight::constant(1.0), 1.0, g);
  EXPECT_NEAR(r.w_of_e, 1.0, 1e-9);
  EXPECT_NEAR(r.boundary, 4.0, 1e-9);
  EXPECT_NEAR(r.ratio, 0.25, 1e-6);
}

TEST(Dilation, ScalesTheArgument) {
  const Weight w = Weight::expression(Expr("1 + x^2"));
  const Weight d = dilated(w, 2.0);
  EXPECT_NEAR(d(Point{1.0, 0, 0}), w(Point{0.5, 0, 0}), 1e-12);
}
