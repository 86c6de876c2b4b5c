#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "wbv/variation.hpp"

using namespace wbv;

TEST(WeightedTv, IndicatorOfIntervalUnderUnitWeight) {
  const Grid g = make_grid(BoxDomain::interval(-2, 2), 400);
  const GridFunction f = indicator(ShapeSet::interval(-0.5, 1.0), g);
  EXPECT_NEAR(weighted_tv(f, Weight::constant(1.0)).value, 2.0, 1e-12);
  EXPECT_NEAR(weighted_tv(f, Weight::constant(3.0)).value, 6.0, 1e-12);
}

TEST(WeightedTv, ScalesAbsolutelyAndIgnoresConstants) {
  const Grid g = make_grid(BoxDomain::cube(2, -1, 1), 64);
  const GridFunction f = sample([](const Point& p) { return std::sin(2 * p[0]) * p[1]; }, g);
  const GridFunction w = sample(Weight::expression(Expr("1 + x^2")), g);
  const double tv = weighted_tv(f, w).value;
  EXPECT_GT(tv, 0.0);
  EXPECT_NEAR(weighted_tv(f.scaled(-2.5), w).value, 2.5 * tv, 1e-12 * tv);
  EXPECT_NEAR(weighted_tv(f.map([](double v) { return v + 7.0; }), w).value, tv, 1e-12 * tv);
  EXPECT_EQ(weighted_tv(GridFunction(g, 4.0), w).value, 0.0);
}

TEST(SmoothVariation, MatchesClosedForms) {
  // integral over (0, 1) of |d/dx x^2| = 1; with weight 1 + x the value is 5/3.
  const BoxDomain unit = BoxDomain::interval(0, 1);
  EXPECT_NEAR(smooth_variation(Expr("x^2"), Weight::constant(1.0), unit).value, 1.0, 1e-9);
  EXPECT_NEAR(smooth_variation(Expr("x^2"), Weight::expression(Expr("1+x")), unit).value, 5.0 / 3.0, 1e-9);
  // |grad (x + y)| = sqrt 2 over the unit square.
  EXPECT_NEAR(smooth_variation(Expr("x+y"), Weight::constant(1.0), BoxDomain::cube(2, 0, 1)).value,
              std::sqrt(2.0), 1e-9);
}

TEST(Perimeter, UnitShapes) {
  const Weight one = Weight::constant(1.0);
  EXPECT_NEAR(weighted_perimeter(ShapeSet::interval(0, 1), one, BoxDomain::interval(-2, 2)).value, 2.0, 1e-12);
  EXPECT_NEAR(weighted_perimeter(ShapeSet::box(2, {0, 0, 0}, {1, 1, 0}), one, BoxDomain::cube(2, -2, 2)).value, 4.0,
              1e-9);
  EXPECT_NEAR(weighted_perimeter(ShapeSet::disk(Point{}, 1.0), one, BoxDomain::cube(2, -2, 2)).value,
              2 * std::numbers::pi, 1e-6);
  EXPECT_NEAR(weighted_perimeter(ShapeSet::ball(Point{}, 1.0), one, BoxDomain::cube(3, -2, 2)).value,
              4 * std::numbers::pi, 1e-4);
  EXPECT_EQ(weighted_perimeter(ShapeSet::empty(2), one, BoxDomain::cube(2, -2, 2)).value, 0.0);
}

TEST(Perimeter, OnlyBoundaryInsideTheDomainCounts) {
  // Faces on the domain boundary are not part of the relative perimeter.
  const Weight one = Weight::constant(1.0);
  EXPECT_NEAR(weighted_perimeter(ShapeSet::interval(-2, 1), one, BoxDomain::interval(-2, 2)).value, 1.0, 1e-12);
}

TEST(Perimeter, SingularWeightOnBoundaryIsInfinite) {
  EXPECT_EQ(weighted_perimeter(ShapeSet::interval(0, 1), Weight::power(-0.5), BoxDomain::interval(-2, 2)).value,
            kInf);
}

TEST(Perimeter, WeightedDiskUnderRadialWeight) {
  // w = 1 + r^2 is 2 on the unit circle.
  const Weight w = Weight::expression(Expr("1 + x^2 + y^2"));
  EXPECT_NEAR(weighted_perimeter(ShapeSet::disk(Point{}, 1.0), w, BoxDomain::cube(2, -2, 2)).value,
              4 * std::numbers::pi, 1e-6);
}

TEST(Perimeter, ImplicitDiskAgreesWithParametric) {
  const Weight w = Weight::expression(Expr("2 + x"));
  const ShapeSet implicit =
      ShapeSet::implicit(2, [](const Point& p) { return p[0] * p[0] + p[1] * p[1] - 1.0; }, "unit circle");
  const BoxDomain box = BoxDomain::cube(2, -2, 2);
  const double exact = weighted_perimeter(ShapeSet::disk(Point{}, 1.0), w, box).value;
  EXPECT_NEAR(exact, 4 * std::numbers::pi, 1e-6);
  EXPECT_NEAR(weighted_perimeter(implicit, w, box).value, exact, 1e-4 * exact);
}

TEST(Perimeter, GridMaskMatchesBoxPerimeter) {
  const Grid g = make_grid(BoxDomain::cube(2, -2, 2), 64);
  const GridFunction mask = indicator(ShapeSet::box(2, {-1, -1, 0}, {1, 0.5, 0}), g);
  EXPECT_NEAR(cell_set_perimeter(mask, Weight::constant(1.0)).value, 7.0, 1e-12);
}

// Property: every test field gives a lower bound, and the optimal one is tight.
TEST(Duality, RandomFieldsBoundFromBelow) {
  const Grid g = make_grid(BoxDomain::cube(2, -1, 1), 32);
  const GridFunction f = sample([](const Point& p) { return std::cos(3 * p[0]) + (p[1] > 0.2 ? 1.0 : 0.0); }, g);
  const GridFunction w = sample(Weight::expression(Expr("1 + x^2")), g);
  const double tv = weighted_tv(f, w).value;
  for (std::uint64_t seed = 0; seed < 50; ++seed)
    ASSERT_LE(dual_lower_bound(f, w, TestField::random(w, seed)), tv * (1 + 1e-12)) << "seed " << seed;
  EXPECT_NEAR(dual_lower_bound(f, w, TestField::optimal(f, w)), tv, 1e-9 * tv);
  EXPECT_EQ(dual_lower_bound(f, w, TestField::zero(g)), 0.0);
}

TEST(Duality, RandomFieldRespectsTheWeight) {
  const Grid g = make_grid(BoxDomain::interval(-1, 1), 64);
  const GridFunction w = sample(Weight::step(0.0, 1.0, 2.0), g);
  const TestField phi = TestField::random(w, 3);
  EXPECT_LE(phi.certificate(w), 1.0 + 1e-12);
}

TEST(LowerSemicontinuity, ShrinkingRampsRespectTheLimit) {
  const Grid g = make_grid(BoxDomain::interval(-2, 2), 1024);
  const Weight w = Weight::step(0.0, 1.0, 2.0);
  const GridFunction limit = indicator(ShapeSet::interval(0, 1), g);
  std::vector<GridFunction> seq;
  for (int k : {4, 8, 16, 32, 64})
    seq.push_back(sample(
        [k](const Point& p) {
          const double x = p[0];
          if (x <= -1.0 / k || x >= 1.0) return 0.0;
          return x >= 0.0 ? 1.0 : 1.0 + k * x;
        },
        g));
  const LscReport r = lsc_probe(seq, limit, w);
  EXPECT_FALSE(r.violation);
  EXPECT_GE(r.gap, -1e-9);
  EXPECT_NEAR(r.tv_limit, 3.0, 1e-12);
  EXPECT_THROW(lsc_probe({limit}, limit, w), std::invalid_argument);
}
