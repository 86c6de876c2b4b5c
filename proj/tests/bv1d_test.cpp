#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "wbv/bv1d.hpp"

using namespace wbv;

namespace {

const Weight kStep = Weight::step(0.0, 1.0, 2.0);

}  // namespace

// Published anchor: chi_(0,1) under the step weight has variation 3, and every
// mollified sequence keeps it.
TEST(Bv1d, StepRemarkVariationIsThree) {
  const PiecewiseFunction1D f = PiecewiseFunction1D::indicator(0.0, 1.0);
  EXPECT_DOUBLE_EQ(variation_1d(f, kStep, -2.0, 2.0), 3.0);
  for (int k : {4, 16, 256})
    EXPECT_NEAR(mollified_indicator_tv(-1.0 / k, 1.0, kStep, 1.0 / k), 3.0, 1e-9) << "k = " << k;
  EXPECT_THROW(mollified_indicator_tv(-1.0, 1.0, kStep, 1.0), std::invalid_argument);
}

TEST(Bv1d, ContinuousWeightSumsJumpValues) {
  // w = x^2 + 2 is 2 at 0 and 3 at 1.
  const Weight w = Weight::expression(Expr("x^2+2"));
  EXPECT_NEAR(variation_1d(PiecewiseFunction1D::indicator(0.0, 1.0), w, -2.0, 2.0), 5.0, 1e-12);
}

TEST(Bv1d, AbsolutelyContinuousPartIsIntegrated) {
  // Interpolant of a tent: slope 1 up and down, total variation 2 under w = 1.
  const PiecewiseFunction1D tent = PiecewiseFunction1D::interpolant({-1.0, 0.0, 1.0}, {0.0, 1.0, 0.0});
  EXPECT_NEAR(variation_1d(tent, Weight::constant(1.0), -2.0, 2.0), 2.0, 1e-10);
  // Under |x| + 1: 2 * integral over (0, 1) of (x + 1) = 3.
  EXPECT_NEAR(variation_1d(tent, Weight::expression(Expr("abs(x)+1")), -2.0, 2.0), 3.0, 1e-8);
}

TEST(Bv1d, JumpOnSingularityIsInfinite) {
  EXPECT_EQ(variation_1d(PiecewiseFunction1D::indicator(0.0, 1.0), Weight::power(-0.5), -1.0, 2.0), kInf);
}

// Property: V(c f + d) = |c| V(f).
TEST(Bv1d, VariationIsAbsolutelyHomogeneous) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  const Weight w = Weight::expression(Expr("1 + x^2"));
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<double> xs{-1.5, -0.4, 0.3, 1.1}, ys;
    for (std::size_t i = 0; i < xs.size(); ++i) ys.push_back(u(rng));
    const double c = u(rng), d = u(rng);
    std::vector<double> scaled;
    for (double y : ys) scaled.push_back(c * y + d);
    const double v = variation_1d(PiecewiseFunction1D::interpolant(xs, ys), w, -2, 2);
    const double vs = variation_1d(PiecewiseFunction1D::interpolant(xs, scaled), w, -2, 2);
    ASSERT_NEAR(vs, std::fabs(c) * v, 1e-8 * std::max(1.0, v));
  }
}

TEST(Bv1d, PerimeterOfIntervalUnions) {
  EXPECT_DOUBLE_EQ(perimeter_1d({{0.0, 1.0}}, kStep), 3.0);
  EXPECT_DOUBLE_EQ(perimeter_1d({{-2.0, -1.0}, {1.0, 3.0}}, kStep), 1.0 + 1.0 + 2.0 + 2.0);
  EXPECT_DOUBLE_EQ(perimeter_1d({}, kStep), 0.0);
}

TEST(Approximability, StepWeightJumpIsNotALebesguePoint) {
  const ApproximabilityReport r = approximability_probe_1d(PiecewiseFunction1D::indicator(0.0, 1.0), kStep);
  EXPECT_EQ(r.verdict, Verdict::not_approximable);
  ASSERT_EQ(r.atoms.size(), 2u);
  EXPECT_EQ(r.atoms[0].status, Verdict::not_approximable);
  EXPECT_NEAR(r.atoms[0].averages.back(), 0.5, 1e-9);
  EXPECT_EQ(r.atoms[1].status, Verdict::approximable);
}

TEST(Approximability, ContinuousWeightIsApproximable) {
  const ApproximabilityReport r =
      approximability_probe_1d(PiecewiseFunction1D::indicator(0.0, 1.0), Weight::expression(Expr("x^2+2")));
  EXPECT_EQ(r.verdict, Verdict::approximable);
}

TEST(PiecewiseFunction1D, ValidatesItsShape) {
  EXPECT_THROW(PiecewiseFunction1D({0.0, 0.0}, {Piece::constant(0), Piece::constant(1), Piece::constant(0)}),
               std::invalid_argument);
  EXPECT_THROW(PiecewiseFunction1D({0.0}, {Piece::constant(0), Piece::constant(1)}, {2.0}), std::invalid_argument);
  EXPECT_THROW(PiecewiseFunction1D::interpolant({0.0, 1.0}, {1.0}), std::invalid_argument);
}
