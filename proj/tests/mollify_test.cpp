#include <cmath>

#include <gtest/gtest.h>

#include "wbv/mollify.hpp"

using namespace wbv;

TEST(Cover, PartitionOfUnityOnTheCoveredSet) {
  const CoverPartition cover = build_cover(BoxDomain::cube(2, -1, 1), 4);
  int seen = 0;
  for (double x : {-0.9, -0.3, 0.0, 0.45, 0.8})
    for (double y : {-0.7, 0.1, 0.6}) {
      const Point p{x, y, 0.0};
      if (!cover.covers(p)) continue;
      ++seen;
      const std::vector<double> z = cover.partition(p);
      double sum = 0.0;
      for (double v : z) {
        EXPECT_GE(v, 0.0);
        sum += v;
      }
      EXPECT_NEAR(sum, 1.0, 1e-12) << x << "," << y;
      EXPECT_LE(cover.membership(p), cover.overlap_bound());
    }
  EXPECT_GE(seen, 10);
  EXPECT_THROW(build_cover(BoxDomain::interval(0, 1), 0), std::invalid_argument);
}

TEST(Cover, GradientsOfThePartitionSumToZero) {
  const CoverPartition cover = build_cover(BoxDomain::interval(-1, 1), 3);
  for (double x : {-0.6, -0.2, 0.3, 0.7}) {
    const Point p{x, 0, 0};
    ASSERT_TRUE(cover.covers(p));
    double g = 0.0;
    for (int k = 1; k <= cover.depth(); ++k) g += cover.gradient(k, p)[0];
    EXPECT_NEAR(g, 0.0, 1e-9) << "x = " << x;
  }
}

// eta * w <= [w] w pointwise for A1 weights.
TEST(MollifierBound, HoldsForA1Weights) {
  const Grid g = make_grid(BoxDomain::interval(-1, 1), 256);
  for (const Weight& w : {Weight::constant(2.0), Weight::step(0.0, 1.0, 2.0), Weight::expression(Expr("abs(x)+1"))}) {
    const MollifierBoundReport r = mollifier_weight_bound(w, 0.1, g);
    EXPECT_LE(r.max_ratio, 1.0 + 1e-9) << w.description();
  }
}

TEST(MollifierBound, ConstantWeightIsReproduced) {
  const Grid g = make_grid(BoxDomain::interval(-1, 1), 64);
  const Mollifier eta(0.2, 1);
  EXPECT_NEAR(mollified_weight_at(Weight::constant(3.0), eta, Point{0.1, 0, 0}), 3.0, 1e-9);
}

TEST(SmoothApproximation, L1ErrorStaysBelowEps) {
  const Grid g = make_grid(BoxDomain::interval(-2, 2), 2048);
  const GridFunction f = indicator(ShapeSet::interval(-0.5, 1.0), g);
  const Weight w = Weight::expression(Expr("x^2+2"));
  for (double eps : {0.2, 0.1}) {
    const SmoothApproximation s = smooth_approximate(f, w, eps, 2);
    EXPECT_LT(s.l1_error, eps);
    for (const PieceResidual& p : s.schedule.pieces)
      if (!p.empty) EXPECT_TRUE(p.satisfied()) << "piece " << p.k;
  }
}

// Under a continuous weight the smoothed variation tends to the weighted one.
TEST(SmoothApproximation, ContinuousWeightRatioTendsToOne) {
  const Grid g = make_grid(BoxDomain::interval(-2, 2), 4096);
  const GridFunction f = indicator(ShapeSet::interval(-0.5, 1.0), g);
  const std::vector<SmoothingStep> t = smoothing_trace(f, Weight::expression(Expr("x^2+2")), {0.1, 0.05}, 2);
  ASSERT_EQ(t.size(), 2u);
  EXPECT_NEAR(t.back().ratio, 1.0, 1e-2);
}

// At the jump of a step weight the smoothed variation stays above the weighted one.
TEST(SmoothApproximation, StepWeightRatioStaysAboveOne) {
  const Grid g = make_grid(BoxDomain::interval(-2, 2), 4096);
  const GridFunction f = indicator(ShapeSet::interval(0.0, 1.0), g);
  const std::vector<SmoothingStep> t = smoothing_trace(f, Weight::step(0.0, 1.0, 2.0), {0.1, 0.05}, 2);
  EXPECT_GT(t.back().ratio, 1.05);
}

TEST(SmoothApproximation, CoarseGridRaisesResolutionError) {
  const Grid g = make_grid(BoxDomain::interval(-2, 2), 64);
  const GridFunction f = indicator(ShapeSet::interval(0.0, 1.0), g);
  EXPECT_THROW(smooth_approximate(f, Weight::power(-0.5), 0.0125, 2), ResolutionError);
}

TEST(Approximability, GridProbeMatchesOneDimensionalVerdicts) {
  const Grid g = make_grid(BoxDomain::interval(-2, 2), 512);
  const GridFunction f = indicator(ShapeSet::interval(0.0, 1.0), g);
  EXPECT_EQ(approximability_probe(f, Weight::step(0.0, 1.0, 2.0)).verdict, Verdict::not_approximable);
  EXPECT_EQ(approximability_probe(f, Weight::expression(Expr("x^2+2"))).verdict, Verdict::approximable);
}
