#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "wbv/weights.hpp"

using namespace wbv;

namespace {

Grid line(double lo, double hi, int n) { return make_grid(BoxDomain::interval(lo, hi), n); }

}  // namespace

TEST(Weight, ConstructorsEvaluate) {
  EXPECT_DOUBLE_EQ(Weight::constant(2.5)(0.3), 2.5);
  EXPECT_DOUBLE_EQ(Weight::power(-0.5)(4.0), 0.5);
  EXPECT_EQ(Weight::power(-0.5)(0.0), kInf);
  const Weight s = Weight::step(0.0, 1.0, 2.0);
  EXPECT_DOUBLE_EQ(s(-1e-9), 1.0);
  EXPECT_DOUBLE_EQ(s(0.5), 2.0);
  EXPECT_DOUBLE_EQ(Weight::product(s, Weight::constant(3.0))(1.0), 6.0);
  EXPECT_DOUBLE_EQ(Weight::delta_power(s, 0.5)(1.0), std::sqrt(2.0));
  EXPECT_THROW(Weight::constant(-1.0), std::invalid_argument);
}

TEST(Weight, RecordsKnownConstants) {
  EXPECT_EQ(Weight::constant(4.0).known_a1(1), 1.0);
  // 1-D |x|^{-1/2} over all intervals: 1 + sqrt 2.
  ASSERT_TRUE(Weight::power(-0.5).known_a1(1).has_value());
  EXPECT_NEAR(*Weight::power(-0.5).known_a1(1), 1.0 + std::sqrt(2.0), 1e-9);
  EXPECT_THROW(Weight::constant(1.0).with_known_a1(1, 0.5), std::invalid_argument);
}

TEST(A1, ConstantWeightHasConstantOne) {
  EXPECT_NEAR(estimate_a1_constant(Weight::constant(3.0), line(-1, 1, 256), BallFamily::all_intervals()), 1.0,
              1e-12);
  const Grid g2 = make_grid(BoxDomain::cube(2, -1, 1), 16);
  EXPECT_NEAR(estimate_a1_constant(Weight::constant(3.0), g2, BallFamily::dyadic()), 1.0, 1e-12);
}

TEST(A1, StepWeightApproachesTwo) {
  // The mean of the step over (-t, t) is 1.5; the worst ratio is 2 from intervals
  // reaching far right of the jump.
  const double a = estimate_a1_constant(Weight::step(0.0, 1.0, 2.0), line(-1, 1, 2048), BallFamily::all_intervals());
  EXPECT_NEAR(a, 2.0, 2e-2);
  EXPECT_LE(a, 2.0 + 1e-12);
}

TEST(A1, PowerWeightConvergesTowardOnePlusRootTwo) {
  const double exact = 1.0 + std::sqrt(2.0);
  const double coarse = estimate_a1_constant(Weight::power(-0.5), line(-1, 1, 512), BallFamily::all_intervals());
  const double fine = estimate_a1_constant(Weight::power(-0.5), line(-1, 1, 2048), BallFamily::all_intervals());
  EXPECT_GT(fine, coarse);
  EXPECT_LT(fine, exact);
  EXPECT_GT(fine, 2.2);
}

TEST(MaximalFunction, ConstantIsFixedAndDominatesPointwise) {
  const Grid g = line(-1, 1, 128);
  const GridFunction m = maximal_function(Weight::constant(2.0), g, BallFamily::all_intervals());
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(m[i], 2.0, 1e-12);

  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> v(g.size());
    for (double& x : v) x = u(rng);
    const GridFunction w(g, v);
    const GridFunction mw = maximal_function(w, BallFamily::all_intervals());
    for (std::size_t i = 0; i < g.size(); ++i) ASSERT_GE(mw[i], w[i] * (1 - 1e-12));
  }
}

// Property: Mw <= [w] w at every cell, with [w] the lattice estimate.
TEST(MaximalFunction, PointwiseA1HoldsWithEstimatedConstant) {
  const Grid g = line(-1, 1, 512);
  for (const Weight& w : {Weight::step(0.0, 1.0, 2.0), Weight::expression(Expr("abs(x)+1")),
                          Weight::expression(Expr("x^2+2")), Weight::power(-0.5)}) {
    const PointwiseA1Report r = check_pointwise_a1(w, g, BallFamily::all_intervals());
    EXPECT_LE(r.max_ratio, 1.0 + 1e-12) << w.description();
  }
}

// Uncentred intervals are unions of whole cells; the atom sits on the face at 0,
// so the shortest interval holding both reaches |x| + h/2.
TEST(MaximalFunction, DiracMeasureDecaysLikeInverseDistance) {
  const Grid g = line(-1, 1, 64);
  const double h = g.spacing(0);
  const GridFunction m = maximal_function(Measure::dirac(1), g, BallFamily::all_intervals());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = std::fabs(g.center(i)[0]);
    EXPECT_NEAR(m[i], 1.0 / (x + h / 2), 1e-12) << "x = " << x;
  }
}

// Property: [w^delta] <= [w]^delta for delta in (0, 1).
TEST(DeltaWeights, ConstantObeysPowerBound) {
  const Grid g = line(-1, 1, 512);
  for (const Weight& w : {Weight::step(0.0, 1.0, 2.0), Weight::expression(Expr("x+2")), Weight::power(-0.5)}) {
    const double a = estimate_a1_constant(w, g, BallFamily::all_intervals());
    for (double delta : {0.25, 0.5, 0.75}) {
      const double ad = estimate_a1_constant(delta_weight(w, delta), g, BallFamily::all_intervals());
      EXPECT_LE(ad, std::pow(a, delta) + 1e-3) << w.description() << " delta " << delta;
    }
  }
}

TEST(Classification, LebesgueHasKOne) {
  const BoxDomain box = BoxDomain::interval(-1, 1);
  const MFReport r = classify_mf(Measure::lebesgue(1), default_probes(box), default_schedule(box, 1e-3));
  EXPECT_TRUE(r.agree);
  EXPECT_TRUE(r.member);
  EXPECT_NEAR(r.K, 1.0, 1e-3);
}

TEST(Classification, DiracHasKZero) {
  const BoxDomain box = BoxDomain::interval(-1, 1);
  const MFReport r = classify_mf(Measure::dirac(1), default_probes(box), default_schedule(box, 1e-3));
  EXPECT_TRUE(r.agree);
  EXPECT_TRUE(r.member);
  EXPECT_EQ(r.K, 0.0);
}

TEST(Classification, GeometricTrainIsNotAMember) {
  const BoxDomain box = BoxDomain::interval(-1, 1);
  const MFReport r = classify_mf(Measure::geometric_atoms(1), default_probes(box), default_schedule(box, 1e-3));
  EXPECT_TRUE(r.agree);
  EXPECT_FALSE(r.member);
}

TEST(Classification, RejectsShortInputs) {
  const BoxDomain box = BoxDomain::interval(-1, 1);
  EXPECT_THROW(classify_mf(Measure::lebesgue(1), {Point{}}, default_schedule(box, 1e-3)), std::invalid_argument);
  EXPECT_THROW(classify_mf(Measure::lebesgue(1), default_probes(box), {1.0, 2.0}), std::invalid_argument);
}

// (M mu)^delta is an A1 weight for 0 <= delta < 1 when M mu is finite.
TEST(CoifmanRochberg, DiracPowerIsA1) {
  const Grid g = line(-1, 1, 512);
  const Weight w = coifman_rochberg(Measure::dirac(1), 0.5, g, BallFamily::all_intervals());
  const double a = estimate_a1_constant(w, g, BallFamily::all_intervals());
  EXPECT_TRUE(std::isfinite(a));
  EXPECT_GE(a, 1.0);
  EXPECT_THROW(coifman_rochberg(Measure::dirac(1), 1.0, g, BallFamily::all_intervals()), std::invalid_argument);
}
