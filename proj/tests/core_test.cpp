#include <cmath>
#include <cstdlib>
#include <numbers>

#include <gtest/gtest.h>

#include "wbv/core/errors.hpp"
#include "wbv/core/expr.hpp"
#include "wbv/core/extended.hpp"
#include "wbv/core/geometry.hpp"
#include "wbv/core/grid_function.hpp"
#include "wbv/core/measure.hpp"
#include "wbv/core/mollifier.hpp"
#include "wbv/core/parallel.hpp"
#include "wbv/core/quadrature.hpp"
#include "wbv/core/shape.hpp"

using namespace wbv;

TEST(Expr, EvaluatesArithmeticAndFunctions) {
  EXPECT_DOUBLE_EQ(Expr("1 + 2*3 - 4/2")(0.0), 5.0);
  EXPECT_DOUBLE_EQ(Expr("2^3^2")(0.0), 512.0);  // right associative
  EXPECT_DOUBLE_EQ(Expr("-x^2")(3.0), -9.0);
  EXPECT_DOUBLE_EQ(Expr("abs(x) + max(x, 1)")(-2.0), 3.0);
  EXPECT_DOUBLE_EQ(Expr("if(x < 0, 1, 2)")(-0.5), 1.0);
  EXPECT_DOUBLE_EQ(Expr("if(x < 0, 1, 2)")(0.0), 2.0);
  EXPECT_NEAR(Expr("exp(log(x))")(2.5), 2.5, 1e-15);
  EXPECT_DOUBLE_EQ(Expr("x + y + z")(Point{1.0, 2.0, 4.0}), 7.0);
}

TEST(Expr, SymbolicDerivativeMatchesClosedForm) {
  const Expr e("sin(x)*x^2");
  for (double x : {-1.3, 0.2, 2.0})
    EXPECT_NEAR(e.derivative(x), std::cos(x) * x * x + 2 * x * std::sin(x), 1e-12);
  EXPECT_NEAR(Expr("x*y")(Point{2.0, 3.0, 0.0}), 6.0, 0.0);
  EXPECT_NEAR(Expr("x*y").derivative(Point{2.0, 3.0, 0.0}, 1, 2), 2.0, 1e-15);
}

TEST(Expr, RejectsMalformedInput) {
  EXPECT_THROW(Expr("1 +"), std::invalid_argument);
  EXPECT_THROW(Expr("foo(x)"), std::invalid_argument);
  EXPECT_THROW(Expr("(x"), std::invalid_argument);
}

TEST(Extended, ZeroTimesInfinityIsZero) {
  EXPECT_EQ(measure_product(0.0, kInf), 0.0);
  EXPECT_EQ(measure_product(2.0, kInf), kInf);
  EXPECT_TRUE(is_inf(kInf));
  EXPECT_FALSE(is_inf(-kInf));
}

TEST(Geometry, BallVolumes) {
  EXPECT_DOUBLE_EQ(ball_volume(1, 1.5), 3.0);
  EXPECT_NEAR(ball_volume(2, 2.0), 4.0 * std::numbers::pi, 1e-14);
  EXPECT_NEAR(ball_volume(3, 1.0), 4.0 / 3.0 * std::numbers::pi, 1e-14);
}

TEST(Geometry, BoxDomainQueries) {
  const BoxDomain b({-1.0, 0.0}, {1.0, 4.0});
  EXPECT_EQ(b.dim(), 2);
  EXPECT_DOUBLE_EQ(b.volume(), 8.0);
  EXPECT_DOUBLE_EQ(b.inradius(), 1.0);
  EXPECT_NEAR(b.diameter(), std::sqrt(20.0), 1e-15);
  EXPECT_TRUE(b.contains(Point{0.0, 1.0, 0.0}));
  EXPECT_FALSE(b.contains(Point{1.0, 1.0, 0.0}));
  EXPECT_TRUE(b.contains_closed(Point{1.0, 1.0, 0.0}));
  EXPECT_DOUBLE_EQ(b.distance_to_boundary(Point{0.5, 3.0, 0.0}), 0.5);
  EXPECT_THROW(BoxDomain({1.0}, {0.0}), std::invalid_argument);
}

TEST(Geometry, GridIndexingRoundTrips) {
  const Grid g = make_grid(BoxDomain({0.0, 0.0, 0.0}, {1.0, 2.0, 3.0}), {4, 5, 6});
  ASSERT_EQ(g.size(), 120u);
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_EQ(g.linear(g.index(i)), i);
    EXPECT_EQ(g.locate(g.center(i)), i);
  }
  EXPECT_DOUBLE_EQ(g.cell_volume(), 0.25 * 0.4 * 0.5);
  EXPECT_FALSE(g.locate(Point{2.0, 0.0, 0.0}).has_value());
  EXPECT_THROW(make_grid(BoxDomain::interval(0, 1), 1), std::invalid_argument);
}

TEST(GridFunction, SampleAndArithmetic) {
  const Grid g = make_grid(BoxDomain::interval(0.0, 1.0), 4);
  const GridFunction f = sample([](const Point& p) { return p[0]; }, g);
  EXPECT_DOUBLE_EQ(f[0], 0.125);
  EXPECT_DOUBLE_EQ(f.plus(f.scaled(-1.0))[3], 0.0);
  EXPECT_THROW(GridFunction(g, std::vector<double>(3, 0.0)), std::invalid_argument);
}

TEST(Measure, MassesOfBalls) {
  const Measure leb = Measure::lebesgue(2);
  EXPECT_NEAR(leb.mass(Ball{{0, 0, 0}, 1.0}), std::numbers::pi, 1e-12);
  const Measure d = Measure::dirac(1);
  EXPECT_DOUBLE_EQ(d.mass(Ball{{0.0, 0, 0}, 0.1}), 1.0);
  EXPECT_DOUBLE_EQ(d.mass(Ball{{0.5, 0, 0}, 0.1}), 0.0);
  EXPECT_DOUBLE_EQ(d.mass(Ball{{0.1, 0, 0}, 0.1}), 1.0);  // closed ball
  const Measure a = Measure::atoms(1, {{{0.0, 0, 0}, 2.0}, {{1.0, 0, 0}, 3.0}});
  EXPECT_DOUBLE_EQ(a.interval_mass(-1.0, 2.0), 5.0);
  const Measure geo = Measure::geometric_atoms(1, 2.0);
  EXPECT_DOUBLE_EQ(geo.mass(Ball{{1.0, 0, 0}, 1.0}), 1.0 + 2.0 + 4.0);
}

TEST(Mollifier, HasUnitMassAndCompactSupport) {
  for (int dim = 1; dim <= 3; ++dim) {
    const Mollifier eta(0.3, dim);
    const double mass = ball_integral([&](const Point& x) { return eta(x); }, Point{}, 0.3, dim, 8);
    EXPECT_NEAR(mass, 1.0, 1e-6) << "dim " << dim;
    EXPECT_EQ(eta.radial(0.3), 0.0);
    EXPECT_EQ(eta.radial(0.5), 0.0);
    EXPECT_GT(eta.radial(0.0), 0.0);
  }
}

TEST(Quadrature, HandlesEndpointSingularity) {
  // The integral of |x|^{-1/2} over [-1, 1] is 4.
  const double breaks[] = {0.0};
  const QuadratureResult r = integrate([](double x) { return 1.0 / std::sqrt(std::fabs(x)); }, -1.0, 1.0, 1e-9,
                                       breaks);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 4.0, 1e-7);
  EXPECT_NEAR(integrate([](double x) { return x * x; }, 1.0, 0.0).value, -1.0 / 3.0, 1e-14);
}

TEST(Shape, MembershipAndScaling) {
  const ShapeSet d = ShapeSet::disk(Point{}, 1.0);
  EXPECT_TRUE(d.contains(Point{0.5, 0.5, 0}));
  EXPECT_FALSE(d.contains(Point{0.8, 0.8, 0}));
  const ShapeSet s = d.scaled(2.0);
  EXPECT_TRUE(s.contains(Point{0.8, 0.8, 0}));
  const ShapeSet i = ShapeSet::intervals({{0, 1}, {2, 3}});
  EXPECT_TRUE(i.contains(Point{2.5, 0, 0}));
  EXPECT_FALSE(i.contains(Point{1.5, 0, 0}));
  EXPECT_TRUE(ShapeSet::empty(2).is_empty());
}

TEST(Errors, HierarchyDerivesFromRuntimeError) {
  EXPECT_THROW(throw NumericError("x"), Error);
  EXPECT_THROW(throw ResolutionError("x"), std::runtime_error);
}

TEST(Parallel, ThreadCountHonoursEnvironment) {
  ::setenv("WBV_THREADS", "3", 1);
  EXPECT_EQ(thread_count(), 3u);
  ::setenv("WBV_THREADS", "0", 1);
  EXPECT_GE(thread_count(), 1u);
  ::unsetenv("WBV_THREADS");
  std::vector<double> v(1000, 0.1);
  EXPECT_NEAR(pairwise_sum(v), 100.0, 1e-12);
}

// parallel_for must touch every index once whatever the worker count.
TEST(Parallel, ForVisitsEachIndexOnce) {
  for (const char* t : {"1", "4"}) {
    ::setenv("WBV_THREADS", t, 1);
    std::vector<int> hits(997, 0);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
    for (int h : hits) ASSERT_EQ(h, 1);
  }
  ::unsetenv("WBV_THREADS");
}
