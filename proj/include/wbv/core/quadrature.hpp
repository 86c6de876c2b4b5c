#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "wbv/core/errors.hpp"
#include "wbv/core/extended.hpp"
#include "wbv/core/geometry.hpp"

namespace wbv {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
};

namespace quad_detail {

inline bool accurate(double value, double error, double rel_tol, double abs_tol) {
  return std::isfinite(value) && error <= std::max(rel_tol * std::fabs(value), abs_tol) + 1e-300;
}

/// One Gauss-Kronrod 31 panel; the error is |K - G| scaled to [a, b].
inline QuadratureResult gk_panel(const std::function<double(double)>& f, double a, double b) {
  double err = 0.0;
  const double v =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0, &err);
  return {v, err * 0.5 * (b - a), true};
}

/// Globally adaptive Gauss-Kronrod: bisect the panel with the largest error
/// until the summed error meets the tolerance or the panel budget runs out.
inline QuadratureResult adaptive_gk(const std::function<double(double)>& f, double a, double b,
                                    double rel_tol, double abs_tol, int max_panels = 2000) {
  struct Panel {
    double a, b, v, e;
  };
  auto worse = [](const Panel& x, const Panel& y) { return x.e < y.e; };
  std::vector<Panel> heap;
  const QuadratureResult first = gk_panel(f, a, b);
  heap.push_back({a, b, first.value, first.error});
  double value = first.value, error = first.error;
  while (!accurate(value, error, rel_tol, abs_tol) && static_cast<int>(heap.size()) < max_panels) {
    if (!std::isfinite(value)) break;
    std::pop_heap(heap.begin(), heap.end(), worse);
    const Panel p = heap.back();
    heap.pop_back();
    const double m = 0.5 * (p.a + p.b);
    if (!(m > p.a && m < p.b)) {
      heap.push_back(p);
      std::push_heap(heap.begin(), heap.end(), worse);
      break;
    }
    const QuadratureResult l = gk_panel(f, p.a, m), r = gk_panel(f, m, p.b);
    heap.push_back({p.a, m, l.value, l.error});
    std::push_heap(heap.begin(), heap.end(), worse);
    heap.push_back({m, p.b, r.value, r.error});
    std::push_heap(heap.begin(), heap.end(), worse);
    // Re-sum in a fixed order so the result does not depend on update history.
    std::vector<Panel> sorted = heap;
    std::sort(sorted.begin(), sorted.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
    value = 0.0;
    error = 0.0;
    for (const Panel& q : sorted) {
      value += q.v;
      error += q.e;
    }
  }
  return {value, error, accurate(value, error, rel_tol, abs_tol)};
}

inline QuadratureResult integrate_piece(const std::function<double(double)>& f, double a,
                                        double b, double rel_tol, double abs_tol) {
  if (!(b > a)) return {};
  const QuadratureResult g = adaptive_gk(f, a, b, rel_tol, abs_tol);
  if (is_inf(g.value)) return {kInf, 0.0, true};
  if (g.converged) return g;
  // Endpoint singularities (|x|^alpha at a breakpoint) converge far better
  // under the double-exponential substitution. It needs abscissae that are
  // distinguishable from the endpoints.
  if (b - a < 1e-9 * std::max({1.0, std::fabs(a), std::fabs(b)})) return g;
  try {
    boost::math::quadrature::tanh_sinh<double> ts(12);
    double err = 0.0, l1 = 0.0;
    const double v2 = ts.integrate(f, a, b, rel_tol, &err, &l1);
    if (accurate(v2, err, rel_tol, abs_tol)) return {v2, err, true};
    return g.error <= err ? g : QuadratureResult{v2, err, false};
  } catch (const std::exception&) {
    return g;
  }
}

}  // namespace quad_detail

/// Adaptive integral of f over [a, b]. The interval is split at every
/// breakpoint strictly inside it so singularities and jumps sit on panel ends.
/// A panel is accepted once its error is below max(rel_tol |value|, abs_tol).
inline QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                                  double rel_tol = 1e-8, std::span<const double> breaks = {},
                                  double abs_tol = 0.0) {
  if (b < a) {
    QuadratureResult r = integrate(f, b, a, rel_tol, breaks, abs_tol);
    r.value = -r.value;
    return r;
  }
  std::vector<double> cuts{a};
  for (double x : breaks)
    if (x > a && x < b) cuts.push_back(x);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  QuadratureResult total;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const QuadratureResult r = quad_detail::integrate_piece(f, cuts[i], cuts[i + 1], rel_tol, abs_tol);
    total.value += r.value;
    total.error += r.error;
    total.converged = total.converged && r.converged;
  }
  return total;
}

/// Same as integrate() but raises NumericError naming `what` on failure.
inline double integrate_or_throw(const std::function<double(double)>& f, double a, double b,
                                 const std::string& what, double rel_tol = 1e-8,
                                 std::span<const double> breaks = {}) {
  const QuadratureResult r = integrate(f, a, b, rel_tol, breaks);
  if (!r.converged)
    throw NumericError("quadrature did not converge on " + what + " over [" + std::to_string(a) +
                       ", " + std::to_string(b) + "] (estimate " + std::to_string(r.value) +
                       ", error " + std::to_string(r.error) + ")");
  return r.value;
}

/// Gauss-Legendre rule with N nodes on [-1, 1].
template <int N>
struct GaussLegendre {
  std::array<double, N> nodes{};
  std::array<double, N> weights{};

  GaussLegendre() {
    using G = boost::math::quadrature::gauss<double, N>;
    const auto& x = G::abscissa();
    const auto& w = G::weights();
    int k = 0;
    // boost stores the non-negative half; node 0 is the centre when N is odd.
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] == 0.0) {
        nodes[k] = 0.0;
        weights[k++] = w[i];
      } else {
        nodes[k] = x[i];
        weights[k++] = w[i];
        nodes[k] = -x[i];
        weights[k++] = w[i];
      }
    }
  }

  static const GaussLegendre& rule() {
    static const GaussLegendre r;
    return r;
  }
};

/// Integral of f over the ball B(center, radius) in R^dim by a polar product
/// rule (Gauss-Legendre radially, trapezoid in angle).
inline double ball_integral(const std::function<double(const Point&)>& f, const Point& center,
                            double radius, int dim, int radial_panels = 4) {
  const auto& gl = GaussLegendre<16>::rule();
  auto radial = [&](auto&& shell) {
    double total = 0.0;
    for (int p = 0; p < radial_panels; ++p) {
      const double r0 = radius * p / radial_panels;
      const double r1 = radius * (p + 1) / radial_panels;
      const double mid = 0.5 * (r0 + r1), half = 0.5 * (r1 - r0);
      for (int i = 0; i < 16; ++i) total += gl.weights[i] * half * shell(mid + half * gl.nodes[i]);
    }
    return total;
  };
  switch (dim) {
    case 1:
      return radial([&](double r) {
        Point a = center, b = center;
        a[0] += r;
        b[0] -= r;
        return measure_product(1.0, f(a)) + measure_product(1.0, f(b));
      });
    case 2: {
      const int m = 64;
      return radial([&](double r) {
        double s = 0.0;
        for (int k = 0; k < m; ++k) {
          const double t = 2.0 * std::numbers::pi * (k + 0.5) / m;
          Point p = center;
          p[0] += r * std::cos(t);
          p[1] += r * std::sin(t);
          s += f(p);
        }
        return s * (2.0 * std::numbers::pi / m) * r;
      });
    }
    case 3: {
      const int m = 32;
      return radial([&](double r) {
        double s = 0.0;
        for (int i = 0; i < 16; ++i) {
          const double ct = gl.nodes[i], st = std::sqrt(1.0 - ct * ct);
          for (int k = 0; k < m; ++k) {
            const double ph = 2.0 * std::numbers::pi * (k + 0.5) / m;
            Point p = center;
            p[0] += r * st * std::cos(ph);
            p[1] += r * st * std::sin(ph);
            p[2] += r * ct;
            s += gl.weights[i] * f(p);
          }
        }
        return s * (2.0 * std::numbers::pi / m) * r * r;
      });
    }
    default: throw std::invalid_argument("dimension must be 1, 2 or 3");
  }
}

}  // namespace wbv
