#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "wbv/core/errors.hpp"
#include "wbv/core/expr.hpp"
#include "wbv/core/extended.hpp"
#include "wbv/core/geometry.hpp"
#include "wbv/core/grid_function.hpp"

namespace wbv {

enum class WeightKind {
  constant,
  power,
  step,
  radial,
  product,
  coifman_rochberg,
  tabulated,
  expression,
  delta_power,
  scaled,
};

inline const char* to_string(WeightKind k) {
  switch (k) {
    case WeightKind::constant: return "constant";
    case WeightKind::power: return "power";
    case WeightKind::step: return "step";
    case WeightKind::radial: return "radial";
    case WeightKind::product: return "product";
    case WeightKind::coifman_rochberg: return "coifman_rochberg";
    case WeightKind::tabulated: return "tabulated";
    case WeightKind::expression: return "expression";
    case WeightKind::delta_power: return "delta_power";
    case WeightKind::scaled: return "scaled";
  }
  return "unknown";
}

namespace weight_detail {
inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}
}  // namespace weight_detail

/// A weight w : R^n -> (0, inf], with the metadata the numerical checks need:
/// lower-semicontinuity, a known A1 constant per dimension (when one is
/// available in closed form) and the axis coordinates where w is singular or
/// discontinuous, used to split quadrature panels.
class Weight {
 public:
  using Evaluator = std::function<double(const Point&)>;

  double operator()(const Point& x) const { return data_->eval(x); }
  double operator()(double x) const { return data_->eval(Point{x, 0.0, 0.0}); }

  WeightKind kind() const noexcept { return data_->kind; }
  const std::string& description() const noexcept { return data_->description; }
  bool lsc_asserted() const noexcept { return data_->lsc; }
  /// True when the weight is claimed to be everywhere-A1 (power: alpha <= 0).
  bool everywhere_a1_claim() const noexcept { return data_->everywhere_a1; }
  std::optional<double> known_a1(int dim) const {
    if (dim < 1 || dim > kMaxDim) return std::nullopt;
    return data_->a1[static_cast<std::size_t>(dim - 1)];
  }
  /// Coordinates along `axis` where w is singular or jumps.
  const std::vector<double>& breakpoints(int axis = 0) const {
    return data_->breaks.at(static_cast<std::size_t>(axis));
  }
  /// True when w is known to be unbounded on the closed box.
  bool unbounded_in(const BoxDomain& box) const {
    return data_->unbounded && data_->unbounded(box);
  }

  Weight with_known_a1(int dim, double constant) const {
    if (!(constant >= 1.0)) throw std::invalid_argument("an A1 constant is at least 1");
    auto d = std::make_shared<Data>(*data_);
    d->a1.at(static_cast<std::size_t>(dim - 1)) = constant;
    return Weight(std::move(d));
  }
  Weight with_breakpoints(int axis, std::vector<double> breaks) const {
    auto d = std::make_shared<Data>(*data_);
    d->breaks.at(static_cast<std::size_t>(axis)) = std::move(breaks);
    return Weight(std::move(d));
  }

  static Weight constant(double c) {
    if (!(c > 0.0)) throw std::invalid_argument("constant weight must be positive");
    auto d = std::make_shared<Data>();
    d->kind = WeightKind::constant;
    d->description = "const(" + weight_detail::fmt(c) + ")";
    d->eval = [c](const Point&) { return c; };
    d->a1 = {1.0, 1.0, 1.0};
    return Weight(std::move(d));
  }

  /// Exact A1 constant of |x|^alpha on R for -1 < alpha < 0. The extremal
  /// balls are [-t b, b]: the ratio is (1 + t^(1+alpha)) / ((1+alpha)(1+t)),
  /// maximised over t in [0, 1]. alpha = -1/2 gives 1 + sqrt(2).
  static double power_a1_1d(double alpha) {
    if (!(alpha < 0.0 && alpha > -1.0)) throw std::invalid_argument("need -1 < alpha < 0");
    auto neg_ratio = [alpha](double t) {
      return -(1.0 + std::pow(t, 1.0 + alpha)) / ((1.0 + alpha) * (1.0 + t));
    };
    const auto r = boost::math::tools::brent_find_minima(neg_ratio, 0.0, 1.0, 52);
    return std::max(-r.second, 1.0 / (1.0 + alpha));
  }

  /// |x - center|^alpha.
  static Weight power(double alpha, Point center = {}) {
    auto d = std::make_shared<Data>();
    d->kind = WeightKind::power;
    d->description = "power(alpha=" + weight_detail::fmt(alpha) + ")";
    d->eval = [alpha, center](const Point& x) {
      const double r = distance(x, center, kMaxDim);
      if (r == 0.0) return alpha < 0.0 ? kInf : (alpha == 0.0 ? 1.0 : 0.0);
      return std::pow(r, alpha);
    };
    d->everywhere_a1 = alpha <= 0.0;
    d->lsc = true;
    if (alpha == 0.0) d->a1 = {1.0, 1.0, 1.0};
    else if (alpha < 0.0 && alpha > -1.0) d->a1[0] = power_a1_1d(alpha);
    for (int a = 0; a < kMaxDim; ++a) d->breaks[a] = {center[a]};
    if (alpha < 0.0)
      d->unbounded = [center](const BoxDomain& box) { return box.contains_closed(center); };
    return Weight(std::move(d));
  }

  /// low for x[axis] <= threshold, high otherwise.
  static Weight step(double threshold, double low, double high, int axis = 0) {
    if (!(low > 0.0) || !(high > 0.0)) throw std::invalid_argument("step values must be positive");
    if (axis < 0 || axis >= kMaxDim) throw std::invalid_argument("step axis out of range");
    auto d = std::make_shared<Data>();
    d->kind = WeightKind::step;
    d->description = "step(threshold=" + weight_detail::fmt(threshold) +
                     ", low=" + weight_detail::fmt(low) + ", high=" + weight_detail::fmt(high) +
                     ", axis=" + std::to_string(axis) + ")";
    d->eval = [=](const Point& x) { return x[axis] <= threshold ? low : high; };
    d->lsc = low <= high;
    const double c = std::max(low, high) / std::min(low, high);
    d->a1 = {c, c, c};
    d->breaks[axis] = {threshold};
    return Weight(std::move(d));
  }

  /// profile(|x - center|); `break_radii` lists radii where the profile is
  /// not smooth.
  static Weight radial(std::function<double(double)> profile, std::string name,
                       std::vector<double> break_radii = {}, Point center = {}) {
    auto d = std::make_shared<Data>();
    d->kind = WeightKind::radial;
    d->description = "radial(profile=" + name + ")";
    d->eval = [profile = std::move(profile), center](const Point& x) {
      return profile(distance(x, center, kMaxDim));
    };
    for (int a = 0; a < kMaxDim; ++a) {
      d->breaks[a].push_back(center[a]);
      for (double r : break_radii) {
        d->breaks[a].push_back(center[a] - r);
        d->breaks[a].push_back(center[a] + r);
      }
      std::sort(d->breaks[a].begin(), d->breaks[a].end());
    }
    return Weight(std::move(d));
  }

  static Weight expression(const Expr& e, bool lsc = true) {
    auto d = std::make_shared<Data>();
    d->kind = WeightKind::expression;
    d->description = "expr(" + e.source() + ")";
    d->eval = [e](const Point& x) { return e(x); };
    d->lsc = lsc;
    return Weight(std::move(d));
  }

  static Weight from_function(std::string name, Evaluator f, bool lsc = true) {
    auto d = std::make_shared<Data>();
    d->kind = WeightKind::expression;
    d->description = std::move(name);
    d->eval = std::move(f);
    d->lsc = lsc;
    return Weight(std::move(d));
  }

  static Weight product(const Weight& a, const Weight& b) {
    auto d = std::make_shared<Data>();
    d->kind = WeightKind::product;
    d->description = "product(" + a.description() + ", " + b.description() + ")";
    d->eval = [a, b](const Point& x) { return a(x) * b(x); };
    d->lsc = a.lsc_asserted() && b.lsc_asserted();
    for (int ax = 0; ax < kMaxDim; ++ax) {
      auto& br = d->breaks[ax];
      br = a.breakpoints(ax);
      br.insert(br.end(), b.breakpoints(ax).begin(), b.breakpoints(ax).end());
      std::sort(br.begin(), br.end());
    }
    d->unbounded = [a, b](const BoxDomain& box) { return a.unbounded_in(box) || b.unbounded_in(box); };
    return Weight(std::move(d));
  }

  /// Piecewise-constant weight read from the cell containing x (clamped to the
  /// grid for points outside it).
  static Weight tabulated(const GridFunction& samples, std::string name,
                          WeightKind kind = WeightKind::tabulated, bool lsc = false) {
    for (std::size_t i = 0; i < samples.size(); ++i)
      if (!(samples[i] > 0.0)) throw SamplingError(i, "tabulated weight must be positive");
    auto d = std::make_shared<Data>();
    d->kind = kind;
    d->description = std::move(name);
    d->lsc = lsc;
    auto table = std::make_shared<const GridFunction>(samples);
    d->eval = [table](const Point& x) {
      const Grid& g = table->grid();
      Point y = x;
      for (int a = 0; a < g.dim(); ++a)
        y[a] = std::clamp(y[a], g.domain().lower(a), g.domain().upper(a));
      return (*table)[*g.locate(y)];
    };
    const Grid& g = samples.grid();
    for (int a = 0; a < g.dim(); ++a)
      for (int i = 1; i < g.resolution(a); ++i) d->breaks[a].push_back(g.face(a, i));
    bool any_inf = false;
    for (double v : samples.values()) any_inf = any_inf || is_inf(v);
    if (any_inf) d->unbounded = [](const BoxDomain&) { return true; };
    return Weight(std::move(d));
  }

  /// Pointwise power w^delta; a known A1 constant c becomes the bound c^delta.
  static Weight delta_power(const Weight& w, double delta) {
    auto d = std::make_shared<Data>(*w.data_);
    d->kind = WeightKind::delta_power;
    d->description = "(" + w.description() + ")^" + weight_detail::fmt(delta);
    d->eval = [w, delta](const Point& x) {
      const double v = w(x);
      return is_inf(v) ? kInf : std::pow(v, delta);
    };
    for (auto& c : d->a1)
      if (c) c = std::pow(*c, delta);
    return Weight(std::move(d));
  }

  /// a * w for a > 0.
  Weight scaled(double a) const {
    if (!(a > 0.0)) throw std::invalid_argument("weight scale must be positive");
    auto d = std::make_shared<Data>(*data_);
    d->kind = WeightKind::scaled;
    d->description = weight_detail::fmt(a) + "*" + data_->description;
    d->eval = [w = *this, a](const Point& x) { return a * w(x); };
    return Weight(std::move(d));
  }

 private:
  struct Data {
    WeightKind kind = WeightKind::expression;
    std::string description;
    Evaluator eval;
    bool lsc = true;
    bool everywhere_a1 = false;
    std::array<std::optional<double>, kMaxDim> a1{};
    std::array<std::vector<double>, kMaxDim> breaks{};
    std::function<bool(const BoxDomain&)> unbounded;
  };

  explicit Weight(std::shared_ptr<const Data> d) : data_(std::move(d)) {}

  std::shared_ptr<const Data> data_;
};

/// Samples w at every cell centre; +inf is preserved, values must lie in (0, inf].
inline GridFunction sample(const Weight& w, const Grid& grid) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    v[i] = w(grid.center(i));
    if (std::isnan(v[i]) || !(v[i] > 0.0))
      throw SamplingError(i, "weight " + w.description() + " evaluated to " +
                                 weight_detail::fmt(v[i]));
  }
  return {grid, std::move(v)};
}

}  // namespace wbv
