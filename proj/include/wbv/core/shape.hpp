#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "wbv/core/geometry.hpp"
#include "wbv/core/grid_function.hpp"

namespace wbv {

/// Closed-form description of an axis-aligned box (lower, upper).
struct Box {
  Point lower{};
  Point upper{};
};

struct BoxUnion {
  std::vector<Box> boxes;
};

/// The set {phi < 0}.
struct ImplicitSet {
  std::function<double(const Point&)> phi;
};

/// A parametrised curve t in [t0, t1] -> R^2 with its velocity.
struct Curve {
  std::function<Point(double)> position;
  std::function<Point(double)> velocity;
  double t0 = 0.0;
  double t1 = 1.0;
  bool closed = true;
};

struct Sphere {
  Point center{};
  double radius = 1.0;
};

/// Boundary given explicitly: curves in 2-D, spheres in 3-D, plus the
/// membership test for the enclosed set.
struct ParametricBoundary {
  std::vector<Curve> curves;
  std::vector<Sphere> spheres;
  std::function<bool(const Point&)> inside;
};

/// A measurable set E in R^n held in exactly one representation.
class ShapeSet {
 public:
  using Representation = std::variant<BoxUnion, ImplicitSet, ParametricBoundary>;

  ShapeSet(int dim, Representation rep, std::string name)
      : dim_(dim), rep_(std::move(rep)), name_(std::move(name)) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("shape dimension must be 1, 2 or 3");
    if (const auto* imp = std::get_if<ImplicitSet>(&rep_); imp && !imp->phi)
      throw std::invalid_argument("implicit shape needs a level-set function");
    if (const auto* par = std::get_if<ParametricBoundary>(&rep_); par && !par->inside)
      throw std::invalid_argument("parametric shape needs a membership test");
  }

  int dim() const noexcept { return dim_; }
  const std::string& name() const noexcept { return name_; }
  const Representation& representation() const noexcept { return rep_; }
  bool is_box_union() const { return std::holds_alternative<BoxUnion>(rep_); }
  bool is_empty() const {
    const auto* u = std::get_if<BoxUnion>(&rep_);
    return u && u->boxes.empty();
  }

  bool contains(const Point& x) const {
    return std::visit(
        [&](const auto& r) -> bool {
          using R = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<R, BoxUnion>) {
            for (const Box& b : r.boxes) {
              bool in = true;
              for (int a = 0; a < dim_ && in; ++a) in = x[a] > b.lower[a] && x[a] < b.upper[a];
              if (in) return true;
            }
            return false;
          } else if constexpr (std::is_same_v<R, ImplicitSet>) {
            return r.phi(x) < 0.0;
          } else {
            return r.inside(x);
          }
        },
        rep_);
  }

  /// The image of E under x -> s x (s > 0).
  ShapeSet scaled(double s) const {
    if (!(s > 0.0)) throw std::invalid_argument("scale must be positive");
    return std::visit(
        [&](const auto& r) -> ShapeSet {
          using R = std::decay_t<decltype(r)>;
          if constexpr (std::is_same_v<R, BoxUnion>) {
            BoxUnion u = r;
            for (Box& b : u.boxes)
              for (int a = 0; a < kMaxDim; ++a) {
                b.lower[a] *= s;
                b.upper[a] *= s;
              }
            return ShapeSet(dim_, u, name_ + "*" + std::to_string(s));
          } else if constexpr (std::is_same_v<R, ImplicitSet>) {
            auto phi = r.phi;
            return ShapeSet(dim_, ImplicitSet{[phi, s](const Point& x) {
                              Point y = x;
                              for (double& c : y) c /= s;
                              return phi(y);
                            }},
                            name_ + "*" + std::to_string(s));
          } else {
            ParametricBoundary p;
            for (const Curve& c : r.curves) {
              Curve d = c;
              d.position = [f = c.position, s](double t) {
                Point q = f(t);
                for (double& v : q) v *= s;
                return q;
              };
              d.velocity = [f = c.velocity, s](double t) {
                Point q = f(t);
                for (double& v : q) v *= s;
                return q;
              };
              p.curves.push_back(std::move(d));
            }
            for (Sphere sp : r.spheres) {
              for (double& v : sp.center) v *= s;
              sp.radius *= s;
              p.spheres.push_back(sp);
            }
            p.inside = [in = r.inside, s](const Point& x) {
              Point y = x;
              for (double& c : y) c /= s;
              return in(y);
            };
            return ShapeSet(dim_, std::move(p), name_ + "*" + std::to_string(s));
          }
        },
        rep_);
  }

  static ShapeSet empty(int dim) { return ShapeSet(dim, BoxUnion{}, "empty"); }

  /// Finite union of open intervals (a_i, b_i) in R.
  static ShapeSet intervals(const std::vector<std::pair<double, double>>& parts) {
    BoxUnion u;
    std::string name = "intervals(";
    for (const auto& [a, b] : parts) {
      if (!(b > a)) throw std::invalid_argument("interval must satisfy a < b");
      u.boxes.push_back(Box{Point{a, 0, 0}, Point{b, 0, 0}});
      name += "(" + std::to_string(a) + "," + std::to_string(b) + ")";
    }
    return ShapeSet(1, std::move(u), name + ")");
  }
  static ShapeSet interval(double a, double b) { return intervals({{a, b}}); }

  static ShapeSet box(int dim, const Point& lower, const Point& upper) {
    for (int a = 0; a < dim; ++a)
      if (!(upper[a] > lower[a])) throw std::invalid_argument("box must have positive extent");
    return ShapeSet(dim, BoxUnion{{Box{lower, upper}}}, "box");
  }
  static ShapeSet boxes(int dim, std::vector<Box> parts) {
    return ShapeSet(dim, BoxUnion{std::move(parts)}, "boxes");
  }

  /// Disk of the given radius in R^2 with its boundary circle.
  static ShapeSet disk(const Point& center, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("disk radius must be positive");
    return ellipse(center, radius, radius);
  }
  static ShapeSet ellipse(const Point& center, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("ellipse axes must be positive");
    constexpr double tau = 2.0 * std::numbers::pi;
    ParametricBoundary p;
    p.curves.push_back(Curve{
        [=](double t) {
          return Point{center[0] + a * std::cos(tau * t), center[1] + b * std::sin(tau * t), 0.0};
        },
        [=](double t) {
          return Point{-tau * a * std::sin(tau * t), tau * b * std::cos(tau * t), 0.0};
        },
        0.0, 1.0, true});
    p.inside = [=](const Point& x) {
      const double u = (x[0] - center[0]) / a, v = (x[1] - center[1]) / b;
      return u * u + v * v < 1.0;
    };
    return ShapeSet(2, std::move(p), a == b ? "disk" : "ellipse");
  }
  /// Ball in R^3.
  static ShapeSet ball(const Point& center, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
    ParametricBoundary p;
    p.spheres.push_back(Sphere{center, radius});
    p.inside = [=](const Point& x) { return distance(x, center, 3) < radius; };
    return ShapeSet(3, std::move(p), "ball");
  }
  static ShapeSet implicit(int dim, std::function<double(const Point&)> phi, std::string name) {
    return ShapeSet(dim, ImplicitSet{std::move(phi)}, std::move(name));
  }

 private:
  int dim_;
  Representation rep_;
  std::string name_;
};

/// Discrete characteristic function: 1 at cell centres inside E, else 0.
inline GridFunction indicator(const ShapeSet& shape, const Grid& grid) {
  if (shape.dim() != grid.dim())
    throw std::invalid_argument("shape dimension " + std::to_string(shape.dim()) +
                                " does not match grid dimension " + std::to_string(grid.dim()));
  std::vector<double> v(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = shape.contains(grid.center(i)) ? 1.0 : 0.0;
  return {grid, std::move(v)};
}

}  // namespace wbv
