#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "wbv/core/extended.hpp"
#include "wbv/core/geometry.hpp"
#include "wbv/core/quadrature.hpp"

namespace wbv {

struct Atom {
  Point at{};
  double mass = 0.0;
};

/// Closed ball {y : |y - center| <= radius}.
struct Ball {
  Point center{};
  double radius = 0.0;
};

/// A locally finite Borel measure: finitely many atoms, an optional
/// unbounded geometric atom train base^k at x = k e_0 (k = 0, 1, ...), and an
/// optional absolutely continuous part.
class Measure {
 public:
  using Density = std::function<double(const Point&)>;
  /// Exact mass of a closed ball under the density, when known.
  using BallMass = std::function<double(const Ball&)>;

  int dim() const noexcept { return dim_; }
  const std::string& name() const noexcept { return name_; }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }
  bool has_density() const noexcept { return static_cast<bool>(density_); }
  std::optional<double> geometric_base() const noexcept { return train_base_; }

  double density(const Point& x) const { return density_ ? density_(x) : 0.0; }

  /// mu(B) for the closed ball B. May be +inf for the geometric atom train.
  double mass(const Ball& b) const {
    double m = 0.0;
    for (const Atom& a : atoms_)
      if (distance(a.at, b.center, dim_) <= b.radius) m += a.mass;
    if (train_base_) m += train_mass(b);
    if (density_) {
      if (ball_mass_) {
        m += ball_mass_(b);
      } else if (dim_ == 1) {
        m += integrate_or_throw([&](double t) { return density_(Point{t, 0.0, 0.0}); },
                                b.center[0] - b.radius, b.center[0] + b.radius,
                                "density of " + name_, 1e-9);
      } else {
        m += ball_integral(density_, b.center, b.radius, dim_);
      }
    }
    return m;
  }

  /// mu([lo, hi]) in 1-D.
  double interval_mass(double lo, double hi) const {
    if (dim_ != 1) throw std::invalid_argument("interval_mass needs a 1-D measure");
    return mass(Ball{Point{0.5 * (lo + hi), 0.0, 0.0}, 0.5 * (hi - lo)});
  }

  static Measure lebesgue(int dim) {
    Measure m(dim, "lebesgue");
    m.density_ = [](const Point&) { return 1.0; };
    m.ball_mass_ = [dim](const Ball& b) { return ball_volume(dim, b.radius); };
    return m;
  }
  static Measure dirac(int dim, Point at = {}) {
    Measure m(dim, "dirac");
    m.atoms_.push_back(Atom{at, 1.0});
    return m;
  }
  static Measure atoms(int dim, std::vector<Atom> list) {
    for (const Atom& a : list)
      if (!(a.mass > 0.0) || !std::isfinite(a.mass))
        throw std::invalid_argument("atom masses must be positive and finite");
    Measure m(dim, "atoms");
    m.atoms_ = std::move(list);
    return m;
  }
  /// Sum over k >= 0 of base^k times the unit mass at k e_0.
  static Measure geometric_atoms(int dim, double base = 2.0) {
    if (!(base > 1.0)) throw std::invalid_argument("geometric atom base must exceed 1");
    Measure m(dim, "geometric_atoms");
    m.train_base_ = base;
    return m;
  }
  static Measure with_density(int dim, std::string name, Density rho, BallMass exact = {}) {
    Measure m(dim, std::move(name));
    m.density_ = std::move(rho);
    m.ball_mass_ = std::move(exact);
    return m;
  }

 private:
  Measure(int dim, std::string name) : dim_(dim), name_(std::move(name)) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("measure dimension must be 1, 2 or 3");
  }

  double train_mass(const Ball& b) const {
    // Atoms k with |k e_0 - c| <= r: k in [c0 - s, c0 + s], s^2 = r^2 - |c'|^2.
    double off = 0.0;
    for (int a = 1; a < dim_; ++a) off += b.center[a] * b.center[a];
    const double s2 = b.radius * b.radius - off;
    if (s2 < 0.0) return 0.0;
    const double s = std::sqrt(s2);
    const double lo = std::max(0.0, std::ceil(b.center[0] - s));
    const double hi = std::floor(b.center[0] + s);
    if (hi < lo) return 0.0;
    const double base = *train_base_;
    // (base^(hi+1) - base^lo) / (base - 1); overflows to +inf for huge balls.
    const double top = std::pow(base, hi + 1.0);
    if (is_inf(top)) return kInf;
    return (top - std::pow(base, lo)) / (base - 1.0);
  }

  int dim_;
  std::string name_;
  std::vector<Atom> atoms_;
  std::optional<double> train_base_;
  Density density_;
  BallMass ball_mass_;
};

}  // namespace wbv
