#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "wbv/core/geometry.hpp"
#include "wbv/core/quadrature.hpp"

namespace wbv {

/// The standard bump eta_eps(x) = eps^-n c_n exp(1 / (|x/eps|^2 - 1)) on the open
/// ball of radius eps, zero elsewhere, with c_n fixing unit mass.
class Mollifier {
 public:
  Mollifier(double eps, int dim) : eps_(eps), dim_(dim) {
    if (!(eps > 0.0)) throw std::invalid_argument("mollifier radius must be positive");
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("dimension must be 1, 2 or 3");
    c_ = 1.0 / unit_mass(dim);
    scale_ = c_ / std::pow(eps, dim);
  }

  double eps() const noexcept { return eps_; }
  int dim() const noexcept { return dim_; }
  /// c_n, the normalising constant of the unit-radius profile.
  double normalization() const noexcept { return c_; }

  /// eta_eps at a displacement of Euclidean length r.
  double radial(double r) const {
    const double s = r / eps_;
    if (!(s < 1.0)) return 0.0;
    return scale_ * std::exp(1.0 / (s * s - 1.0));
  }
  double operator()(double x) const { return radial(std::fabs(x)); }
  double operator()(const Point& x) const { return radial(norm(x, dim_)); }

  /// integral of exp(1/(|x|^2-1)) over the unit ball of R^dim.
  static double unit_mass(int dim) {
    static const double m[3] = {profile_moment(0) * 2.0, profile_moment(1) * 2.0 * std::numbers::pi,
                                profile_moment(2) * 4.0 * std::numbers::pi};
    return m[dim - 1];
  }

 private:
  static double profile_moment(int k) {
    return integrate([k](double r) { return std::pow(r, k) * std::exp(1.0 / (r * r - 1.0)); }, 0.0,
                     1.0, 1e-14)
        .value;
  }

  double eps_;
  int dim_;
  double c_ = 1.0;
  double scale_ = 1.0;
};

}  // namespace wbv
