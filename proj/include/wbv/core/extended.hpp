#pragma once

#include <cmath>
#include <limits>

namespace wbv {

/// The +infinity representative of the extended reals.
inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline bool is_inf(double v) noexcept { return v == kInf; }

/// Product used inside integrals: 0 * inf = 0.
inline double measure_product(double a, double b) noexcept {
  if (a == 0.0 || b == 0.0) return 0.0;
  return a * b;
}

/// Ratio a / b on [0, inf] with the conventions x/0 = inf (x > 0), 0/0 = 0,
/// inf/inf = 1.
inline double extended_ratio(double a, double b) noexcept {
  if (a == 0.0) return 0.0;
  if (b == 0.0) return kInf;
  if (is_inf(a) && is_inf(b)) return 1.0;
  return a / b;
}

}  // namespace wbv
