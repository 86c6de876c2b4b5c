#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wbv {

inline constexpr int kMaxDim = 3;

/// A point of R^n, n <= 3. Coordinates beyond the ambient dimension are 0.
using Point = std::array<double, kMaxDim>;

inline double norm(const Point& p, int dim) {
  double s = 0.0;
  for (int a = 0; a < dim; ++a) s += p[a] * p[a];
  return std::sqrt(s);
}

inline double distance(const Point& p, const Point& q, int dim) {
  double s = 0.0;
  for (int a = 0; a < dim; ++a) s += (p[a] - q[a]) * (p[a] - q[a]);
  return std::sqrt(s);
}

inline Point make_point(std::span<const double> coords) {
  if (coords.size() > static_cast<std::size_t>(kMaxDim))
    throw std::invalid_argument("point has more than 3 coordinates");
  Point p{};
  std::copy(coords.begin(), coords.end(), p.begin());
  return p;
}

inline Point make_point(std::initializer_list<double> coords) {
  return make_point(std::span<const double>(coords.begin(), coords.size()));
}

/// Lebesgue measure of a Euclidean ball of the given radius in R^dim.
inline double ball_volume(int dim, double radius) {
  switch (dim) {
    case 1: return 2.0 * radius;
    case 2: return std::numbers::pi * radius * radius;
    case 3: return 4.0 / 3.0 * std::numbers::pi * radius * radius * radius;
    default: throw std::invalid_argument("dimension must be 1, 2 or 3");
  }
}

/// Open axis-aligned box (lower, upper) in R^n.
class BoxDomain {
 public:
  BoxDomain(std::span<const double> lower, std::span<const double> upper) {
    if (lower.size() != upper.size())
      throw std::invalid_argument("box corners have different dimensions");
    if (lower.empty() || lower.size() > static_cast<std::size_t>(kMaxDim))
      throw std::invalid_argument("box dimension must be 1, 2 or 3");
    dim_ = static_cast<int>(lower.size());
    for (int a = 0; a < dim_; ++a) {
      if (!(upper[a] > lower[a]) || !std::isfinite(lower[a]) || !std::isfinite(upper[a]))
        throw std::invalid_argument("box upper corner must exceed lower corner on axis " +
                                    std::to_string(a));
      lower_[a] = lower[a];
      upper_[a] = upper[a];
    }
  }
  BoxDomain(std::initializer_list<double> lower, std::initializer_list<double> upper)
      : BoxDomain(std::span<const double>(lower.begin(), lower.size()),
                  std::span<const double>(upper.begin(), upper.size())) {}

  static BoxDomain interval(double a, double b) { return BoxDomain({a}, {b}); }
  /// The cube (lo, hi)^dim.
  static BoxDomain cube(int dim, double lo, double hi) {
    std::vector<double> l(static_cast<std::size_t>(dim), lo), u(static_cast<std::size_t>(dim), hi);
    return BoxDomain(l, u);
  }

  int dim() const noexcept { return dim_; }
  double lower(int axis) const { return lower_.at(static_cast<std::size_t>(axis)); }
  double upper(int axis) const { return upper_.at(static_cast<std::size_t>(axis)); }
  double width(int axis) const { return upper(axis) - lower(axis); }
  const Point& lower_corner() const noexcept { return lower_; }
  const Point& upper_corner() const noexcept { return upper_; }

  double volume() const {
    double v = 1.0;
    for (int a = 0; a < dim_; ++a) v *= width(a);
    return v;
  }
  double diameter() const {
    double s = 0.0;
    for (int a = 0; a < dim_; ++a) s += width(a) * width(a);
    return std::sqrt(s);
  }
  /// Largest distance from an interior point to the boundary.
  double inradius() const {
    double r = width(0) / 2.0;
    for (int a = 1; a < dim_; ++a) r = std::min(r, width(a) / 2.0);
    return r;
  }

  bool contains(const Point& x) const {
    for (int a = 0; a < dim_; ++a)
      if (!(x[a] > lower_[a] && x[a] < upper_[a])) return false;
    return true;
  }
  bool contains_closed(const Point& x) const {
    for (int a = 0; a < dim_; ++a)
      if (x[a] < lower_[a] || x[a] > upper_[a]) return false;
    return true;
  }
  /// dist(x, boundary) for x inside the box; negative outside.
  double distance_to_boundary(const Point& x) const {
    double d = std::numeric_limits<double>::infinity();
    for (int a = 0; a < dim_; ++a) d = std::min({d, x[a] - lower_[a], upper_[a] - x[a]});
    return d;
  }

  BoxDomain scaled(double s) const {
    std::vector<double> l(static_cast<std::size_t>(dim_)), u(static_cast<std::size_t>(dim_));
    for (int a = 0; a < dim_; ++a) {
      l[a] = lower_[a] * s;
      u[a] = upper_[a] * s;
    }
    return BoxDomain(l, u);
  }

  friend bool operator==(const BoxDomain&, const BoxDomain&) = default;

 private:
  int dim_ = 1;
  Point lower_{};
  Point upper_{};
};

/// Regular cell-centred lattice over a box. Cell centres sit at lower + (i+1/2)h.
class Grid {
 public:
  using Index = std::array<int, kMaxDim>;

  Grid(BoxDomain domain, std::span<const int> resolution) : domain_(std::move(domain)) {
    if (static_cast<int>(resolution.size()) != domain_.dim())
      throw std::invalid_argument("resolution must give one count per axis");
    for (int a = 0; a < domain_.dim(); ++a) {
      if (resolution[a] < 2)
        throw std::invalid_argument("grid resolution must be at least 2 on axis " +
                                    std::to_string(a) + " (got " +
                                    std::to_string(resolution[a]) + ")");
      resolution_[a] = resolution[a];
      spacing_[a] = domain_.width(a) / resolution[a];
    }
    std::size_t s = 1;
    for (int a = 0; a < domain_.dim(); ++a) {
      stride_[a] = s;
      s *= static_cast<std::size_t>(resolution_[a]);
    }
    size_ = s;
  }

  const BoxDomain& domain() const noexcept { return domain_; }
  int dim() const noexcept { return domain_.dim(); }
  int resolution(int axis) const { return resolution_.at(static_cast<std::size_t>(axis)); }
  double spacing(int axis) const { return spacing_.at(static_cast<std::size_t>(axis)); }
  double min_spacing() const {
    double h = spacing_[0];
    for (int a = 1; a < dim(); ++a) h = std::min(h, spacing_[a]);
    return h;
  }
  std::size_t size() const noexcept { return size_; }
  std::size_t stride(int axis) const { return stride_.at(static_cast<std::size_t>(axis)); }
  double cell_volume() const {
    double v = 1.0;
    for (int a = 0; a < dim(); ++a) v *= spacing_[a];
    return v;
  }
  /// Measure of the face orthogonal to `axis`.
  double face_area(int axis) const {
    double v = 1.0;
    for (int a = 0; a < dim(); ++a)
      if (a != axis) v *= spacing_[a];
    return v;
  }

  Index index(std::size_t linear) const {
    Index idx{};
    for (int a = dim() - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(linear / stride_[a]);
      linear %= stride_[a];
    }
    return idx;
  }
  std::size_t linear(const Index& idx) const {
    std::size_t l = 0;
    for (int a = 0; a < dim(); ++a) l += static_cast<std::size_t>(idx[a]) * stride_[a];
    return l;
  }

  double center(int axis, int i) const {
    return domain_.lower(axis) + (static_cast<double>(i) + 0.5) * spacing_[axis];
  }
  double face(int axis, int i) const {
    if (i == resolution_[axis]) return domain_.upper(axis);
    return domain_.lower(axis) + static_cast<double>(i) * spacing_[axis];
  }
  Point center(std::size_t linear_index) const {
    const Index idx = index(linear_index);
    Point p{};
    for (int a = 0; a < dim(); ++a) p[a] = center(a, idx[a]);
    return p;
  }
  /// Centre of the face between cell `linear_index` and its +axis neighbour.
  Point forward_face_center(std::size_t linear_index, int axis) const {
    Point p = center(linear_index);
    p[axis] += 0.5 * spacing_[axis];
    return p;
  }
  /// True when cell has a +axis neighbour inside the grid.
  bool has_forward(std::size_t linear_index, int axis) const {
    return index(linear_index)[axis] + 1 < resolution_[axis];
  }

  /// Cell whose closed extent contains x (ties go to the higher index), or
  /// nullopt outside the closed box.
  std::optional<std::size_t> locate(const Point& x) const {
    if (!domain_.contains_closed(x)) return std::nullopt;
    Index idx{};
    for (int a = 0; a < dim(); ++a) {
      int i = static_cast<int>(std::floor((x[a] - domain_.lower(a)) / spacing_[a]));
      idx[a] = std::clamp(i, 0, resolution_[a] - 1);
    }
    return linear(idx);
  }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.domain_ == b.domain_ && a.resolution_ == b.resolution_;
  }

 private:
  BoxDomain domain_;
  Index resolution_{1, 1, 1};
  Point spacing_{1.0, 1.0, 1.0};
  std::array<std::size_t, kMaxDim> stride_{1, 1, 1};
  std::size_t size_ = 1;
};

inline Grid make_grid(const BoxDomain& domain, std::span<const int> resolution) {
  return Grid(domain, resolution);
}

inline Grid make_grid(const BoxDomain& domain, std::initializer_list<int> resolution) {
  return Grid(domain, std::span<const int>(resolution.begin(), resolution.size()));
}

/// Same resolution on every axis.
inline Grid make_grid(const BoxDomain& domain, int resolution) {
  std::vector<int> r(static_cast<std::size_t>(domain.dim()), resolution);
  return Grid(domain, r);
}

}  // namespace wbv
