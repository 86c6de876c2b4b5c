#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wbv/core/errors.hpp"
#include "wbv/core/geometry.hpp"

namespace wbv {

/// Scalar samples at the cell centres of a grid.
class GridFunction {
 public:
  GridFunction(Grid grid, std::vector<double> values)
      : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size())
      throw std::invalid_argument("grid function has " + std::to_string(values_.size()) +
                                  " values for " + std::to_string(grid_.size()) + " cells");
  }
  GridFunction(Grid grid, double fill) : grid_(std::move(grid)), values_(grid_.size(), fill) {}

  const Grid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double at(std::size_t i) const { return values_.at(i); }

  bool all_finite() const {
    for (double v : values_)
      if (!std::isfinite(v)) return false;
    return true;
  }

  GridFunction scaled(double c) const {
    std::vector<double> v(values_);
    for (double& x : v) x *= c;
    return {grid_, std::move(v)};
  }
  GridFunction plus(const GridFunction& other) const {
    if (!(other.grid_ == grid_)) throw std::invalid_argument("grid functions live on different grids");
    std::vector<double> v(values_);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += other.values_[i];
    return {grid_, std::move(v)};
  }
  template <class F>
  GridFunction map(F&& f) const {
    std::vector<double> v(values_.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(values_[i]);
    return {grid_, std::move(v)};
  }

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Exact evaluation of a finite-valued function at every cell centre.
inline GridFunction sample(const std::function<double(const Point&)>& f, const Grid& grid) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    v[i] = f(grid.center(i));
    if (!std::isfinite(v[i])) throw SamplingError(i, "function value is not finite");
  }
  return {grid, std::move(v)};
}

}  // namespace wbv
