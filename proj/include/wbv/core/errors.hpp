#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wbv {

/// Base class for every domain error raised by the library. Argument
/// validation failures use std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SamplingError : public Error {
 public:
  SamplingError(std::size_t cell, const std::string& what)
      : Error("sampling failed at cell " + std::to_string(cell) + ": " + what), cell_(cell) {}
  std::size_t cell() const noexcept { return cell_; }

 private:
  std::size_t cell_;
};

class CoverageError : public Error {
 public:
  CoverageError(const std::string& what, std::vector<std::size_t> cells)
      : Error(what), cells_(std::move(cells)) {}
  const std::vector<std::size_t>& cells() const noexcept { return cells_; }

 private:
  std::vector<std::size_t> cells_;
};

class FeasibilityError : public Error {
 public:
  explicit FeasibilityError(double certificate)
      : Error("test field is infeasible: max |phi|/w = " + std::to_string(certificate)),
        certificate_(certificate) {}
  double certificate() const noexcept { return certificate_; }

 private:
  double certificate_;
};

class PreconditionError : public Error {
 public:
  PreconditionError(const std::string& what, std::vector<double> gaps)
      : Error(what), gaps_(std::move(gaps)) {}
  const std::vector<double>& gaps() const noexcept { return gaps_; }

 private:
  std::vector<double> gaps_;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

class ResolutionError : public Error {
 public:
  using Error::Error;
};

class ClassificationError : public Error {
 public:
  using Error::Error;
};

class InconsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace wbv
