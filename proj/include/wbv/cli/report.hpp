#pragma once

// Check records and their JSON form. A check passes iff its recorded
// comparison holds; a report passes iff every check does.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "wbv/cli/fixtures.hpp"
#include "wbv/cli/json_io.hpp"

namespace wbv::cli {

enum class Comparison { absolute, relative, at_most, at_least, holds };

inline const char* to_string(Comparison c) {
  switch (c) {
    case Comparison::absolute: return "abs";
    case Comparison::relative: return "rel";
    case Comparison::at_most: return "<=";
    case Comparison::at_least: return ">=";
    case Comparison::holds: return "holds";
  }
  return "unknown";
}

struct Check {
  std::string name;
  Comparison comparison = Comparison::holds;
  double value = 0.0;
  std::optional<double> expected;  ///< target, or the bound for at_most / at_least
  std::optional<Source> source;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

/// |value - expected| <= tol; equal infinities pass.
inline Check check_abs(std::string name, double value, double expected, double tol,
                       std::optional<Source> src = std::nullopt) {
  const bool ok = value == expected || std::fabs(value - expected) <= tol;
  return {std::move(name), Comparison::absolute, value, expected, src, tol, ok, {}};
}

/// |value - expected| <= tol |expected|.
inline Check check_rel(std::string name, double value, double expected, double tol,
                       std::optional<Source> src = std::nullopt) {
  const bool ok = value == expected || std::fabs(value - expected) <= tol * std::fabs(expected);
  return {std::move(name), Comparison::relative, value, expected, src, tol, ok, {}};
}

inline Check check_le(std::string name, double value, double bound, std::string note = {}) {
  return {std::move(name), Comparison::at_most, value, bound, std::nullopt, 0.0, value <= bound,
          std::move(note)};
}

inline Check check_ge(std::string name, double value, double bound, std::string note = {}) {
  return {std::move(name), Comparison::at_least, value, bound, std::nullopt, 0.0, value >= bound,
          std::move(note)};
}

inline Check check_true(std::string name, bool ok, std::string note = {}) {
  return {std::move(name), Comparison::holds, ok ? 1.0 : 0.0, std::nullopt, std::nullopt, 0.0, ok,
          std::move(note)};
}

inline Json to_json(const Check& c) {
  Json j;
  j["name"] = c.name;
  j["comparison"] = to_string(c.comparison);
  if (c.comparison != Comparison::holds) j["value"] = num(c.value);
  if (c.expected) j["expected"] = num(*c.expected);
  if (c.source) j["source"] = to_string(*c.source);
  if (c.comparison == Comparison::absolute || c.comparison == Comparison::relative)
    j["tolerance"] = num(c.tolerance);
  j["pass"] = c.pass;
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

inline Json to_json(const std::vector<Check>& checks) {
  Json a = Json::array();
  for (const Check& c : checks) a.push_back(to_json(c));
  return a;
}

inline bool all_pass(const std::vector<Check>& checks) {
  for (const Check& c : checks)
    if (!c.pass) return false;
  return !checks.empty();
}

}  // namespace wbv::cli
