#pragma once

// Config ingestion (TOML or JSON) and report emission. Reports go through
// ordered_json so key order follows insertion; doubles print with the shortest
// round-trip form, so identical values give identical bytes.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <toml.hpp>

#include "wbv/cli/spec_parser.hpp"

namespace wbv::cli {

using Json = nlohmann::ordered_json;

/// Non-finite values become the strings "inf", "-inf", "nan"; JSON has no
/// literal for them and a silent null would lose the +inf perimeter results.
inline Json num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline Json nums(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

/// Inverse of num(): accepts numbers and the three special strings.
inline double as_double(const Json& j, const std::string& field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return INFINITY;
    if (s == "-inf") return -INFINITY;
    if (s == "nan") return NAN;
    return parse_number(s);
  }
  throw SpecError("field '" + field + "' must be a number");
}

namespace json_detail {

inline Json from_toml(const toml::node& n) {
  if (const auto* t = n.as_table()) {
    Json o = Json::object();
    for (const auto& [k, v] : *t) o[std::string(k.str())] = from_toml(v);
    return o;
  }
  if (const auto* a = n.as_array()) {
    Json arr = Json::array();
    for (const auto& v : *a) arr.push_back(from_toml(v));
    return arr;
  }
  if (const auto* s = n.as_string()) return s->get();
  if (const auto* i = n.as_integer()) return i->get();
  if (const auto* f = n.as_floating_point()) return num(f->get());
  if (const auto* b = n.as_boolean()) return b->get();
  throw SpecError("unsupported TOML value (dates and times are not config fields)");
}

}  // namespace json_detail

inline Json parse_toml_text(const std::string& text, const std::string& origin = "config") {
  try {
    return json_detail::from_toml(toml::parse(text, origin));
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << origin << ":" << e.source().begin.line << ":" << e.source().begin.column << ": "
       << e.description();
    throw SpecError(os.str());
  }
}

inline Json parse_json_text(const std::string& text, const std::string& origin = "config") {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw SpecError(origin + ": " + e.what());
  }
}

/// Chooses the format by extension: .json is JSON, anything else TOML.
inline Json load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpecError("cannot read config '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (path.extension() == ".json") return parse_json_text(buf.str(), path.string());
  return parse_toml_text(buf.str(), path.string());
}

/// 64-bit FNV-1a, hex encoded. Used as the inputs digest in reports.
inline std::string digest(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

inline std::string digest(const Json& j) { return digest(j.dump()); }

inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct CsvTrace {
  std::string name;  // file is trace_<name>.csv
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::string render() const {
    std::string s;
    for (std::size_t i = 0; i < header.size(); ++i) s += (i ? "," : "") + header[i];
    s += '\n';
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + format_double(r[i]);
      s += '\n';
    }
    return s;
  }
};

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

inline void write_json(const std::filesystem::path& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

inline void write_trace(const std::filesystem::path& dir, const CsvTrace& t) {
  write_text(dir / ("trace_" + t.name + ".csv"), t.render());
}

}  // namespace wbv::cli
