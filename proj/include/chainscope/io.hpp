#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "chainscope/approximation.hpp"
#include "chainscope/error.hpp"
#include "chainscope/metric_space.hpp"
#include "chainscope/sequences.hpp"
#include "chainscope/sparse_vector.hpp"

namespace chainscope::io {

using nlohmann::json;

namespace detail {

inline std::ifstream open(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::malformed_input, "cannot open '" + path + "'");
  return in;
}

inline double parse_number(const std::string& text, const std::string& where) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw Error(Errc::malformed_input, where + ": '" + text + "' is not a number");
  }
  while (used < text.size() && std::isspace(static_cast<unsigned char>(text[used]))) ++used;
  if (used != text.size()) throw Error(Errc::malformed_input, where + ": trailing characters in '" + text + "'");
  return v;
}

inline json parse_json(const std::string& text, const std::string& where) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::malformed_input, where + ": " + e.what());
  }
}

}  // namespace detail

/// Header-free CSV of an n x n distance matrix.
inline MetricSpace read_matrix_csv(std::istream& in, double tol = kDefaultTol) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ','))
      row.push_back(detail::parse_number(cell, "line " + std::to_string(line_no)));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(Errc::malformed_input, "distance matrix is empty");
  return matrix_space(rows, tol);
}

inline MetricSpace read_matrix_csv(const std::string& path, double tol = kDefaultTol) {
  auto in = detail::open(path);
  return read_matrix_csv(in, tol);
}

/// JSONL points: a header line {"provider": name, "param": value} followed by
/// one {"id": i, "coords": {"index": value, ...}} per point; ids must be
/// 0..n-1 in any order. Euclidean and bounded-usual read coordinates
/// 0..dim-1; sparse providers keep every listed index; function-sup reads
/// domain positions 0..param-1.
inline MetricSpace read_points_jsonl(std::istream& in, double tol = kDefaultTol) {
  std::string line;
  std::size_t line_no = 0;
  json header;
  std::map<std::size_t, std::map<std::size_t, double>> points;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(line_no);
    const json row = detail::parse_json(line, where);
    if (header.is_null()) {
      if (!row.contains("provider")) throw Error(Errc::malformed_input, where + ": missing provider header");
      header = row;
      continue;
    }
    if (!row.contains("id") || !row["id"].is_number_unsigned() || !row.contains("coords") || !row["coords"].is_object())
      throw Error(Errc::malformed_input, where + ": expected {\"id\": int, \"coords\": {...}}");
    const auto id = row["id"].get<std::size_t>();
    if (points.count(id)) throw Error(Errc::malformed_input, where + ": duplicate id " + std::to_string(id));
    auto& coords = points[id];
    for (const auto& [key, value] : row["coords"].items()) {
      if (!value.is_number()) throw Error(Errc::malformed_input, where + ": coordinate " + key + " is not a number");
      coords[static_cast<std::size_t>(detail::parse_number(key, where))] = value.get<double>();
    }
  }
  if (header.is_null()) throw Error(Errc::malformed_input, "points file has no header line");
  if (points.empty()) throw Error(Errc::malformed_input, "points file has no points");
  if (points.rbegin()->first != points.size() - 1) throw Error(Errc::malformed_input, "point ids must be 0..n-1");

  const std::string provider = header["provider"].get<std::string>();
  const double param = header.value("param", 0.0);
  auto dense = [&](std::size_t width) {
    std::vector<double> out;
    for (const auto& [id, coords] : points) {
      for (std::size_t k = 0; k < width; ++k) {
        const auto it = coords.find(k);
        out.push_back(it == coords.end() ? 0.0 : it->second);
      }
    }
    return out;
  };
  auto sparse = [&] {
    std::vector<SparseVector> out;
    for (const auto& [id, coords] : points) out.emplace_back(coords);
    return out;
  };
  auto width = [&](double fallback) {
    const double w = param > 0.0 ? param : fallback;
    if (w < 1.0 || w != std::floor(w)) throw Error(Errc::malformed_input, "param must be a positive integer");
    return static_cast<std::size_t>(w);
  };
  if (provider == "euclidean") return build_space(Euclidean{width(1.0), dense(width(1.0))}, tol);
  if (provider == "sup-norm-sparse") return build_space(SupNormSparse{sparse()}, tol);
  if (provider == "p-norm-sparse") return build_space(PNormSparse{param > 0.0 ? param : 2.0, sparse()}, tol);
  if (provider == "bounded-usual") return build_space(BoundedUsual{param > 0.0 ? param : 1.0, dense(1)}, tol);
  if (provider == "function-sup") return build_space(FunctionSup{width(1.0), dense(width(1.0))}, tol);
  throw Error(Errc::malformed_input, "unknown provider '" + provider + "'");
}

inline MetricSpace read_points_jsonl(const std::string& path, double tol = kDefaultTol) {
  auto in = detail::open(path);
  return read_points_jsonl(in, tol);
}

inline json read_json_file(const std::string& path) {
  auto in = detail::open(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return detail::parse_json(buffer.str(), path);
}

/// Prefix: a JSON array of point indices.
inline std::vector<std::size_t> prefix_from_json(const json& j) {
  if (!j.is_array()) throw Error(Errc::malformed_input, "prefix must be a JSON array of indices");
  std::vector<std::size_t> out;
  for (const json& v : j) {
    if (!v.is_number_unsigned()) throw Error(Errc::malformed_input, "prefix entries must be nonnegative integers");
    out.push_back(v.get<std::size_t>());
  }
  return out;
}

/// Schedule: [[eps, start], ...].
inline ToleranceSchedule schedule_from_json(const json& j) {
  if (!j.is_array()) throw Error(Errc::malformed_input, "schedule must be [[eps, start], ...]");
  std::vector<Stage> stages;
  for (const json& s : j) {
    if (!s.is_array() || s.size() != 2 || !s[0].is_number() || !s[1].is_number_unsigned())
      throw Error(Errc::malformed_input, "schedule stage must be [eps, start]");
    stages.push_back({s[0].get<double>(), s[1].get<std::size_t>()});
  }
  return ToleranceSchedule(std::move(stages));
}

inline json schedule_to_json(const ToleranceSchedule& schedule) {
  json out = json::array();
  for (const Stage& s : schedule.stages()) out.push_back({s.eps, s.start});
  return out;
}

/// Function: {"values": [...]} aligned with point indices.
inline std::vector<double> function_from_json(const json& j) {
  if (!j.is_object() || !j.contains("values") || !j["values"].is_array())
    throw Error(Errc::malformed_input, "function must be {\"values\": [...]}");
  std::vector<double> out;
  for (const json& v : j["values"]) {
    if (!v.is_number()) throw Error(Errc::malformed_input, "function values must be numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

/// Non-finite doubles become the strings "inf", "-inf" or "nan".
inline json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

inline json verdict_to_json(const Verdict& v) {
  json out{{"status", v.consistent() ? "consistent" : "falsified"}};
  if (v.witness) {
    out["witness"] = {{"stage", v.witness->stage},
                      {"index", v.witness->index},
                      {"partner", v.witness->partner},
                      {"gap", number(v.witness->gap)}};
  }
  return out;
}

inline json decomposition_to_json(const LevelDecomposition& d) {
  json levels = json::object();
  for (const auto& [n, members] : d.levels) levels[std::to_string(n)] = members;
  json g = json::array(), h = json::array();
  for (double v : d.g()) g.push_back(v);
  for (double v : d.h.values()) h.push_back(v);
  return {{"eps", d.eps}, {"levels", levels}, {"g", g}, {"h", h}, {"sup_error", d.sup_error}};
}

}  // namespace chainscope::io
