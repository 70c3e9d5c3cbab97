#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "scrible/algorithms.hpp"
#include "scrible/environments.hpp"
#include "scrible/errors.hpp"
#include "scrible/geometry.hpp"

namespace scrible {

using json = nlohmann::json;

/// Shortest round-trip decimal form of a double.
inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

inline Vector vector_from_json(const json& j) {
  if (!j.is_array()) throw InputError("expected a JSON array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw InputError("expected a number");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

inline json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

/// {"A": [[row]...], "b": [...]} with an optional "interior": [...] hint.
inline ConvexPolytope polytope_from_json(const json& j) {
  if (!j.is_object() || !j.contains("A") || !j.contains("b")) throw InputError("polytope JSON needs \"A\" and \"b\"");
  const json& rows = j.at("A");
  if (!rows.is_array() || rows.empty()) throw InputError("polytope JSON: \"A\" must be a non-empty array");
  const std::size_t m = rows.size();
  const std::size_t n = rows[0].is_array() ? rows[0].size() : 0;
  if (n == 0) throw InputError("polytope JSON: rows of \"A\" must be non-empty arrays");
  Matrix A(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < m; ++i) {
    const Vector row = vector_from_json(rows[i]);
    if (static_cast<std::size_t>(row.size()) != n) throw InputError("polytope JSON: ragged \"A\"");
    A.row(static_cast<Eigen::Index>(i)) = row.transpose();
  }
  Vector b = vector_from_json(j.at("b"));
  std::optional<Vector> interior;
  if (j.contains("interior")) interior = vector_from_json(j.at("interior"));
  return ConvexPolytope(std::move(A), std::move(b), std::move(interior));
}

inline json polytope_to_json(const ConvexPolytope& body) {
  json rows = json::array();
  const Matrix& A = body.constraint_matrix();
  for (Eigen::Index i = 0; i < A.rows(); ++i) rows.push_back(vector_to_json(A.row(i).transpose()));
  return json{{"A", rows}, {"b", vector_to_json(body.constraint_bounds())}};
}

/// A graph file: topology plus optional per-round per-edge delays.
struct GraphFile {
  GraphSpec graph;
  std::vector<Vector> delays;
};

/// {"nodes": N, "edges": [[u,v],...], "source": s, "sink": t, "delays": [[...]...]}.
inline GraphFile graph_from_json(const json& j) {
  GraphFile out;
  try {
    out.graph.node_count = j.at("nodes").get<std::size_t>();
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw InputError("graph JSON: each edge is a [from, to] pair");
      out.graph.edges.emplace_back(e[0].get<std::size_t>(), e[1].get<std::size_t>());
    }
    out.graph.source = j.at("source").get<std::size_t>();
    out.graph.sink = j.at("sink").get<std::size_t>();
    if (j.contains("delays")) {
      for (const auto& row : j.at("delays")) {
        Vector d = vector_from_json(row);
        if (static_cast<std::size_t>(d.size()) != out.graph.edges.size()) {
          throw InputError("graph JSON: each delay row needs one entry per edge");
        }
        out.delays.push_back(std::move(d));
      }
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("graph JSON: ") + e.what());
  }
  validate_graph(out.graph);
  return out;
}

inline json graph_to_json(const GraphSpec& g, const std::vector<Vector>& delays = {}) {
  json edges = json::array();
  for (const auto& [u, v] : g.edges) edges.push_back({u, v});
  json out{{"nodes", g.node_count}, {"edges", edges}, {"source", g.source}, {"sink", g.sink}};
  if (!delays.empty()) {
    json rows = json::array();
    for (const auto& d : delays) rows.push_back(vector_to_json(d));
    out["delays"] = rows;
  }
  return out;
}

/// Trace CSV header: t, x_1..x_n, y_1..y_n, observed_loss, fhat_1..fhat_n, cum_loss, cum_regret.
inline std::string trace_csv_header(std::size_t n) {
  std::string h = "t";
  for (const char* prefix : {"x_", "y_"}) {
    for (std::size_t j = 1; j <= n; ++j) h += "," + std::string(prefix) + std::to_string(j);
  }
  h += ",observed_loss";
  for (std::size_t j = 1; j <= n; ++j) h += ",fhat_" + std::to_string(j);
  h += ",cum_loss,cum_regret";
  return h;
}

/// One row per round, t counted from 1, full-precision decimals.
inline void write_trace_csv(std::ostream& out, const RunTrace& trace) {
  out << trace_csv_header(trace.dimension) << '\n';
  for (const auto& r : trace.rounds) {
    out << (r.round + 1);
    for (const Vector* v : {&r.center, &r.played}) {
      for (Eigen::Index j = 0; j < v->size(); ++j) out << ',' << format_number((*v)(j));
    }
    out << ',' << format_number(r.observed_loss);
    for (Eigen::Index j = 0; j < r.estimate.size(); ++j) out << ',' << format_number(r.estimate(j));
    out << ',' << format_number(r.cumulative_true_loss) << ',' << format_number(r.cumulative_regret) << '\n';
  }
}

inline void write_trace_csv(const std::filesystem::path& path, const RunTrace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_trace_csv(out, trace);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace scrible
