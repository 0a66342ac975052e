#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "maxplus/matrix.hpp"

namespace maxplus {

// Edge-list text format: one `src dst weight` per line, `#` starts a
// comment, node ids are arbitrary non-whitespace tokens, absent edges are
// the semiring zero. Duplicate edges: last one wins.

struct ParsedEdge {
  std::string src, dst;
  double w;
};

namespace io_detail {

inline bool parse_weight(const std::string& tok, double& out) {
  // input weights are finite reals; +/-inf never parse
  std::istringstream is(tok);
  is >> out;
  if (is.fail() || !is.eof()) return false;
  return std::isfinite(out);
}

inline TropMatrix assemble(const std::vector<ParsedEdge>& edges,
                           const std::vector<std::string>& extra_nodes) {
  std::vector<std::string> labels;
  std::unordered_map<std::string, int> seen;
  auto add = [&](const std::string& l) {
    if (seen.emplace(l, 1).second) labels.push_back(l);
  };
  for (const auto& n : extra_nodes) add(n);
  for (const auto& e : edges) {
    add(e.src);
    add(e.dst);
  }
  std::sort(labels.begin(), labels.end());
  TropMatrix m(labels);
  for (const auto& e : edges) m.set(m.index_of(e.src), m.index_of(e.dst), Trop(e.w));
  return m;
}

}  // namespace io_detail

inline TropMatrix parse_graph_text(std::istream& in,
                                   const std::vector<std::string>& extra_nodes = {}) {
  std::vector<ParsedEdge> edges;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream is(line);
    std::string src, dst, wtok;
    if (!(is >> src)) continue;  // blank line
    if (!(is >> dst >> wtok))
      raise(errc::parse_error, "expected `src dst weight` at line " + std::to_string(lineno));
    std::string rest;
    if (is >> rest)
      raise(errc::parse_error, "trailing tokens at line " + std::to_string(lineno));
    double w;
    if (!io_detail::parse_weight(wtok, w))
      raise(errc::parse_error,
            "bad weight '" + wtok + "' at line " + std::to_string(lineno));
    edges.push_back({src, dst, w});
  }
  return io_detail::assemble(edges, extra_nodes);
}

inline TropMatrix parse_graph_json(const nlohmann::json& j) {
  std::vector<std::string> nodes;
  if (j.contains("nodes"))
    for (const auto& n : j.at("nodes")) nodes.push_back(n.get<std::string>());
  std::vector<ParsedEdge> edges;
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 3)
      raise(errc::parse_error, "edge entries must be [src, dst, weight]");
    if (!e[2].is_number())
      raise(errc::parse_error, "edge weight must be a finite number");
    edges.push_back({e[0].get<std::string>(), e[1].get<std::string>(),
                     e[2].get<double>()});
  }
  return io_detail::assemble(edges, nodes);
}

inline TropMatrix parse_graph_file(const std::string& path,
                                   const std::vector<std::string>& extra_nodes = {}) {
  std::ifstream in(path);
  if (!in) raise(errc::parse_error, "cannot open graph file " + path);
  if (path.size() > 5 && path.substr(path.size() - 5) == ".json") {
    nlohmann::json j;
    try {
      in >> j;
    } catch (const std::exception& ex) {
      raise(errc::parse_error, std::string("bad JSON: ") + ex.what());
    }
    return parse_graph_json(j);
  }
  return parse_graph_text(in, extra_nodes);
}

inline void emit_graph_text(const TropMatrix& m, std::ostream& out) {
  // deterministic: labels are already ordered, rows in label order
  m.for_each([&](int i, int j, Trop w) {
    if (!w.finite())
      raise(errc::parse_error, "text format carries finite weights only");
    out << m.label(i) << ' ' << m.label(j) << ' ' << to_string(w) << '\n';
  });
}

/// `node value` per line; every node must exist in the companion matrix.
/// Nodes not mentioned get the semiring zero.
inline TropVector parse_vector_text(std::istream& in, const TropMatrix& m) {
  TropVector u(m.size(), Trop::zero());
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream is(line);
    std::string node, wtok;
    if (!(is >> node)) continue;
    if (!(is >> wtok))
      raise(errc::parse_error, "expected `node value` at line " + std::to_string(lineno));
    int idx = m.index_of(node);
    if (idx < 0)
      raise(errc::parse_error,
            "unknown node '" + node + "' at line " + std::to_string(lineno));
    double w;
    if (!io_detail::parse_weight(wtok, w))
      raise(errc::parse_error, "bad value '" + wtok + "' at line " + std::to_string(lineno));
    u[idx] = Trop(w);
  }
  return u;
}

inline TropVector parse_vector_file(const std::string& path, const TropMatrix& m) {
  std::ifstream in(path);
  if (!in) raise(errc::parse_error, "cannot open vector file " + path);
  return parse_vector_text(in, m);
}

inline void emit_vector_text(const TropMatrix& m, const TropVector& u, std::ostream& out) {
  for (int i = 0; i < m.size(); ++i)
    if (!u[i].is_zero()) out << m.label(i) << ' ' << to_string(u[i]) << '\n';
}

/// JSON value for a tropical scalar: -inf as null, +inf as "inf".
inline nlohmann::ordered_json trop_to_json(Trop t) {
  if (t.is_zero()) return nullptr;
  if (t.is_top()) return "inf";
  return t.v;
}

inline nlohmann::ordered_json matrix_to_json(const TropMatrix& m) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (int i = 0; i < m.size(); ++i) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (int j = 0; j < m.size(); ++j) row.push_back(trop_to_json(m.at(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline nlohmann::ordered_json vector_to_json(const TropVector& u) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const Trop& t : u) arr.push_back(trop_to_json(t));
  return arr;
}

}  // namespace maxplus
