#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "maxplus/errors.hpp"

namespace maxplus {

/// Structured node of a rule-based kernel: up to three integer coordinates.
struct Node {
  std::array<int, 3> c{0, 0, 0};

  Node() = default;
  Node(int a) : c{a, 0, 0} {}
  Node(int a, int b) : c{a, b, 0} {}
  Node(int a, int b, int d) : c{a, b, d} {}

  bool operator==(const Node&) const = default;
  bool operator<(const Node& o) const { return c < o.c; }
};

struct NodeHash {
  size_t operator()(const Node& n) const {
    uint64_t h = 1469598103934665603ull;
    for (int x : n.c) {
      h ^= static_cast<uint64_t>(static_cast<uint32_t>(x));
      h *= 1099511628211ull;
    }
    return static_cast<size_t>(h);
  }
};

using Arc = std::pair<Node, double>;

/// Generator of an infinite (or very large) kernel: a coordinate codec plus
/// a finite weighted-neighbor function, truncatable to balls around the
/// basepoint.
struct KernelRule {
  std::string name;
  int dim = 1;
  Node basepoint;
  bool symmetric = false;
  int max_out_degree = 0;  // row-finiteness certificate; 0 = unspecified
  std::function<void(const Node&, std::vector<Arc>&)> neighbors;

  std::string label(const Node& n) const {
    if (dim == 1) return std::to_string(n.c[0]);
    std::string s = "(" + std::to_string(n.c[0]) + "," + std::to_string(n.c[1]);
    if (dim == 3) s += "," + std::to_string(n.c[2]);
    return s + ")";
  }

  Node parse_label(const std::string& s) const;

  /// Same kernel with every weight shifted by -lambda (the kernel
  /// lambda^{-1} A of eigen-problems).
  KernelRule shifted(double lambda) const {
    KernelRule r = *this;
    auto base = neighbors;
    r.name = name + "-shift";
    r.neighbors = [base, lambda](const Node& n, std::vector<Arc>& out) {
      base(n, out);
      for (auto& a : out) a.second -= lambda;
    };
    return r;
  }
};

inline Node KernelRule::parse_label(const std::string& s) const {
  Node n;
  if (dim == 1) {
    n.c[0] = std::atoi(s.c_str());
    return n;
  }
  std::string t = s;
  if (!t.empty() && t.front() == '(') t = t.substr(1, t.size() - 2);
  int i = 0;
  size_t pos = 0;
  while (i < dim) {
    size_t comma = t.find(',', pos);
    std::string part = comma == std::string::npos ? t.substr(pos) : t.substr(pos, comma - pos);
    n.c[i++] = std::atoi(part.c_str());
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return n;
}

// ---------------------------------------------------------------------------
// Built-in rules reproducing the closed-form example kernels.

/// Bidirectional integer line, every arc weight -1.
inline KernelRule rule_z() {
  KernelRule r;
  r.name = "z";
  r.dim = 1;
  r.symmetric = true;
  r.max_out_degree = 2;
  r.neighbors = [](const Node& n, std::vector<Arc>& out) {
    out.push_back({Node(n.c[0] + 1), -1.0});
    out.push_back({Node(n.c[0] - 1), -1.0});
  };
  return r;
}

/// Integer lattice Z^2 with unit arcs of weight -1 (l1 geometry).
inline KernelRule rule_z2() {
  KernelRule r;
  r.name = "z2";
  r.dim = 2;
  r.symmetric = true;
  r.max_out_degree = 4;
  r.neighbors = [](const Node& n, std::vector<Arc>& out) {
    out.push_back({Node(n.c[0] + 1, n.c[1]), -1.0});
    out.push_back({Node(n.c[0] - 1, n.c[1]), -1.0});
    out.push_back({Node(n.c[0], n.c[1] + 1), -1.0});
    out.push_back({Node(n.c[0], n.c[1] - 1), -1.0});
  };
  return r;
}

/// One-way line on N with weight-0 forward arcs and weight -1 returns to 0.
inline KernelRule rule_ex1() {
  KernelRule r;
  r.name = "ex1";
  r.dim = 1;
  r.symmetric = false;
  r.max_out_degree = 2;
  r.neighbors = [](const Node& n, std::vector<Arc>& out) {
    out.push_back({Node(n.c[0] + 1), 0.0});
    if (n.c[0] >= 1) out.push_back({Node(0), -1.0});
  };
  return r;
}

/// rule_ex1 plus a weight-0 self loop at node 0, making 0 recurrent.
inline KernelRule rule_ex2() {
  KernelRule r = rule_ex1();
  r.name = "ex2";
  r.neighbors = [](const Node& n, std::vector<Arc>& out) {
    out.push_back({Node(n.c[0] + 1), 0.0});
    if (n.c[0] >= 1)
      out.push_back({Node(0), -1.0});
    else
      out.push_back({Node(0), 0.0});
  };
  return r;
}

/// Half-plane {(i,j) : i >= j >= 1} with horizontal weight -1, vertical
/// weight -2 arcs, and diagonal shortcuts (1,1) <-> (i,i) of weight -1/i.
/// The shortcut fan at (1,1) is capped to keep rows finite.
inline KernelRule rule_triangle(int diag_cap) {
  KernelRule r;
  r.name = "triangle";
  r.dim = 2;
  r.basepoint = Node(1, 1);
  r.symmetric = true;
  r.max_out_degree = diag_cap + 4;
  r.neighbors = [diag_cap](const Node& n, std::vector<Arc>& out) {
    int i = n.c[0], j = n.c[1];
    auto inside = [](int a, int b) { return a >= b && b >= 1; };
    if (inside(i + 1, j)) out.push_back({Node(i + 1, j), -1.0});
    if (inside(i - 1, j)) out.push_back({Node(i - 1, j), -1.0});
    if (inside(i, j + 1)) out.push_back({Node(i, j + 1), -2.0});
    if (inside(i, j - 1)) out.push_back({Node(i, j - 1), -2.0});
    if (i == 1 && j == 1) {
      for (int k = 2; k <= diag_cap; ++k) out.push_back({Node(k, k), -1.0 / k});
    } else if (i == j && i >= 2 && i <= diag_cap) {
      out.push_back({Node(1, 1), -1.0 / i});
    }
  };
  return r;
}

/// Three half-lines N x {0,1,2}: rows 0 and 2 carry horizontal arcs, the
/// middle row only connects vertically; all weights -1.
inline KernelRule rule_tripod() {
  KernelRule r;
  r.name = "tripod";
  r.dim = 2;
  r.basepoint = Node(0, 1);
  r.symmetric = true;
  r.max_out_degree = 4;
  r.neighbors = [](const Node& n, std::vector<Arc>& out) {
    int i = n.c[0], j = n.c[1];
    if (j == 0 || j == 2) {
      out.push_back({Node(i + 1, j), -1.0});
      if (i >= 1) out.push_back({Node(i - 1, j), -1.0});
      out.push_back({Node(i, 1), -1.0});
    } else {
      out.push_back({Node(i, 0), -1.0});
      out.push_back({Node(i, 2), -1.0});
    }
  };
  return r;
}

/// N x N x {0,1}: a doubled spine (j = 0) with rungs of weight -2, and at
/// every spine point a pair of half-line spikes with rungs of weight -1.
inline KernelRule rule_hedgehog() {
  KernelRule r;
  r.name = "hedgehog";
  r.dim = 3;
  r.symmetric = true;
  r.max_out_degree = 4;
  r.neighbors = [](const Node& n, std::vector<Arc>& out) {
    int i = n.c[0], j = n.c[1], k = n.c[2];
    out.push_back({Node(i, j + 1, k), -1.0});
    if (j >= 1) out.push_back({Node(i, j - 1, k), -1.0});
    if (j >= 1)
      out.push_back({Node(i, j, 1 - k), -1.0});
    else
      out.push_back({Node(i, j, 1 - k), -2.0});
    if (j == 0) {
      out.push_back({Node(i + 1, 0, k), -1.0});
      if (i >= 1) out.push_back({Node(i - 1, 0, k), -1.0});
    }
  };
  return r;
}

/// Line on N with weight -1 steps plus weight-0 arcs from node 0 to every
/// node i >= 1 (capped fan). The reference row is not tight here.
inline KernelRule rule_nontight(int fan_cap) {
  KernelRule r;
  r.name = "nontight";
  r.dim = 1;
  r.symmetric = false;
  r.max_out_degree = fan_cap + 2;
  r.neighbors = [fan_cap](const Node& n, std::vector<Arc>& out) {
    int i = n.c[0];
    out.push_back({Node(i + 1), -1.0});
    if (i >= 1) out.push_back({Node(i - 1), -1.0});
    if (i == 0)
      for (int k = 1; k <= fan_cap; ++k) out.push_back({Node(k), 0.0});
  };
  return r;
}

/// Rule file: {"dim": d, "basepoint": [..], "symmetric": bool,
///             "offsets": [{"d": [..], "w": -1.0}, ...],
///             "bounds": [[lo|null, hi|null], ...] }  (optional per-axis box)
inline KernelRule rule_from_json(const nlohmann::json& j) {
  KernelRule r;
  r.name = j.value("name", "file");
  r.dim = j.at("dim").get<int>();
  if (r.dim < 1 || r.dim > 3) raise(errc::parse_error, "rule dim must be 1..3");
  if (j.contains("basepoint")) {
    auto bp = j.at("basepoint");
    for (int i = 0; i < r.dim; ++i) r.basepoint.c[i] = bp.at(i).get<int>();
  }
  r.symmetric = j.value("symmetric", false);
  struct Off {
    std::array<int, 3> d{0, 0, 0};
    double w;
  };
  auto offsets = std::make_shared<std::vector<Off>>();
  for (const auto& o : j.at("offsets")) {
    Off off;
    auto dv = o.at("d");
    for (int i = 0; i < r.dim && i < static_cast<int>(dv.size()); ++i)
      off.d[i] = dv.at(i).get<int>();
    off.w = o.at("w").get<double>();
    if (!std::isfinite(off.w)) raise(errc::parse_error, "rule weights must be finite");
    offsets->push_back(off);
  }
  r.max_out_degree = static_cast<int>(offsets->size());
  struct Bound {
    bool has_lo = false, has_hi = false;
    int lo = 0, hi = 0;
  };
  auto bounds = std::make_shared<std::array<Bound, 3>>();
  if (j.contains("bounds")) {
    auto bj = j.at("bounds");
    for (int i = 0; i < r.dim && i < static_cast<int>(bj.size()); ++i) {
      if (!bj.at(i).at(0).is_null()) {
        (*bounds)[i].has_lo = true;
        (*bounds)[i].lo = bj.at(i).at(0).get<int>();
      }
      if (!bj.at(i).at(1).is_null()) {
        (*bounds)[i].has_hi = true;
        (*bounds)[i].hi = bj.at(i).at(1).get<int>();
      }
    }
  }
  int dim = r.dim;
  r.neighbors = [offsets, bounds, dim](const Node& n, std::vector<Arc>& out) {
    auto ok = [&](const Node& m) {
      for (int i = 0; i < dim; ++i) {
        if ((*bounds)[i].has_lo && m.c[i] < (*bounds)[i].lo) return false;
        if ((*bounds)[i].has_hi && m.c[i] > (*bounds)[i].hi) return false;
      }
      return true;
    };
    if (!ok(n)) return;
    for (const auto& off : *offsets) {
      Node m = n;
      for (int i = 0; i < dim; ++i) m.c[i] += off.d[i];
      if (ok(m)) out.push_back({m, off.w});
    }
  };
  return r;
}

/// Built-in rule lookup used by the CLI; caps scale with the requested
/// truncation so the capped fans stay faithful inside the ball.
inline KernelRule builtin_rule(const std::string& name, int radius_hint) {
  int cap = std::max(4 * radius_hint, 64);
  if (name == "z") return rule_z();
  if (name == "z2") return rule_z2();
  if (name == "ex1") return rule_ex1();
  if (name == "ex2") return rule_ex2();
  if (name == "triangle") return rule_triangle(cap);
  if (name == "tripod") return rule_tripod();
  if (name == "hedgehog") return rule_hedgehog();
  if (name == "nontight") return rule_nontight(cap);
  raise(errc::parse_error, "unknown rule " + name);
}

}  // namespace maxplus
