#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "maxplus/matrix.hpp"

namespace maxplus {

/// Maximal circuit mean as an exact ratio (weight per arc).
struct CircuitMean {
  double num = 0.0;  // circuit weight (integral when the kernel is integral)
  int den = 1;       // circuit length
  double value() const { return num / den; }
};

namespace detail {

struct SccResult {
  std::vector<int> comp;  // node -> component id
  int count = 0;
};

// Iterative Tarjan over the stored arcs.
inline SccResult strongly_connected_components(const TropMatrix& a) {
  const int n = a.size();
  SccResult res;
  res.comp.assign(n, -1);
  std::vector<int> index(n, -1), low(n, 0), on_stack(n, 0), stack, call_node, call_edge;
  std::vector<std::vector<int>> adj(n);
  a.for_each([&](int i, int j, Trop) { adj[i].push_back(j); });
  int next_index = 0;
  for (int root = 0; root < n; ++root) {
    if (index[root] != -1) continue;
    call_node.assign(1, root);
    call_edge.assign(1, 0);
    index[root] = low[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call_node.empty()) {
      int v = call_node.back();
      int& ei = call_edge.back();
      if (ei < static_cast<int>(adj[v].size())) {
        int w = adj[v][ei++];
        if (index[w] == -1) {
          index[w] = low[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = 1;
          call_node.push_back(w);
          call_edge.push_back(0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
      } else {
        call_node.pop_back();
        call_edge.pop_back();
        if (!call_node.empty()) low[call_node.back()] = std::min(low[call_node.back()], low[v]);
        if (low[v] == index[v]) {
          while (true) {
            int w = stack.back();
            stack.pop_back();
            on_stack[w] = 0;
            res.comp[w] = res.count;
            if (w == v) break;
          }
          ++res.count;
        }
      }
    }
  }
  return res;
}

// Karp's max-mean-cycle formula on one strongly connected component.
// Returns nothing when the component carries no circuit.
inline std::optional<CircuitMean> karp_component(const TropMatrix& a,
                                                 const std::vector<int>& nodes) {
  const double ninf = -std::numeric_limits<double>::infinity();
  const int ns = static_cast<int>(nodes.size());
  std::vector<int> local(a.size(), -1);
  for (int i = 0; i < ns; ++i) local[nodes[i]] = i;
  std::vector<std::vector<std::pair<int, double>>> adj(ns);
  bool has_arc = false;
  for (int i = 0; i < ns; ++i)
    a.for_each_in_row(nodes[i], [&](int j, Trop w) {
      if (local[j] >= 0) {
        adj[i].push_back({local[j], w.v});
        has_arc = true;
      }
    });
  if (!has_arc) return std::nullopt;

  // D[k][v]: best weight of a k-arc walk from node 0 of the component.
  std::vector<std::vector<double>> D(ns + 1, std::vector<double>(ns, ninf));
  D[0][0] = 0.0;
  for (int k = 1; k <= ns; ++k)
    for (int v = 0; v < ns; ++v) {
      if (D[k - 1][v] == ninf) continue;
      for (const auto& [w, wt] : adj[v])
        if (D[k - 1][v] + wt > D[k][w]) D[k][w] = D[k - 1][v] + wt;
    }

  std::optional<CircuitMean> best;
  for (int v = 0; v < ns; ++v) {
    if (D[ns][v] == ninf) continue;
    std::optional<CircuitMean> worst;  // min over k of (D[ns][v]-D[k][v])/(ns-k)
    for (int k = 0; k < ns; ++k) {
      if (D[k][v] == ninf) continue;
      CircuitMean cand{D[ns][v] - D[k][v], ns - k};
      if (!worst || cand.num * worst->den < worst->num * cand.den) worst = cand;
    }
    if (worst && (!best || worst->num * best->den > best->num * worst->den)) best = worst;
  }
  return best;
}

// Floyd-Warshall positive-length closure (no identity seeded); valid when
// every circuit of m has non-positive weight, which holds for the scaled
// kernels used below.
inline std::vector<double> plus_closure_dense(const TropMatrix& m) {
  const int n = m.size();
  std::vector<double> d(static_cast<size_t>(n) * n,
                        -std::numeric_limits<double>::infinity());
  m.for_each([&](int i, int j, Trop w) {
    if (w.v > d[static_cast<size_t>(i) * n + j]) d[static_cast<size_t>(i) * n + j] = w.v;
  });
  for (int k = 0; k < n; ++k) {
    const double* dk = d.data() + static_cast<size_t>(k) * n;
    for (int i = 0; i < n; ++i) {
      double dik = d[static_cast<size_t>(i) * n + k];
      if (dik == -std::numeric_limits<double>::infinity()) continue;
      double* di = d.data() + static_cast<size_t>(i) * n;
      for (int j = 0; j < n; ++j) {
        double cand = dik + dk[j];
        if (cand > di[j]) di[j] = cand;
      }
    }
  }
  return d;
}

}  // namespace detail

/// Maximal circuit mean rho(A) as a ratio; empty when the graph is acyclic.
inline std::optional<CircuitMean> max_circuit_mean_exact(const TropMatrix& a) {
  auto scc = detail::strongly_connected_components(a);
  std::vector<std::vector<int>> members(scc.count);
  for (int i = 0; i < a.size(); ++i) members[scc.comp[i]].push_back(i);
  std::optional<CircuitMean> best;
  for (const auto& nodes : members) {
    auto m = detail::karp_component(a, nodes);
    if (m && (!best || m->num * best->den > best->num * m->den)) best = m;
  }
  return best;
}

inline Trop max_circuit_mean(const TropMatrix& a) {
  auto m = max_circuit_mean_exact(a);
  return m ? Trop(m->value()) : Trop::zero();
}

/// Spectral summary: rho, the normalized kernel, recurrent nodes and the
/// recurrence classes (i ~ j when some mean-rho circuit passes through both).
struct SpectralData {
  Trop rho = Trop::zero();
  std::optional<CircuitMean> rho_exact;
  TropMatrix normalized;              // rho^{-1} A; equals A when acyclic
  std::vector<bool> recurrent;
  std::vector<int> class_of;          // node -> class id, -1 when non-recurrent
  std::vector<std::vector<int>> classes;

  bool is_recurrent(int i) const { return recurrent[i]; }
  bool rho_is_one(EqTol eq) const { return eq.is_one(rho); }
};

inline SpectralData spectral_data(const TropMatrix& a, EqTol eq = EqTol::exact()) {
  SpectralData sd;
  sd.normalized = a;
  sd.recurrent.assign(a.size(), false);
  sd.class_of.assign(a.size(), -1);
  auto mean = max_circuit_mean_exact(a);
  if (!mean) return sd;  // acyclic: rho = -inf, recurrent set empty
  sd.rho = Trop(mean->value());
  sd.rho_exact = mean;

  const int n = a.size();
  TropMatrix normalized(a.labels());
  a.for_each([&](int i, int j, Trop w) { normalized.set(i, j, Trop(w.v - mean->value())); });
  sd.normalized = normalized;

  // Recurrence is decided on den*A - num, whose circuit weights are integral
  // whenever A is, so the "normalized diagonal equals the unit" test stays
  // exact in integer mode even for means like -1/3.
  TropMatrix scaled(a.labels());
  a.for_each([&](int i, int j, Trop w) {
    scaled.set(i, j, Trop(w.v * mean->den - mean->num));
  });
  const double stol = eq.tol * mean->den;
  std::vector<double> d = detail::plus_closure_dense(scaled);

  for (int i = 0; i < n; ++i) {
    double dii = d[static_cast<size_t>(i) * n + i];
    if (dii == -std::numeric_limits<double>::infinity()) continue;
    if (dii > stol)
      raise(errc::numerical_divergence,
            "normalized closure diverges at node " + a.label(i));
    if (std::fabs(dii) <= stol) sd.recurrent[i] = true;
  }
  for (int i = 0; i < n; ++i) {
    if (!sd.recurrent[i] || sd.class_of[i] >= 0) continue;
    int cid = static_cast<int>(sd.classes.size());
    sd.classes.push_back({i});
    sd.class_of[i] = cid;
    for (int j = i + 1; j < n; ++j) {
      if (!sd.recurrent[j] || sd.class_of[j] >= 0) continue;
      double ij = d[static_cast<size_t>(i) * n + j];
      double ji = d[static_cast<size_t>(j) * n + i];
      if (ij == -std::numeric_limits<double>::infinity() ||
          ji == -std::numeric_limits<double>::infinity())
        continue;
      if (std::fabs(ij + ji) <= stol) {
        sd.class_of[j] = cid;
        sd.classes[cid].push_back(j);
      }
    }
  }
  return sd;
}

struct RhoBoundReport {
  bool ok = true;
  std::vector<std::string> witness_circuit;  // closed node sequence when violated
};

/// A validated left super-harmonic row forces rho(A) <= 1. A violation
/// indicates a broken pi and is reported with a witness circuit.
inline RhoBoundReport check_rho_bound(const TropMatrix& a, EqTol eq = EqTol::exact()) {
  RhoBoundReport rep;
  auto mean = max_circuit_mean_exact(a);
  if (!mean || mean->value() <= eq.tol) return rep;
  rep.ok = false;

  const int n = a.size();
  TropMatrix scaled(a.labels());
  a.for_each([&](int i, int j, Trop w) { scaled.set(i, j, Trop(w.v * mean->den - mean->num)); });
  const double stol = eq.tol * mean->den + 1e-12;
  std::vector<double> d = detail::plus_closure_dense(scaled);
  auto dist = [&](int i, int j) { return d[static_cast<size_t>(i) * n + j]; };

  int start = -1;
  for (int i = 0; i < n && start < 0; ++i)
    if (dist(i, i) != -std::numeric_limits<double>::infinity() &&
        std::fabs(dist(i, i)) <= stol)
      start = i;
  if (start < 0) return rep;

  // Walk a zero-weight closed path of the scaled kernel starting at `start`.
  rep.witness_circuit.push_back(a.label(start));
  int v = start;
  for (int guard = 0; guard <= n; ++guard) {
    int next = -1;
    scaled.for_each_in_row(v, [&](int j, Trop w) {
      if (next >= 0) return;
      double rest = (j == start) ? 0.0 : dist(j, start);
      double need = (v == start) ? 0.0 : dist(v, start);
      if (rest == -std::numeric_limits<double>::infinity()) return;
      if (std::fabs(w.v + rest - need) <= stol) next = j;
    });
    if (next < 0) break;
    rep.witness_circuit.push_back(a.label(next));
    v = next;
    if (v == start) break;
  }
  return rep;
}

}  // namespace maxplus
