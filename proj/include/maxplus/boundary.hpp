#pragma once

#include <algorithm>
#include <deque>
#include <unordered_map>
#include <vector>

#include "maxplus/matrix.hpp"
#include "maxplus/rule.hpp"
#include "maxplus/spectral.hpp"

namespace maxplus {

/// Finite window onto a rule-based kernel: all nodes within `radius` arcs
/// of the basepoint, arcs leaving the ball dropped.
struct BallTruncation {
  int radius = 0;
  int inner_radius = 0;
  std::vector<Node> nodes;                       // BFS order, lex tie-break
  std::vector<int> dist;                         // arc distance from basepoint
  std::unordered_map<Node, int, NodeHash> index;
  std::vector<std::vector<std::pair<int, double>>> out_arcs;
  std::vector<std::vector<std::pair<int, double>>> in_arcs;
  TropMatrix matrix;

  int basepoint_index() const { return 0; }
  int index_of(const Node& n) const {
    auto it = index.find(n);
    return it == index.end() ? -1 : it->second;
  }
};

inline BallTruncation truncate(const KernelRule& rule, int radius,
                               int node_cap = 200000) {
  if (radius < 1) raise(errc::parse_error, "truncation radius must be >= 1");
  BallTruncation t;
  t.radius = radius;
  t.inner_radius = radius;
  t.nodes.push_back(rule.basepoint);
  t.dist.push_back(0);
  t.index.emplace(rule.basepoint, 0);
  std::vector<Arc> buf;
  // BFS by layers; sort each frontier for a deterministic node order.
  std::vector<Node> frontier{rule.basepoint};
  for (int d = 1; d <= radius && !frontier.empty(); ++d) {
    std::vector<Node> next;
    for (const Node& n : frontier) {
      buf.clear();
      rule.neighbors(n, buf);
      for (const auto& [m, w] : buf)
        if (!t.index.count(m)) {
          t.index.emplace(m, -1);  // mark seen; indices assigned after sort
          next.push_back(m);
        }
    }
    std::sort(next.begin(), next.end());
    for (const Node& m : next) {
      if (static_cast<int>(t.nodes.size()) >= node_cap)
        raise(errc::ball_too_large,
              "truncation exceeds node cap of " + std::to_string(node_cap));
      t.index[m] = static_cast<int>(t.nodes.size());
      t.nodes.push_back(m);
      t.dist.push_back(d);
    }
    frontier = std::move(next);
  }
  const int n = static_cast<int>(t.nodes.size());
  std::vector<std::string> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = rule.label(t.nodes[i]);
  t.matrix = TropMatrix(labels);
  t.out_arcs.resize(n);
  t.in_arcs.resize(n);
  for (int i = 0; i < n; ++i) {
    buf.clear();
    rule.neighbors(t.nodes[i], buf);
    for (const auto& [m, w] : buf) {
      int j = t.index_of(m);
      if (j < 0) continue;  // arc leaves the ball
      t.out_arcs[i].push_back({j, w});
      t.in_arcs[j].push_back({i, w});
      t.matrix.set(i, j, oplus(t.matrix.at(i, j), Trop(w)));
    }
  }
  return t;
}

namespace detail {

// Label-correcting longest path (maximal path weight), one source. The
// relaxation counter guards against strictly positive circuits.
inline std::vector<double> longest_paths(
    const std::vector<std::vector<std::pair<int, double>>>& arcs, int src) {
  const int n = static_cast<int>(arcs.size());
  const double ninf = -std::numeric_limits<double>::infinity();
  std::vector<double> d(n, ninf);
  std::vector<int> in_queue(n, 0), relaxed(n, 0);
  std::deque<int> q;
  d[src] = 0.0;
  q.push_back(src);
  in_queue[src] = 1;
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    in_queue[v] = 0;
    if (++relaxed[v] > n + 1)
      raise(errc::divergent_star, "positive circuit: path weights diverge");
    for (const auto& [w, wt] : arcs[v]) {
      double cand = d[v] + wt;
      if (cand > d[w]) {
        d[w] = cand;
        if (!in_queue[w]) {
          // slight LIFO bias keeps lattice sweeps short
          if (!q.empty() && d[w] > d[q.front()])
            q.push_front(w);
          else
            q.push_back(w);
          in_queue[w] = 1;
        }
      }
    }
  }
  return d;
}

}  // namespace detail

/// Row of the closure: A*_{src, .} on the truncation.
inline std::vector<double> star_row(const BallTruncation& t, int src) {
  return detail::longest_paths(t.out_arcs, src);
}

/// Column of the closure: A*_{., dst} on the truncation.
inline std::vector<double> star_column(const BallTruncation& t, int dst) {
  return detail::longest_paths(t.in_arcs, dst);
}

/// Column of the positive-length closure A+_{., dst}.
inline std::vector<double> plus_column(const BallTruncation& t, int dst) {
  std::vector<double> star = star_column(t, dst);
  const double ninf = -std::numeric_limits<double>::infinity();
  std::vector<double> out(star.size(), ninf);
  for (size_t i = 0; i < t.out_arcs.size(); ++i)
    for (const auto& [j, w] : t.out_arcs[i]) {
      double cand = (star[j] == ninf) ? ninf : w + star[j];
      if (cand > out[i]) out[i] = cand;
    }
  return out;
}

// ---------------------------------------------------------------------------
// Almost-geodesics

enum class GeodesicMode { LeftPi, RightVector };

struct SlackReport {
  bool ok = true;
  int first_violation = -1;          // prefix index of the first failure
  std::vector<double> p;             // per-prefix deficit; inequality is p_k <= alpha
};

/// Checks the defining almost-geodesic inequality along every prefix of the
/// path. In LeftPi mode the reference row from the basepoint is used; in
/// RightVector mode a super-harmonic vector given on the truncation is.
inline SlackReport almost_geodesic_check(const KernelRule& rule,
                                         const std::vector<Node>& path, double alpha,
                                         GeodesicMode mode = GeodesicMode::LeftPi,
                                         const std::vector<double>* u = nullptr,
                                         const BallTruncation* trunc = nullptr,
                                         int margin = 5) {
  if (alpha < 0.0) raise(errc::parse_error, "alpha must be >= 1 (additively >= 0)");
  if (path.empty()) raise(errc::not_a_path, "empty path");

  BallTruncation local;
  const BallTruncation* t = trunc;
  if (!t) {
    // grow the ball until the whole path fits, then add the margin
    int r = 1;
    for (int attempt = 0; attempt < 32; ++attempt) {
      local = truncate(rule, r + margin);
      bool all = true;
      for (const Node& n : path)
        if (local.index_of(n) < 0) all = false;
      if (all) break;
      r *= 2;
    }
    t = &local;
  }
  std::vector<int> idx(path.size());
  for (size_t k = 0; k < path.size(); ++k) {
    idx[k] = t->index_of(path[k]);
    if (idx[k] < 0) raise(errc::not_a_path, "path leaves the truncation at step " + std::to_string(k));
  }
  auto arc_weight = [&](int a, int b, size_t step) {
    Trop w = t->matrix.at(a, b);  // kernel entry: max over parallel arcs
    if (w.is_zero())
      raise(errc::not_a_path,
            "consecutive path nodes are not neighbors at step " + std::to_string(step));
    return w.v;
  };

  std::vector<double> ref(t->nodes.size());
  if (mode == GeodesicMode::LeftPi) {
    ref = star_row(*t, t->basepoint_index());
  } else {
    if (!u || u->size() != t->nodes.size())
      raise(errc::dimension_mismatch, "vector mode needs u on the truncation");
    ref = *u;
  }

  SlackReport rep;
  double acc = 0.0;  // sum of arc weights along the prefix
  rep.p.push_back(0.0);
  for (size_t k = 1; k < path.size(); ++k) {
    acc += arc_weight(idx[k - 1], idx[k], k);
    double p;
    if (mode == GeodesicMode::LeftPi)
      p = ref[idx[k]] - (ref[idx[0]] + acc);   // pi_{i_k} <= alpha pi_{i_0} prod A
    else
      p = ref[idx[0]] - (acc + ref[idx[k]]);   // u_{i_0} <= alpha prod A u_{i_k}
    rep.p.push_back(p);
    if (p > alpha + 1e-12 && rep.ok) {
      rep.ok = false;
      rep.first_violation = static_cast<int>(k);
    }
  }
  return rep;
}

/// Arc-length parametrised almost-geodesic test in the sense of metric
/// boundaries: |d(g_k, g_l) + d(g_l, g_0) - t_k| < eps for all l <= k,
/// with t_k the distance from the basepoint. Needs a symmetric rule.
struct RieffelReport {
  bool ok = true;
  int bad_k = -1, bad_l = -1;
  double worst = 0.0;
};

inline RieffelReport rieffel_check(const KernelRule& rule, const std::vector<Node>& path,
                                   double eps, int margin = 5) {
  if (!rule.symmetric)
    raise(errc::not_metric, "rieffel check requires a symmetric rule inducing a metric");
  if (path.size() < 2) raise(errc::not_a_path, "path too short");
  BallTruncation t;
  int r = 2;
  for (int attempt = 0; attempt < 32; ++attempt) {
    t = truncate(rule, r + margin);
    bool all = true;
    for (const Node& n : path)
      if (t.index_of(n) < 0) all = false;
    if (all) break;
    r *= 2;
  }
  const int m = static_cast<int>(path.size());
  std::vector<int> idx(m);
  for (int k = 0; k < m; ++k) idx[k] = t.index_of(path[k]);
  // pairwise distances via one solve per path node
  std::vector<std::vector<double>> from(m);
  for (int k = 0; k < m; ++k) from[k] = star_row(t, idx[k]);
  std::vector<double> base = star_row(t, t.basepoint_index());
  RieffelReport rep;
  for (int k = 0; k < m; ++k)
    for (int l = 0; l <= k; ++l) {
      double d_kl = -from[l][idx[k]];        // d(g_l, g_k), symmetric kernel
      double d_l0 = -from[l][idx[0]];
      double tk = -base[idx[k]];
      double dev = std::fabs(d_kl + d_l0 - tk);
      if (dev > rep.worst) {
        rep.worst = dev;
        if (dev >= eps) {
          rep.ok = false;
          rep.bad_k = k;
          rep.bad_l = l;
        }
      }
    }
  return rep;
}

// ---------------------------------------------------------------------------
// Column limits

/// Window-restricted estimate of a Martin-space point: the values of
/// K_{., j_k} on the window for the last few targets j_k.
struct BoundaryEstimate {
  std::vector<Node> window;        // evaluation window (ball order)
  std::vector<double> values;      // limit estimate per window node
  std::vector<Node> sequence_tail; // targets actually evaluated
  int window_radius = 0;
  bool converged = false;
  double residual = 0.0;           // max Cauchy gap over the window

  double at(const Node& n) const {
    for (size_t i = 0; i < window.size(); ++i)
      if (window[i] == n) return values[i];
    raise(errc::parse_error, "node outside estimate window");
  }
};

struct ColumnLimitOptions {
  int truncation_radius = -1;  // -1: window + max target distance + margin
  int margin = 5;
  int tail = 3;                // targets used for the Cauchy test
  bool stability_probe = true; // re-run at radius+3 and compare
  int node_cap = 200000;
  // Optional window restriction for rules whose arc fans make the BFS ball
  // a poor notion of "close to the basepoint".
  std::function<bool(const Node&)> window_pred;
};

namespace detail {

struct ColumnEval {
  std::vector<double> values;  // K_{x, t} for window nodes x
  double pi_t;                 // reference value at the target
};

inline ColumnEval eval_column(const BallTruncation& t, const std::vector<int>& window_idx,
                              int target) {
  ColumnEval ev;
  std::vector<double> col = star_column(t, target);
  std::vector<double> pi = star_row(t, t.basepoint_index());
  ev.pi_t = pi[target];
  ev.values.resize(window_idx.size());
  for (size_t i = 0; i < window_idx.size(); ++i)
    ev.values[i] = col[window_idx[i]] - ev.pi_t;
  return ev;
}

}  // namespace detail

inline BoundaryEstimate column_limit(const KernelRule& rule, const std::vector<Node>& targets,
                                     int window_radius, double tol,
                                     ColumnLimitOptions opt = {}) {
  if (targets.empty()) raise(errc::parse_error, "no targets given");

  auto run_at = [&](int radius) {
    BallTruncation t = truncate(rule, radius, opt.node_cap);
    std::vector<int> window_idx;
    std::vector<Node> window_nodes;
    for (size_t i = 0; i < t.nodes.size(); ++i)
      if (t.dist[i] <= window_radius &&
          (!opt.window_pred || opt.window_pred(t.nodes[i]))) {
        window_idx.push_back(static_cast<int>(i));
        window_nodes.push_back(t.nodes[i]);
      }
    int tail = std::min<int>(opt.tail, static_cast<int>(targets.size()));
    std::vector<Node> used(targets.end() - tail, targets.end());
    std::vector<detail::ColumnEval> evals;
    for (const Node& tg : used) {
      int ti = t.index_of(tg);
      if (ti < 0)
        raise(errc::not_converged,
              "target " + rule.label(tg) + " outside truncation radius " +
                  std::to_string(radius));
      evals.push_back(detail::eval_column(t, window_idx, ti));
    }
    BoundaryEstimate est;
    est.window = window_nodes;
    est.window_radius = window_radius;
    est.sequence_tail = used;
    est.values = evals.back().values;
    est.residual = 0.0;
    for (size_t e = 1; e < evals.size(); ++e)
      for (size_t i = 0; i < window_idx.size(); ++i)
        est.residual = std::max(est.residual,
                                std::fabs(evals[e].values[i] - evals[e - 1].values[i]));
    est.converged = est.residual <= tol;
    return est;
  };

  int max_target_dist = 0;
  {
    // one coarse pass to locate the targets
    int guess = opt.truncation_radius > 0 ? opt.truncation_radius
                                          : std::max(window_radius * 2, 8);
    for (int attempt = 0; attempt < 16; ++attempt) {
      BallTruncation probe = truncate(rule, guess, opt.node_cap);
      bool all = true;
      for (const Node& tg : targets) {
        int ti = probe.index_of(tg);
        if (ti < 0) {
          all = false;
          break;
        }
        max_target_dist = std::max(max_target_dist, probe.dist[ti]);
      }
      if (all) break;
      if (opt.truncation_radius > 0)
        raise(errc::not_converged, "targets outside requested truncation radius");
      guess *= 2;
      max_target_dist = 0;
    }
  }
  int radius = opt.truncation_radius > 0
                   ? opt.truncation_radius
                   : window_radius + max_target_dist + opt.margin;

  BoundaryEstimate est = run_at(radius);
  if (opt.stability_probe) {
    BoundaryEstimate probe = run_at(radius + 3);
    for (size_t i = 0; i < est.values.size(); ++i)
      if (std::fabs(est.values[i] - probe.values[i]) > tol)
        raise(errc::truncation_artifact,
              "window value moves when the truncation grows: node " +
                  rule.label(est.window[i]),
              rule.label(est.window[i]));
  }
  return est;
}

/// Self-value of the symmetrized kernel along user-supplied probe
/// sequences: sup over probes of the tail values pi_i + w_i, where w is the
/// estimated boundary function extended to the probe nodes. Along an
/// almost-geodesic this attains the unit exactly when the point is minimal;
/// the value returned is a lower estimate of the true limsup.
inline double h_flat_self(const KernelRule& rule, const BoundaryEstimate& estimate,
                          const std::vector<std::vector<Node>>& probe_sequences,
                          double tol, ColumnLimitOptions opt = {}) {
  if (probe_sequences.empty()) raise(errc::parse_error, "no probe sequences");

  // Each probe must itself converge to the estimate on the window.
  for (const auto& probe : probe_sequences) {
    BoundaryEstimate check = column_limit(rule, probe, estimate.window_radius, tol, opt);
    if (!check.converged)
      raise(errc::inconsistent_probes, "probe sequence does not converge");
    for (size_t i = 0; i < estimate.values.size(); ++i)
      if (std::fabs(check.values[i] - estimate.values[i]) > std::max(tol, 1e-9))
        raise(errc::inconsistent_probes,
              "probe limit disagrees with the estimate at node " +
                  rule.label(estimate.window[i]),
              rule.label(estimate.window[i]));
  }

  const Node target = estimate.sequence_tail.back();
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& probe : probe_sequences) {
    int tail = std::min<size_t>(3, probe.size());
    for (int k = 0; k < tail; ++k) {
      const Node& p = probe[probe.size() - 1 - k];
      // truncation covering both the probe node and the target
      int guess = std::max(estimate.window_radius * 2, 8);
      BallTruncation t;
      int pi_idx = -1, tg_idx = -1;
      for (int attempt = 0; attempt < 16; ++attempt) {
        t = truncate(rule, guess, opt.node_cap);
        pi_idx = t.index_of(p);
        tg_idx = t.index_of(target);
        if (pi_idx >= 0 && tg_idx >= 0) break;
        guess *= 2;
      }
      if (pi_idx < 0 || tg_idx < 0)
        raise(errc::not_converged, "probe node outside truncation");
      // regrow by the margin so optimal paths are not clipped
      int radius = std::max(t.dist[pi_idx], t.dist[tg_idx]) + estimate.window_radius +
                   opt.margin;
      t = truncate(rule, radius, opt.node_cap);
      pi_idx = t.index_of(p);
      tg_idx = t.index_of(target);
      std::vector<double> pi = star_row(t, t.basepoint_index());
      std::vector<double> plus = plus_column(t, tg_idx);
      double val = pi[pi_idx] + plus[pi_idx] - pi[tg_idx];
      // stability probe at +3
      BallTruncation t2 = truncate(rule, radius + 3, opt.node_cap);
      std::vector<double> pi2 = star_row(t2, t2.basepoint_index());
      std::vector<double> plus2 = plus_column(t2, t2.index_of(target));
      double val2 = pi2[t2.index_of(p)] + plus2[t2.index_of(p)] - pi2[t2.index_of(target)];
      if (std::fabs(val - val2) > std::max(tol, 1e-9))
        raise(errc::truncation_artifact, "symmetrized kernel value unstable at probe node",
              rule.label(p));
      best = std::max(best, val);
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Eigenvectors from boundary rays

struct EigenvectorEstimate {
  std::vector<Node> window;
  std::vector<double> values;
  double worst_residual = 0.0;  // max |(A u)_x - lambda - u_x| over the inner window
  std::vector<Node> inner;
};

/// Builds a candidate eigenvector for the eigenvalue lambda as the boundary
/// limit of the shifted kernel along the given ray, then verifies the
/// eigen-relation on the inner window.
inline EigenvectorEstimate construct_eigenvector(const KernelRule& rule, double lambda,
                                                 int window_radius,
                                                 const std::vector<Node>& ray, double tol,
                                                 ColumnLimitOptions opt = {}) {
  // cheap spectral bound from a truncation twice the window
  {
    BallTruncation probe = truncate(rule, std::max(2 * window_radius, 8), opt.node_cap);
    auto mean = max_circuit_mean_exact(probe.matrix);
    if (mean && mean->value() > lambda + 1e-12)
      raise(errc::not_converged,
            "estimated maximal circuit mean " + std::to_string(mean->value()) +
                " exceeds lambda");
  }
  KernelRule shifted = rule.shifted(lambda);
  BoundaryEstimate est = column_limit(shifted, ray, window_radius + 1, tol, opt);
  if (!est.converged)
    raise(errc::not_converged, "boundary limit did not settle along the ray");

  EigenvectorEstimate ev;
  ev.window = est.window;
  ev.values = est.values;

  // index window nodes for the local eigen check
  std::unordered_map<Node, double, NodeHash> val;
  for (size_t i = 0; i < est.window.size(); ++i) val.emplace(est.window[i], est.values[i]);
  BallTruncation wt = truncate(rule, window_radius, opt.node_cap);
  std::vector<Arc> buf;
  for (const Node& x : wt.nodes) {
    buf.clear();
    rule.neighbors(x, buf);
    double best = -std::numeric_limits<double>::infinity();
    bool complete = true;
    for (const auto& [y, w] : buf) {
      auto it = val.find(y);
      if (it == val.end()) {
        complete = false;
        break;
      }
      best = std::max(best, w + it->second);
    }
    if (!complete) continue;  // x lacks margin; not part of the inner window
    ev.inner.push_back(x);
    double res = std::fabs(best - (val.at(x) + lambda));
    ev.worst_residual = std::max(ev.worst_residual, res);
  }
  if (ev.worst_residual > tol)
    raise(errc::eigen_check_failed,
          "eigen-relation fails; worst residual " + std::to_string(ev.worst_residual));
  return ev;
}

}  // namespace maxplus
