#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "maxplus/scalar.hpp"

namespace maxplus {

using TropVector = std::vector<Trop>;

/// A finite square kernel over an ordered, labelled node set.
///
/// Storage is row-sparse (absent entry = -inf) and switches to a dense
/// array once fill exceeds a quarter of n^2; lattice truncations stay
/// sparse while closures come out dense.
class TropMatrix {
 public:
  TropMatrix() = default;

  explicit TropMatrix(std::vector<std::string> labels)
      : n_(static_cast<int>(labels.size())), labels_(std::move(labels)) {
    rows_.resize(n_);
    build_index();
  }

  static TropMatrix identity(std::vector<std::string> labels) {
    TropMatrix m(std::move(labels));
    for (int i = 0; i < m.n_; ++i) m.set(i, i, Trop::one());
    return m;
  }

  int size() const { return n_; }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::string& label(int i) const { return labels_[i]; }

  int index_of(const std::string& label) const {
    auto it = index_.find(label);
    return it == index_.end() ? -1 : it->second;
  }

  Trop at(int i, int j) const {
    if (dense_) return Trop(dense_v_[static_cast<size_t>(i) * n_ + j]);
    const auto& row = rows_[i];
    auto it = std::lower_bound(row.begin(), row.end(), j,
                               [](const Entry& e, int col) { return e.first < col; });
    if (it != row.end() && it->first == j) return Trop(it->second);
    return Trop::zero();
  }

  void set(int i, int j, Trop w) {
    if (dense_) {
      dense_v_[static_cast<size_t>(i) * n_ + j] = w.v;
      return;
    }
    auto& row = rows_[i];
    auto it = std::lower_bound(row.begin(), row.end(), j,
                               [](const Entry& e, int col) { return e.first < col; });
    if (it != row.end() && it->first == j) {
      if (w.is_zero()) {
        row.erase(it);
        --nnz_;
      } else {
        it->second = w.v;
      }
      return;
    }
    if (w.is_zero()) return;
    row.insert(it, {j, w.v});
    ++nnz_;
    maybe_densify();
  }

  /// Visits the stored (non-zero) entries of row i in column order.
  template <typename Fn>
  void for_each_in_row(int i, Fn&& fn) const {
    if (dense_) {
      const double* r = dense_v_.data() + static_cast<size_t>(i) * n_;
      for (int j = 0; j < n_; ++j)
        if (r[j] != -std::numeric_limits<double>::infinity()) fn(j, Trop(r[j]));
    } else {
      for (const auto& [j, w] : rows_[i]) fn(j, Trop(w));
    }
  }

  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (int i = 0; i < n_; ++i)
      for_each_in_row(i, [&](int j, Trop w) { fn(i, j, w); });
  }

  size_t nnz() const {
    if (!dense_) return nnz_;
    size_t c = 0;
    for (double x : dense_v_)
      if (x != -std::numeric_limits<double>::infinity()) ++c;
    return c;
  }

  bool all_integer() const {
    bool ok = true;
    for_each([&](int, int, Trop w) {
      if (w.finite() && w.v != std::floor(w.v)) ok = false;
    });
    return ok;
  }

  bool has_top() const {
    bool t = false;
    for_each([&](int, int, Trop w) { t = t || w.is_top(); });
    return t;
  }

 private:
  using Entry = std::pair<int, double>;

  void build_index() {
    index_.reserve(labels_.size());
    for (int i = 0; i < n_; ++i) {
      auto [it, fresh] = index_.emplace(labels_[i], i);
      if (!fresh) raise(errc::parse_error, "duplicate node label", labels_[i]);
    }
  }

  void maybe_densify() {
    // Dense n^2 buffers stop paying off for the big lattice truncations.
    if (n_ > kDenseLimit) return;
    if (nnz_ * 4 <= static_cast<size_t>(n_) * n_) return;
    dense_v_.assign(static_cast<size_t>(n_) * n_,
                    -std::numeric_limits<double>::infinity());
    for (int i = 0; i < n_; ++i)
      for (const auto& [j, w] : rows_[i]) dense_v_[static_cast<size_t>(i) * n_ + j] = w;
    rows_.clear();
    rows_.shrink_to_fit();
    dense_ = true;
  }

  static constexpr int kDenseLimit = 4096;

  int n_ = 0;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, int> index_;
  bool dense_ = false;
  size_t nnz_ = 0;
  std::vector<double> dense_v_;
  std::vector<std::vector<Entry>> rows_;
};

inline void require_same_shape(const TropMatrix& a, const TropMatrix& b) {
  if (a.size() != b.size() || a.labels() != b.labels())
    raise(errc::dimension_mismatch, "matrices disagree on node set");
}

inline TropMatrix mat_mul(const TropMatrix& a, const TropMatrix& b) {
  require_same_shape(a, b);
  const int n = a.size();
  TropMatrix out(a.labels());
  std::vector<double> acc;
  for (int i = 0; i < n; ++i) {
    acc.assign(n, -std::numeric_limits<double>::infinity());
    a.for_each_in_row(i, [&](int k, Trop aik) {
      b.for_each_in_row(k, [&](int j, Trop bkj) {
        double w = otimes(aik, bkj).v;
        if (w > acc[j]) acc[j] = w;
      });
    });
    for (int j = 0; j < n; ++j)
      if (acc[j] != -std::numeric_limits<double>::infinity()) out.set(i, j, Trop(acc[j]));
  }
  return out;
}

inline TropVector mat_vec(const TropMatrix& a, const TropVector& u) {
  if (static_cast<int>(u.size()) != a.size())
    raise(errc::dimension_mismatch, "vector length does not match matrix");
  TropVector out(u.size(), Trop::zero());
  for (int i = 0; i < a.size(); ++i) {
    Trop best = Trop::zero();
    a.for_each_in_row(i, [&](int j, Trop w) { best = oplus(best, otimes(w, u[j])); });
    out[i] = best;
  }
  return out;
}

/// Row-vector product u A (u as a left vector).
inline TropVector vec_mat(const TropVector& u, const TropMatrix& a) {
  if (static_cast<int>(u.size()) != a.size())
    raise(errc::dimension_mismatch, "vector length does not match matrix");
  TropVector out(u.size(), Trop::zero());
  for (int i = 0; i < a.size(); ++i) {
    if (u[i].is_zero()) continue;
    a.for_each_in_row(i, [&](int j, Trop w) { out[j] = oplus(out[j], otimes(u[i], w)); });
  }
  return out;
}

namespace detail {

/// Reachability closure over the arc graph of `a` (length >= 1 paths),
/// as adjacency bitsets.
inline std::vector<std::vector<uint64_t>> reach_closure(const TropMatrix& a) {
  const int n = a.size();
  const int words = (n + 63) / 64;
  std::vector<std::vector<uint64_t>> reach(n, std::vector<uint64_t>(words, 0));
  // BFS from each node along stored arcs.
  std::vector<int> stack;
  for (int s = 0; s < n; ++s) {
    auto& bits = reach[s];
    stack.clear();
    a.for_each_in_row(s, [&](int j, Trop) {
      if (!(bits[j / 64] >> (j % 64) & 1)) {
        bits[j / 64] |= uint64_t(1) << (j % 64);
        stack.push_back(j);
      }
    });
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      a.for_each_in_row(v, [&](int j, Trop) {
        if (!(bits[j / 64] >> (j % 64) & 1)) {
          bits[j / 64] |= uint64_t(1) << (j % 64);
          stack.push_back(j);
        }
      });
    }
  }
  return reach;
}

}  // namespace detail

/// Kleene closure A* = I ⊕ A ⊕ A² ⊕ ⋯ by a Floyd-Warshall sweep over the
/// semiring. Entry (i,j) comes out +inf exactly when some walk from i to j
/// passes through a node lying on a strictly positive circuit.
inline TropMatrix kleene_star(const TropMatrix& a) {
  const int n = a.size();
  std::vector<double> d(static_cast<size_t>(n) * n,
                        -std::numeric_limits<double>::infinity());
  a.for_each([&](int i, int j, Trop w) {
    if (w.v > d[static_cast<size_t>(i) * n + j]) d[static_cast<size_t>(i) * n + j] = w.v;
  });
  for (int i = 0; i < n; ++i) {
    double& dii = d[static_cast<size_t>(i) * n + i];
    if (dii < 0.0) dii = 0.0;  // I ⊕ A
  }
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

  // Positive circuits: the diagonal already carries the best simple-circuit
  // weight through each node, so anything > 0 marks divergence.
  std::vector<int> pos;
  for (int i = 0; i < n; ++i)
    if (d[static_cast<size_t>(i) * n + i] > 0.0) pos.push_back(i);

  TropMatrix out(a.labels());
  if (!pos.empty()) {
    auto reach = detail::reach_closure(a);
    auto reaches = [&](int i, int j) {
      return i == j || (reach[i][j / 64] >> (j % 64) & 1);
    };
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k : pos)
          if (reaches(i, k) && reaches(k, j)) {
            d[static_cast<size_t>(i) * n + j] = std::numeric_limits<double>::infinity();
            break;
          }
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double w = d[static_cast<size_t>(i) * n + j];
      if (w != -std::numeric_limits<double>::infinity()) out.set(i, j, Trop(w));
    }
  return out;
}

/// A⁺ = A ⊕ A² ⊕ ⋯ = A A* = A* A.
inline TropMatrix kleene_plus(const TropMatrix& a) { return mat_mul(a, kleene_star(a)); }

/// Kernel of the product node set: A1 ⊗ I2 ⊕ I1 ⊗ A2, labels "(a,b)".
inline TropMatrix tensor_sum(const TropMatrix& a1, const TropMatrix& a2) {
  const int n1 = a1.size(), n2 = a2.size();
  std::vector<std::string> labels;
  labels.reserve(static_cast<size_t>(n1) * n2);
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j)
      labels.push_back("(" + a1.label(i) + "," + a2.label(j) + ")");
  TropMatrix out(std::move(labels));
  a1.for_each([&](int i1, int j1, Trop w) {
    for (int k = 0; k < n2; ++k) {
      int r = i1 * n2 + k, c = j1 * n2 + k;
      out.set(r, c, oplus(out.at(r, c), w));
    }
  });
  a2.for_each([&](int i2, int j2, Trop w) {
    for (int k = 0; k < n1; ++k) {
      int r = k * n2 + i2, c = k * n2 + j2;
      out.set(r, c, oplus(out.at(r, c), w));
    }
  });
  return out;
}

/// Max-plus tensor (Kronecker) product; pairs with tensor_sum in the
/// closure identity (A1 ⊗ I ⊕ I ⊗ A2)* = A1* ⊗ A2*.
inline TropMatrix tensor_product(const TropMatrix& a1, const TropMatrix& a2) {
  const int n1 = a1.size(), n2 = a2.size();
  std::vector<std::string> labels;
  labels.reserve(static_cast<size_t>(n1) * n2);
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j)
      labels.push_back("(" + a1.label(i) + "," + a2.label(j) + ")");
  TropMatrix out(std::move(labels));
  a1.for_each([&](int i1, int j1, Trop w1) {
    a2.for_each([&](int i2, int j2, Trop w2) {
      out.set(i1 * n2 + i2, j1 * n2 + j2, otimes(w1, w2));
    });
  });
  return out;
}

inline TropVector tensor_row(const TropVector& p1, const TropVector& p2) {
  TropVector out;
  out.reserve(p1.size() * p2.size());
  for (const Trop& x : p1)
    for (const Trop& y : p2) out.push_back(otimes(x, y));
  return out;
}

inline bool approx_equal(const TropMatrix& a, const TropMatrix& b, EqTol eq) {
  if (a.size() != b.size()) return false;
  for (int i = 0; i < a.size(); ++i)
    for (int j = 0; j < a.size(); ++j)
      if (!eq.eq(a.at(i, j), b.at(i, j))) return false;
  return true;
}

inline bool approx_equal(const TropVector& a, const TropVector& b, EqTol eq) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!eq.eq(a[i], b[i])) return false;
  return true;
}

}  // namespace maxplus
