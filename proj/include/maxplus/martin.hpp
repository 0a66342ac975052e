#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "maxplus/spectral.hpp"

namespace maxplus {

enum class PiKind { Basepoint, SigmaRow, Explicit };

/// The left super-harmonic reference row pi, with full finite support and
/// pi >= pi A. Basepoint form resolves to the basepoint row of A*, sigma
/// form to sigma A*.
struct PiSpec {
  PiKind kind = PiKind::Basepoint;
  std::string basepoint;  // Basepoint kind
  TropVector row;         // sigma (SigmaRow) or pi itself (Explicit)
  TropVector resolved;    // filled by validate_pi
  bool validated = false;

  static PiSpec from_basepoint(std::string b) {
    PiSpec s;
    s.kind = PiKind::Basepoint;
    s.basepoint = std::move(b);
    return s;
  }
  static PiSpec from_sigma(TropVector sigma) {
    PiSpec s;
    s.kind = PiKind::SigmaRow;
    s.row = std::move(sigma);
    return s;
  }
  static PiSpec from_explicit(TropVector pi) {
    PiSpec s;
    s.kind = PiKind::Explicit;
    s.row = std::move(pi);
    return s;
  }
};

namespace detail {

inline PiSpec validate_pi_with_star(const TropMatrix& a, const TropMatrix& star,
                                    PiSpec spec, EqTol eq) {
  const int n = a.size();
  switch (spec.kind) {
    case PiKind::Basepoint: {
      int b = a.index_of(spec.basepoint);
      if (b < 0) raise(errc::parse_error, "unknown basepoint node", spec.basepoint);
      spec.resolved.assign(n, Trop::zero());
      for (int j = 0; j < n; ++j) spec.resolved[j] = star.at(b, j);
      break;
    }
    case PiKind::SigmaRow: {
      if (static_cast<int>(spec.row.size()) != n)
        raise(errc::dimension_mismatch, "sigma row length does not match kernel");
      spec.resolved = vec_mat(spec.row, star);
      break;
    }
    case PiKind::Explicit: {
      if (static_cast<int>(spec.row.size()) != n)
        raise(errc::dimension_mismatch, "pi row length does not match kernel");
      spec.resolved = spec.row;
      break;
    }
  }
  for (int j = 0; j < n; ++j) {
    if (spec.resolved[j].is_top())
      raise(errc::divergent_star, "closure diverges on the reference row at " + a.label(j),
            a.label(j));
    if (spec.resolved[j].is_zero()) {
      std::string what = spec.kind == PiKind::Basepoint
                             ? "basepoint has no access to node " + a.label(j)
                             : "reference row vanishes at node " + a.label(j);
      raise(errc::not_full_support, what, a.label(j));
    }
  }
  // pi >= pi A, arc by arc
  bool bad = false;
  std::string witness;
  a.for_each([&](int i, int j, Trop w) {
    if (bad) return;
    if (!eq.leq(otimes(spec.resolved[i], w), spec.resolved[j])) {
      bad = true;
      witness = a.label(i) + " -> " + a.label(j);
    }
  });
  if (bad) raise(errc::not_superharmonic, "pi < pi A on arc " + witness, witness);
  spec.validated = true;
  return spec;
}

}  // namespace detail

/// Resolves and checks a reference-row specification against the kernel.
inline PiSpec validate_pi(const TropMatrix& a, const PiSpec& spec, EqTol eq = EqTol::exact()) {
  return detail::validate_pi_with_star(a, kleene_star(a), spec, eq);
}

/// Everything the finite Martin theory needs, bundled: closures, the Martin
/// kernels, their pi-symmetrized forms, spectral data and the grouping of
/// equal Martin-kernel columns.
struct MartinData {
  TropMatrix A;
  TropMatrix star;   // A*
  TropMatrix plus;   // A+
  TropMatrix K;      // K_{ij} = A*_{ij} - pi_j
  TropMatrix Kflat;  // A+_{ij} - pi_j
  TropMatrix H;      // pi_i + K_{ij}
  TropMatrix Hflat;  // pi_i + Kflat_{ij}
  PiSpec pi;
  SpectralData spectral;
  EqTol eq;

  std::vector<int> column_class_of;            // node -> class id
  std::vector<std::vector<int>> column_classes;  // class -> member nodes
  std::vector<int> class_rep;                  // class -> representative node

  int n() const { return A.size(); }

  TropVector column(int j) const {
    TropVector c(n());
    for (int i = 0; i < n(); ++i) c[i] = K.at(i, j);
    return c;
  }
};

inline MartinData martin_data(const TropMatrix& a, const PiSpec& spec,
                              EqTol eq = EqTol::exact()) {
  MartinData md;
  md.A = a;
  md.eq = eq;
  md.star = kleene_star(a);
  md.pi = detail::validate_pi_with_star(a, md.star, spec, eq);
  md.plus = mat_mul(a, md.star);
  md.spectral = spectral_data(a, eq);

  const int n = a.size();
  const TropVector& pi = md.pi.resolved;
  md.K = TropMatrix(a.labels());
  md.Kflat = TropMatrix(a.labels());
  md.H = TropMatrix(a.labels());
  md.Hflat = TropMatrix(a.labels());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Trop k = otimes(md.star.at(i, j), inverse(pi[j]));
      Trop kf = otimes(md.plus.at(i, j), inverse(pi[j]));
      if (!k.is_zero()) md.K.set(i, j, k);
      if (!kf.is_zero()) md.Kflat.set(i, j, kf);
      Trop h = otimes(pi[i], k);
      Trop hf = otimes(pi[i], kf);
      if (!h.is_zero()) md.H.set(i, j, h);
      if (!hf.is_zero()) md.Hflat.set(i, j, hf);
    }

  // Group equal columns of K; recurrence classes collapse onto one column.
  md.column_class_of.assign(n, -1);
  for (int j = 0; j < n; ++j) {
    if (md.column_class_of[j] >= 0) continue;
    int cid = static_cast<int>(md.column_classes.size());
    md.column_classes.push_back({j});
    md.column_class_of[j] = cid;
    for (int j2 = j + 1; j2 < n; ++j2) {
      if (md.column_class_of[j2] >= 0) continue;
      bool same = true;
      for (int i = 0; i < n && same; ++i)
        same = eq.eq(md.K.at(i, j), md.K.at(i, j2));
      if (same) {
        md.column_class_of[j2] = cid;
        md.column_classes[cid].push_back(j2);
      }
    }
  }
  md.class_rep.resize(md.column_classes.size());
  for (size_t c = 0; c < md.column_classes.size(); ++c) {
    int rep = md.column_classes[c][0];
    for (int m : md.column_classes[c])
      if (a.label(m) < a.label(rep)) rep = m;
    md.class_rep[c] = rep;
  }
  return md;
}

/// Representatives of the minimal Martin space in the finite case: one node
/// per recurrence class, and only when rho(A) equals the unit.
inline std::vector<int> minimal_martin_finite(const MartinData& md) {
  std::vector<int> reps;
  if (!md.spectral.rho_is_one(md.eq)) return reps;
  for (const auto& cls : md.spectral.classes) {
    int rep = cls[0];
    for (int m : cls)
      if (md.A.label(m) < md.A.label(rep)) rep = m;
    reps.push_back(rep);
  }
  return reps;
}

inline bool is_zero_vector(const TropVector& u) {
  for (const Trop& x : u)
    if (!x.is_zero()) return false;
  return true;
}

inline bool is_superharmonic(const MartinData& md, const TropVector& u) {
  TropVector au = mat_vec(md.A, u);
  for (int i = 0; i < md.n(); ++i)
    if (!md.eq.leq(au[i], u[i])) return false;
  return true;
}

inline bool is_harmonic(const MartinData& md, const TropVector& u) {
  TropVector au = mat_vec(md.A, u);
  for (int i = 0; i < md.n(); ++i)
    if (!md.eq.eq(au[i], u[i])) return false;
  return true;
}

/// pi u < +inf; trivially true on finite node sets with finite pi, kept for
/// API symmetry with the infinite setting.
inline bool is_integrable(const MartinData& md, const TropVector& u) {
  Trop s = Trop::zero();
  for (int i = 0; i < md.n(); ++i) s = oplus(s, otimes(md.pi.resolved[i], u[i]));
  return !s.is_top();
}

inline Trop pi_dot(const MartinData& md, const TropVector& u) {
  Trop s = Trop::zero();
  for (int i = 0; i < md.n(); ++i) s = oplus(s, otimes(md.pi.resolved[i], u[i]));
  return s;
}

/// A max-plus measure on column classes: density nu per class.
struct RepresentingMeasure {
  std::vector<int> support;   // class ids
  std::vector<Trop> density;  // aligned with support
};

/// The spectral measure of a super-harmonic vector: mu_u(K_{.i}) = pi_i u_i,
/// well defined per column class.
inline RepresentingMeasure mu(const MartinData& md, const TropVector& u) {
  if (!is_superharmonic(md, u))
    raise(errc::not_superharmonic, "mu requires a super-harmonic vector");
  RepresentingMeasure m;
  for (size_t c = 0; c < md.column_classes.size(); ++c) {
    int rep = md.class_rep[c];
    m.support.push_back(static_cast<int>(c));
    m.density.push_back(otimes(md.pi.resolved[rep], u[rep]));
  }
  return m;
}

/// Pointwise supremum of density(w) ⊙ w over the measure's support.
inline TropVector reconstruct(const MartinData& md, const RepresentingMeasure& nu) {
  for (const Trop& d : nu.density)
    if (d.is_top()) raise(errc::unbounded_density, "measure density contains +inf");
  TropVector out(md.n(), Trop::zero());
  for (size_t k = 0; k < nu.support.size(); ++k) {
    if (nu.density[k].is_zero()) continue;
    int rep = md.class_rep[nu.support[k]];
    for (int i = 0; i < md.n(); ++i)
      out[i] = oplus(out[i], otimes(nu.density[k], md.K.at(i, rep)));
  }
  return out;
}

/// Representation of a harmonic vector on the minimal Martin space: mu_u
/// restricted to the recurrent column classes. The result reconstructs u
/// exactly and is the maximal such density.
inline RepresentingMeasure decompose_harmonic(const MartinData& md, const TropVector& u) {
  if (is_zero_vector(u))
    raise(errc::not_harmonic, "the zero vector has no minimal-space representation");
  if (!is_harmonic(md, u)) raise(errc::not_harmonic, "vector is not harmonic");
  std::vector<int> reps = minimal_martin_finite(md);
  if (reps.empty())
    raise(errc::no_minimal_space,
          "kernel has no minimal Martin space yet a non-zero harmonic vector was given");
  RepresentingMeasure m;
  for (int rep : reps) {
    m.support.push_back(md.column_class_of[rep]);
    m.density.push_back(otimes(md.pi.resolved[rep], u[rep]));
  }
  return m;
}

struct ExtremalityResult {
  bool extremal = false;
  int column = -1;  // witnessing node when extremal
  TropVector v1, v2;  // two-term split when not extremal
};

/// Finite-case extremality: u is a normalised extremal generator of the
/// super-harmonic cone exactly when it coincides with a Martin-kernel
/// column. Non-extremal vectors come with an explicit split u = v1 ⊕ v2.
inline ExtremalityResult is_extremal(const MartinData& md, const TropVector& u) {
  if (!is_superharmonic(md, u))
    raise(errc::not_superharmonic, "extremality is defined on super-harmonic vectors");
  if (!md.eq.is_one(pi_dot(md, u)))
    raise(errc::not_normalized, "extremality test requires pi u = 1");

  ExtremalityResult res;
  for (size_t c = 0; c < md.column_classes.size(); ++c) {
    int rep = md.class_rep[c];
    bool same = true;
    for (int i = 0; i < md.n() && same; ++i) same = md.eq.eq(u[i], md.K.at(i, rep));
    if (same) {
      res.extremal = true;
      res.column = rep;
      return res;
    }
  }

  // Split the support of mu_u. First look for a class whose removal makes
  // the reconstruction drop strictly somewhere; if every coordinate maximum
  // is attained twice, shrink the support to a minimal reconstructing set
  // and peel off its first element.
  RepresentingMeasure m = mu(md, u);
  std::vector<int> live;
  for (size_t k = 0; k < m.support.size(); ++k)
    if (!m.density[k].is_zero()) live.push_back(static_cast<int>(k));

  auto recon_without = [&](const std::vector<int>& keep) {
    RepresentingMeasure sub;
    for (int k : keep) {
      sub.support.push_back(m.support[k]);
      sub.density.push_back(m.density[k]);
    }
    return reconstruct(md, sub);
  };
  auto equals_u = [&](const TropVector& v) { return approx_equal(v, u, md.eq); };

  for (size_t drop = 0; drop < live.size(); ++drop) {
    std::vector<int> rest;
    for (size_t k = 0; k < live.size(); ++k)
      if (k != drop) rest.push_back(live[k]);
    TropVector v2 = recon_without(rest);
    TropVector v1 = recon_without({live[drop]});
    if (!equals_u(v2) && !equals_u(v1)) {
      res.v1 = std::move(v1);
      res.v2 = std::move(v2);
      return res;
    }
  }
  // Minimal reconstructing subset: drop elements while reconstruction stays u.
  std::vector<int> keep = live;
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t k = 0; k < keep.size(); ++k) {
      std::vector<int> cand;
      for (size_t t = 0; t < keep.size(); ++t)
        if (t != k) cand.push_back(keep[t]);
      if (equals_u(recon_without(cand))) {
        keep = std::move(cand);
        changed = true;
        break;
      }
    }
  }
  // keep is minimal with reconstruction u; |keep| >= 2 since u is no column.
  if (keep.size() < 2)
    raise(errc::numerical_divergence, "extremality split degenerated; tolerance too coarse");
  std::vector<int> rest(keep.begin() + 1, keep.end());
  res.v1 = recon_without({keep[0]});
  res.v2 = recon_without(rest);
  return res;
}

}  // namespace maxplus
