#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "maxplus/errors.hpp"

namespace maxplus {

/// An element of the max-plus semiring R ∪ {-inf}, completed with +inf.
///
/// "Addition" a ⊕ b is max(a,b), "multiplication" a ⊙ b is a + b.
/// The zero is -inf and stays absorbing for ⊙ even against +inf;
/// +inf only ever arises from closure operations, never from input.
struct Trop {
  double v = -std::numeric_limits<double>::infinity();

  constexpr Trop() = default;
  constexpr Trop(double x) : v(x) {}

  static constexpr Trop zero() { return Trop(-std::numeric_limits<double>::infinity()); }
  static constexpr Trop one() { return Trop(0.0); }
  static constexpr Trop top() { return Trop(std::numeric_limits<double>::infinity()); }

  constexpr bool is_zero() const { return v == -std::numeric_limits<double>::infinity(); }
  constexpr bool is_top() const { return v == std::numeric_limits<double>::infinity(); }
  constexpr bool finite() const { return !is_zero() && !is_top(); }

  constexpr bool operator==(const Trop&) const = default;
  constexpr bool operator<(const Trop& o) const { return v < o.v; }
  constexpr bool operator<=(const Trop& o) const { return v <= o.v; }
};

constexpr Trop oplus(Trop a, Trop b) { return Trop(a.v >= b.v ? a.v : b.v); }

constexpr Trop otimes(Trop a, Trop b) {
  if (a.is_zero() || b.is_zero()) return Trop::zero();
  return Trop(a.v + b.v);
}

constexpr Trop operator+(Trop a, Trop b) { return oplus(a, b); }   // ⊕
constexpr Trop operator*(Trop a, Trop b) { return otimes(a, b); }  // ⊙

/// Multiplicative inverse, defined exactly on finite values.
inline Trop inverse(Trop a) {
  if (!a.finite()) raise(errc::numerical_divergence, "inverse of non-finite tropical scalar");
  return Trop(-a.v);
}

/// Comparison policy: tol == 0 is the exact-integer mode, tol > 0 the float mode.
struct EqTol {
  double tol = 0.0;

  static EqTol exact() { return EqTol{0.0}; }
  static EqTol approx(double t) { return EqTol{t}; }

  bool eq(Trop a, Trop b) const {
    if (!a.finite() || !b.finite()) return a == b;
    return std::fabs(a.v - b.v) <= tol;
  }
  // a ≤ b up to tolerance
  bool leq(Trop a, Trop b) const {
    if (a.v <= b.v) return true;
    if (!a.finite() || !b.finite()) return false;
    return a.v - b.v <= tol;
  }
  bool lt(Trop a, Trop b) const { return !leq(b, a); }
  bool is_one(Trop a) const { return eq(a, Trop::one()); }
};

inline std::string to_string(Trop a) {
  if (a.is_zero()) return "-inf";
  if (a.is_top()) return "inf";
  // trim trailing zeros for readable labels
  std::string s = std::to_string(a.v);
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  return s;
}

}  // namespace maxplus
