#pragma once

// Hyper-dual numbers a + b e1 + c e2 + d e1e2 with e1^2 = e2^2 = 0.
// Evaluating f at (x + e1 dx, y + e2 dy) yields the exact mixed second
// derivative in the e1e2 component.

#include <cmath>

namespace dispersia::detail {

struct HyperDual {
  double v = 0.0;
  double e1 = 0.0;
  double e2 = 0.0;
  double e12 = 0.0;

  constexpr HyperDual() = default;
  constexpr HyperDual(double value) : v(value) {}  // NOLINT(google-explicit-constructor)
  constexpr HyperDual(double value, double d1, double d2, double d12) : v(value), e1(d1), e2(d2), e12(d12) {}

  friend constexpr HyperDual operator+(const HyperDual& a, const HyperDual& b) {
    return {a.v + b.v, a.e1 + b.e1, a.e2 + b.e2, a.e12 + b.e12};
  }
  friend constexpr HyperDual operator-(const HyperDual& a, const HyperDual& b) {
    return {a.v - b.v, a.e1 - b.e1, a.e2 - b.e2, a.e12 - b.e12};
  }
  friend constexpr HyperDual operator-(const HyperDual& a) { return {-a.v, -a.e1, -a.e2, -a.e12}; }
  friend constexpr HyperDual operator*(const HyperDual& a, const HyperDual& b) {
    return {a.v * b.v, a.v * b.e1 + a.e1 * b.v, a.v * b.e2 + a.e2 * b.v,
            a.v * b.e12 + a.e1 * b.e2 + a.e2 * b.e1 + a.e12 * b.v};
  }
  friend constexpr HyperDual operator*(double s, const HyperDual& a) { return {s * a.v, s * a.e1, s * a.e2, s * a.e12}; }
  friend constexpr HyperDual operator*(const HyperDual& a, double s) { return s * a; }
  friend constexpr HyperDual operator/(const HyperDual& a, double s) { return {a.v / s, a.e1 / s, a.e2 / s, a.e12 / s}; }
  friend constexpr HyperDual operator/(const HyperDual& a, const HyperDual& b) { return a * reciprocal(b); }

  HyperDual& operator+=(const HyperDual& o) { return *this = *this + o; }
  HyperDual& operator-=(const HyperDual& o) { return *this = *this - o; }
  HyperDual& operator*=(const HyperDual& o) { return *this = *this * o; }

  /// Chain rule for a scalar function with value f, first derivative f1 and second f2.
  static constexpr HyperDual apply(const HyperDual& a, double f, double f1, double f2) {
    return {f, f1 * a.e1, f1 * a.e2, f1 * a.e12 + f2 * a.e1 * a.e2};
  }

  friend constexpr HyperDual reciprocal(const HyperDual& a) {
    const double inv = 1.0 / a.v;
    return apply(a, inv, -inv * inv, 2.0 * inv * inv * inv);
  }
};

inline HyperDual sqrt(const HyperDual& a) {
  const double s = std::sqrt(a.v);
  return HyperDual::apply(a, s, 0.5 / s, -0.25 / (s * a.v));
}

/// 1/sqrt(a), the kernel of every image-charge potential.
inline HyperDual rsqrt(const HyperDual& a) {
  const double r = 1.0 / std::sqrt(a.v);
  const double r3 = r / a.v;
  return HyperDual::apply(a, r, -0.5 * r3, 0.75 * r3 / a.v);
}

inline double rsqrt(double a) { return 1.0 / std::sqrt(a); }

inline double value_of(double x) { return x; }
inline double value_of(const HyperDual& x) { return x.v; }

}  // namespace dispersia::detail
