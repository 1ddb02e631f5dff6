#pragma once

// Homogeneous Dirichlet Green function of the parallel-plate gap from the
// ladder of mirror images, with the far part of the ladder summed in closed
// form.
//
// Plate-anchored frame: zt = z + D/2 in [0, D]. A unit source at height s has
// positive images at s + 2mD (m != 0; m = 0 is the source itself) and negative
// images at -s + 2mD. Images with |m| <= kNearImages are summed directly. For
// |m| > kNearImages each image is expanded in axial solid harmonics about its
// own position; the pairs +m/-m cancel all odd orders and the m-sums reduce to
// Hurwitz zeta values zeta(l+1, M+1).
//
// Templated on the scalar so that HyperDual arguments return exact mixed
// second derivatives.

#include "dispersia/detail/hyperdual.hpp"
#include "dispersia/model.hpp"

#include <array>
#include <cmath>

namespace dispersia::detail {

inline constexpr int kNearImages = 16;
inline constexpr int kTailMaxOrder = 20;  // even orders 2..20 are summed

/// Hurwitz zeta(s, q) for integer s >= 2, q >= 1.
inline double hurwitz_zeta(int s, double q) {
  constexpr int direct = 400;
  double sum = 0.0;
  for (int k = 0; k < direct; ++k) sum += std::pow(q + k, -s);
  // Euler-Maclaurin remainder from N = q + direct
  const double n = q + direct;
  double tail = std::pow(n, 1 - s) / (s - 1) + 0.5 * std::pow(n, -s);
  // B2/2!, B4/4!, B6/6!
  constexpr std::array<double, 3> b{1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0};
  double rising = s;  // s (s+1) ... (s+2j-2)
  double power = std::pow(n, -s - 1);
  for (std::size_t j = 0; j < b.size(); ++j) {
    tail += b[j] * rising * power;
    rising *= (s + 2.0 * j + 1.0) * (s + 2.0 * j + 2.0);
    power /= n * n;
  }
  return sum + tail;
}

/// zeta(l + 1, M + 1) for l = 0..kTailMaxOrder.
inline const std::array<double, kTailMaxOrder + 1>& ladder_tail_zetas() {
  static const std::array<double, kTailMaxOrder + 1> table = [] {
    std::array<double, kTailMaxOrder + 1> t{};
    for (int l = 1; l <= kTailMaxOrder; ++l) t[static_cast<std::size_t>(l)] = hurwitz_zeta(l + 1, kNearImages + 1.0);
    return t;
  }();
  return table;
}

/// Sum over even l >= 2 of Q_l(rho2, w) * coeff[l], where Q_l = r^l P_l(w/r)
/// is the axial solid harmonic, generated by its three-term recurrence.
template <class T>
T even_solid_harmonic_sum(const T& rho2, const T& w, const std::array<double, kTailMaxOrder + 1>& coeff) {
  const T r2 = rho2 + w * w;
  T q_prev = T(1.0);  // Q_0
  T q = w;            // Q_1
  T sum = T(0.0);
  for (int l = 1; l < kTailMaxOrder; ++l) {
    const double dl = static_cast<double>(l);
    T q_next = ((2.0 * dl + 1.0) * (w * q) - dl * (r2 * q_prev)) / (dl + 1.0);
    q_prev = q;
    q = q_next;
    if ((l + 1) % 2 == 0) sum += coeff[static_cast<std::size_t>(l + 1)] * q;
  }
  return sum;
}

/// G_H(r, r') for the gap with plates at z = -D/2, +D/2 (unit source convention
/// laplacian G = -delta). Arguments are Cartesian components of r and r'.
template <class T>
T ladder_gh(const T& x, const T& y, const T& z, const T& xp, const T& yp, const T& zp, double gap) {
  const double two_d = 2.0 * gap;
  const T dx = x - xp;
  const T dy = y - yp;
  const T rho2 = dx * dx + dy * dy;
  const T zt = z + 0.5 * gap;
  const T st = zp + 0.5 * gap;
  const T w_pos = zt - st;  // offsets to positive images: w_pos - 2mD
  const T w_neg = zt + st;  // offsets to negative images: w_neg - 2mD

  T near = T(0.0);
  for (int m = -kNearImages; m <= kNearImages; ++m) {
    const double shift = two_d * m;
    if (m != 0) {
      const T u = w_pos - shift;
      near += rsqrt(rho2 + u * u);
    }
    const T v = w_neg - shift;
    near -= rsqrt(rho2 + v * v);
  }

  std::array<double, kTailMaxOrder + 1> coeff{};
  const auto& zeta = ladder_tail_zetas();
  double inv = 1.0 / two_d;  // (2D)^-(l+1)
  for (int l = 0; l <= kTailMaxOrder; ++l) {
    coeff[static_cast<std::size_t>(l)] = 2.0 * zeta[static_cast<std::size_t>(l)] * inv;
    inv /= two_d;
  }
  const T tail = even_solid_harmonic_sum(rho2, w_pos, coeff) - even_solid_harmonic_sum(rho2, w_neg, coeff);
  return (near + tail) * (1.0 / (4.0 * kPi));
}

inline double ladder_gh(const Vec3& r, const Vec3& rp, double gap) {
  return ladder_gh<double>(r.x(), r.y(), r.z(), rp.x(), rp.y(), rp.z(), gap);
}

/// Exact mixed Hessian d^2 G_H / dr_i dr'_j of the ladder representation.
inline Tensor3 ladder_gh_tensor(const Vec3& r, const Vec3& rp, double gap) {
  Tensor3 t;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      std::array<HyperDual, 3> a{HyperDual(r.x()), HyperDual(r.y()), HyperDual(r.z())};
      std::array<HyperDual, 3> b{HyperDual(rp.x()), HyperDual(rp.y()), HyperDual(rp.z())};
      a[static_cast<std::size_t>(i)].e1 = 1.0;
      b[static_cast<std::size_t>(j)].e2 = 1.0;
      t(i, j) = ladder_gh<HyperDual>(a[0], a[1], a[2], b[0], b[1], b[2], gap).e12;
    }
  }
  return t;
}

inline constexpr int ladder_image_count() { return 4 * kNearImages + 1; }

}  // namespace dispersia::detail
