#pragma once

// Modified Bessel functions of the second kind, K0 and K1 (and K2 by upward
// recurrence), for real positive arguments.
//
// x <= 2 : ascending series in x^2/4 (A&S 9.6.13 / 9.6.11).
// x >  2 : Steed's continued fraction CF2 (Temme 1975) for the scaled pair
//          e^x K0, e^x K1, followed by one multiplication with e^-x.

#include "dispersia/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

namespace dispersia {

namespace detail {

inline constexpr double kSeriesCutover = 2.0;

struct BesselKPair {
  double k0;
  double k1;
};

inline BesselKPair bessel_k01_series(double x) {
  constexpr double eps = std::numeric_limits<double>::epsilon() * 0.25;
  const double gamma = std::numbers::egamma;
  const double t = 0.25 * x * x;
  const double log_half_x = std::log(0.5 * x);

  // k = 0 terms
  double p0 = 1.0;             // t^k / (k!)^2
  double p1 = 1.0;             // t^k / (k! (k+1)!)
  double harmonic = 0.0;       // H_k
  double i0 = 1.0;
  double s0 = 0.0;             // sum H_k t^k/(k!)^2
  double i1_sum = 1.0;         // sum t^k/(k!(k+1)!)
  double psi_sum = (0.0 - gamma) + (1.0 - gamma);  // psi(1) + psi(2)

  for (int k = 1; k < 200; ++k) {
    const double dk = static_cast<double>(k);
    p0 *= t / (dk * dk);
    p1 *= t / (dk * (dk + 1.0));
    const double h_next = harmonic + 1.0 / dk;        // H_k
    const double h_next1 = h_next + 1.0 / (dk + 1.0);  // H_{k+1}
    harmonic = h_next;
    i0 += p0;
    s0 += harmonic * p0;
    i1_sum += p1;
    const double psi_term = ((h_next - gamma) + (h_next1 - gamma)) * p1;
    psi_sum += psi_term;
    if (p0 * (1.0 + harmonic) < eps * std::abs(s0 + i0) && std::abs(psi_term) < eps * std::abs(psi_sum)) break;
  }

  const double k0 = -(log_half_x + gamma) * i0 + s0;
  const double i1 = 0.5 * x * i1_sum;
  const double k1 = 1.0 / x + log_half_x * i1 - 0.25 * x * psi_sum;
  return {k0, k1};
}

/// e^x K0(x), e^x K1(x) via Steed's algorithm; valid for x >= 2.
inline BesselKPair bessel_k01_scaled_cf2(double x) {
  constexpr double eps = std::numeric_limits<double>::epsilon() * 0.25;
  constexpr int max_iter = 10000;

  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  const double a1 = 0.25;  // 1/4 - nu^2 with nu = 0
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 1; i < max_iter; ++i) {
    a -= 2.0 * i;
    c = -a * c / (i + 1.0);
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < eps) break;
  }
  h *= a1;
  const double k0s = std::sqrt(std::numbers::pi / (2.0 * x)) / s;
  const double k1s = k0s * (x + 0.5 - h) / x;
  return {k0s, k1s};
}

inline void require_positive_argument(double x, const char* fn) {
  if (!(x > 0.0)) throw DomainError(std::string(fn) + ": argument must be > 0");
}

}  // namespace detail

/// K0(x) and K1(x) evaluated together; cheaper than two separate calls.
inline detail::BesselKPair bessel_k01(double x) {
  detail::require_positive_argument(x, "bessel_k01");
  if (std::isinf(x)) return {0.0, 0.0};
  if (x <= detail::kSeriesCutover) return detail::bessel_k01_series(x);
  const double e = std::exp(-x);  // exact zero once e^-x underflows
  if (e == 0.0) return {0.0, 0.0};
  const auto scaled = detail::bessel_k01_scaled_cf2(x);
  return {scaled.k0 * e, scaled.k1 * e};
}

inline double bessel_k0(double x) {
  detail::require_positive_argument(x, "bessel_k0");
  return bessel_k01(x).k0;
}

inline double bessel_k1(double x) {
  detail::require_positive_argument(x, "bessel_k1");
  return bessel_k01(x).k1;
}

/// K2 from the recurrence K2 = K0 + (2/x) K1.
inline double bessel_k2(double x) {
  detail::require_positive_argument(x, "bessel_k2");
  const auto k = bessel_k01(x);
  return k.k0 + 2.0 * k.k1 / x;
}

}  // namespace dispersia
