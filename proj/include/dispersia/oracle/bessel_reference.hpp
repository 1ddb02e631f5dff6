#pragma once

// Extended-precision reference values for K0, K1, K2, I0, I1.
// Ascending series evaluated in MPFR with working precision grown with x so
// that the cancellation between the logarithmic and the regular series (which
// costs roughly 2x/ln(10) digits) is absorbed. Test and verification use only.

#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <stdexcept>

namespace dispersia::oracle {

namespace detail {

using mp = boost::multiprecision::mpfr_float;

inline unsigned reference_digits(double x) {
  return 40u + static_cast<unsigned>(std::ceil(2.0 * x / std::log(10.0)));
}

inline mp euler_gamma_mp() {
  mp g;
  mpfr_const_euler(g.backend().data(), MPFR_RNDN);
  return g;
}

struct ReferenceSums {
  mp i_n;        // I_n(x)
  mp psi_sum;    // (x/2)^n/2 * sum [psi(k+1)+psi(n+k+1)] t^k / (k!(n+k)!)
};

// n in {0, 1, 2}
inline ReferenceSums reference_sums(int n, const mp& x, const mp& eps) {
  const mp gamma = euler_gamma_mp();
  const mp t = x * x / 4;
  const mp half_x_pow_n = pow(x / 2, n);

  mp fact_n = 1;
  for (int j = 2; j <= n; ++j) fact_n *= j;

  mp term = 1 / fact_n;  // t^k / (k!(n+k)!)
  mp h_k = 0;            // H_k
  mp h_nk = 0;           // H_{n+k}
  for (int j = 1; j <= n; ++j) h_nk += mp(1) / j;

  mp i_sum = 0;
  mp psi = 0;
  for (int k = 0; k < 200000; ++k) {
    if (k > 0) {
      term *= t / (mp(k) * mp(n + k));
      h_k += mp(1) / k;
      h_nk += mp(1) / (n + k);
    }
    i_sum += term;
    const mp contrib = (h_k - gamma + h_nk - gamma) * term;
    psi += contrib;
    if (k > 2 && term < eps * i_sum && abs(contrib) < eps * abs(psi) + eps * i_sum) break;
  }
  return {half_x_pow_n * i_sum, half_x_pow_n * psi / 2};
}

}  // namespace detail

/// K_n(x) for n = 0, 1, 2 to far better than double precision.
inline long double bessel_k_reference(int n, double x) {
  using detail::mp;
  if (n < 0 || n > 2) throw std::invalid_argument("bessel_k_reference: n must be 0, 1 or 2");
  if (!(x > 0.0)) throw std::domain_error("bessel_k_reference: x must be > 0");
  const unsigned digits = detail::reference_digits(x);
  const unsigned saved = mp::default_precision();
  mp::default_precision(digits);

  const mp xm = x;
  const mp eps = pow(mp(10), -static_cast<int>(digits));
  const auto sums = detail::reference_sums(n, xm, eps);

  // finite sum: (1/2)(x/2)^-n sum_{k<n} (n-k-1)!/k! (-t)^k
  mp finite = 0;
  if (n > 0) {
    const mp t = xm * xm / 4;
    mp fact_nk1 = 1;
    for (int j = 2; j <= n - 1; ++j) fact_nk1 *= j;  // (n-1)!
    mp kfact = 1;
    mp tpow = 1;
    for (int k = 0; k < n; ++k) {
      if (k > 0) {
        kfact *= k;
        tpow *= -t;
        fact_nk1 /= (n - k);
      }
      finite += fact_nk1 / kfact * tpow;
    }
    finite = finite / 2 / pow(xm / 2, n);
  }
  const mp sign = (n % 2 == 0) ? mp(1) : mp(-1);
  const mp result = finite - sign * log(xm / 2) * sums.i_n + sign * sums.psi_sum;
  const long double out = result.convert_to<long double>();
  mp::default_precision(saved);
  return out;
}

/// I_n(x) for n = 0, 1.
inline long double bessel_i_reference(int n, double x) {
  using detail::mp;
  const unsigned saved = mp::default_precision();
  mp::default_precision(40);
  const mp eps = pow(mp(10), -40);
  const auto sums = detail::reference_sums(n, mp(x), eps);
  const long double out = sums.i_n.convert_to<long double>();
  mp::default_precision(saved);
  return out;
}

}  // namespace dispersia::oracle
