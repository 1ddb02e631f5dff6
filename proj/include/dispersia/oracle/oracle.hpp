#pragma once

// Brute-force references for tests and `dispersia verify`. Nothing here is
// used by the evaluation pipeline.

#include "dispersia/model.hpp"

#include <boost/math/special_functions/bessel.hpp>

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace dispersia::oracle {

struct OracleTensor {
  Tensor3 t = Tensor3::Zero();
  double residual = 0.0;  // max entry difference between the last two Richardson levels
};

/// d/dr_i d/dr'_j field(r, r') at (rA, rB) from the 4-point central stencil,
/// Richardson-extrapolated in h^2. The step is fd.base_step * length_scale.
template <class Field>
OracleTensor fd_mixed_hessian(Field&& field, const Vec3& rA, const Vec3& rB, const FdCtrl& fd,
                              double length_scale = 1.0) {
  fd.validate();
  if (!(length_scale > 0.0)) throw ConfigError("fd_mixed_hessian: length_scale must be > 0");
  const double h0 = fd.base_step * length_scale;
  const int levels = fd.richardson_levels;
  OracleTensor out;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      std::vector<std::vector<double>> table(static_cast<std::size_t>(levels) + 1);
      double h = h0;
      for (int k = 0; k <= levels; ++k) {
        Vec3 ei = Vec3::Zero();
        Vec3 ej = Vec3::Zero();
        ei[i] = h;
        ej[j] = h;
        const double d = field(rA + ei, rB + ej) - field(rA + ei, rB - ej) - field(rA - ei, rB + ej) +
                         field(rA - ei, rB - ej);
        auto& row = table[static_cast<std::size_t>(k)];
        row.push_back(d / (4.0 * h * h));
        double factor = 4.0;
        for (int m = 1; m <= k; ++m) {
          const double fine = row[static_cast<std::size_t>(m - 1)];
          const double coarse = table[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(m - 1)];
          row.push_back(fine + (fine - coarse) / (factor - 1.0));
          factor *= 4.0;
        }
        h *= 0.5;
      }
      const auto& last = table.back();
      out.t(i, j) = last.back();
      if (levels > 0) out.residual = std::max(out.residual, std::abs(last.back() - last[last.size() - 2]));
    }
  }
  return out;
}

struct LadderReference {
  double value = 0.0;
  double truncation_estimate = 0.0;
};

namespace detail {

/// Full G from the mirror images with |m| <= m_max, plates at -D/2 and +D/2.
inline double ladder_partial_sum(const Vec3& r, const Vec3& rp, double gap, int m_max) {
  const double rho2 = std::pow(r.x() - rp.x(), 2) + std::pow(r.y() - rp.y(), 2);
  const double zt = r.z() + 0.5 * gap;
  const double st = rp.z() + 0.5 * gap;
  // pair +m with -m so that the monopole parts cancel before they are added
  auto term = [&](int m) {
    const double c = 2.0 * gap * m;
    return 1.0 / std::sqrt(rho2 + std::pow(zt - st - c, 2)) - 1.0 / std::sqrt(rho2 + std::pow(zt + st - c, 2));
  };
  double sum = term(0);
  for (int m = m_max; m >= 1; --m) sum += term(m) + term(-m);
  return sum / (4.0 * kPi);
}

}  // namespace detail

/// Full Dirichlet Green function of the gap from the alternating image ladder
/// truncated at k_max reflections on each side. Partial sums at k_max/8,
/// k_max/4, k_max/2 and k_max are Richardson-extrapolated against the
/// M^-2, M^-3, M^-4 tail terms.
inline LadderReference capacitor_image_ladder(const Vec3& r, const Vec3& rp, double gap, int k_max) {
  if (!(gap > 0.0)) throw GeometryError("capacitor_image_ladder: plate separation must be > 0");
  if (k_max < 1) throw ConfigError("capacitor_image_ladder: k_max must be >= 1");
  if (std::abs(r.z()) > 0.5 * gap || std::abs(rp.z()) > 0.5 * gap) {
    throw GeometryError("capacitor_image_ladder: point outside the gap");
  }
  int shifts = 3;
  while (shifts > 0 && k_max % (1 << shifts) != 0) --shifts;
  std::vector<double> col;
  for (int s = shifts; s >= 0; --s) col.push_back(detail::ladder_partial_sum(r, rp, gap, k_max >> s));
  if (col.size() == 1) return {col[0], std::abs(col[0]) / static_cast<double>(k_max)};

  double previous = col.back();
  for (int p = 2; col.size() > 1; ++p) {
    previous = col.back();
    const double f = std::ldexp(1.0, p);
    std::vector<double> next;
    for (std::size_t k = 0; k + 1 < col.size(); ++k) next.push_back((f * col[k + 1] - col[k]) / (f - 1.0));
    col = std::move(next);
  }
  return {col[0], std::abs(col[0] - previous)};
}

/// Eigenfunction series of the full gap Green function with exactly n_fixed
/// terms, K0 from Boost and long double accumulation.
inline double high_cutoff_reference(const Vec3& r, const Vec3& rp, double gap, int n_fixed) {
  if (!(gap > 0.0)) throw GeometryError("high_cutoff_reference: plate separation must be > 0");
  if (std::abs(r.z()) > 0.5 * gap || std::abs(rp.z()) > 0.5 * gap) {
    throw GeometryError("high_cutoff_reference: point outside the gap");
  }
  const double rho = std::hypot(r.x() - rp.x(), r.y() - rp.y());
  if (!(rho > 0.0)) throw GeometryError("high_cutoff_reference: in-plane separation must be > 0");
  const long double kappa = std::acos(-1.0L) / gap;
  const long double za = r.z() + 0.5L * gap;
  const long double zb = rp.z() + 0.5L * gap;
  long double sum = 0.0L;
  for (int n = n_fixed; n >= 1; --n) {
    const double x = static_cast<double>(n * kappa * rho);
    if (x > 700.0) continue;
    const long double k0 = boost::math::cyl_bessel_k(0, x);
    sum += std::sin(n * kappa * za) * std::sin(n * kappa * zb) * k0;
  }
  return static_cast<double>(sum * kappa / (std::acos(-1.0L) * std::acos(-1.0L)));
}

}  // namespace dispersia::oracle
