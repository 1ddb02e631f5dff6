#pragma once

// Mixed second-derivative tensors T_ij(rA, rB) = d/dr_i d/dr'_j G(r, r') at
// r = rA, r' = rB, for the free kernel and the image part G_H of each geometry.

#include "dispersia/detail/image_ladder.hpp"
#include "dispersia/greens.hpp"
#include "dispersia/model.hpp"
#include "dispersia/specfun.hpp"

#include <cmath>

namespace dispersia {

struct TensorEval {
  Tensor3 t = Tensor3::Zero();
  int terms_used = 0;
  bool converged = true;
};

/// (delta_ij - 3 R_i R_j / R^2) / (4 pi R^3) with R = rA - rB. Contracting with
/// the two dipoles gives the vacuum dipole-dipole coupling times epsilon_0.
inline Tensor3 dipole_kernel_tensor(const Vec3& rA, const Vec3& rB) {
  require_finite(rA, "dipole_kernel_tensor");
  require_finite(rB, "dipole_kernel_tensor");
  const Vec3 sep = rA - rB;
  const double r = sep.norm();
  if (r == 0.0) throw GeometryError("dipole_kernel_tensor: coincident atoms");
  const Vec3 n = sep / r;
  return (Tensor3::Identity() - 3.0 * n * n.transpose()) / (4.0 * kPi * r * r * r);
}

// ---------------------------------------------------------------------------
// Plane
// ---------------------------------------------------------------------------

/// The image of B sits at (xB, yB, -zB); differentiating through the mirror
/// flips the sign of the z column.
inline Tensor3 gh_tensor_plane(const Vec3& rA, const Vec3& rB) {
  detail::check_plane(rA, Closure::Open, "gh_tensor_plane");
  detail::check_plane(rB, Closure::Open, "gh_tensor_plane");
  const Vec3 u = rA - mirror_z(rB);
  const double d = u.norm();
  const Vec3 n = u / d;
  Tensor3 t = -(Tensor3::Identity() - 3.0 * n * n.transpose()) / (4.0 * kPi * d * d * d);
  t.col(2) *= -1.0;
  return t;
}

// ---------------------------------------------------------------------------
// Spheres
// ---------------------------------------------------------------------------

inline Tensor3 gh_tensor_sphere_grounded(const Vec3& rA, const Vec3& rB, double a) {
  detail::check_sphere(rA, a, Closure::Open, "gh_tensor_sphere_grounded");
  detail::check_sphere(rB, a, Closure::Open, "gh_tensor_sphere_grounded");
  const double a2 = a * a;
  const double ra2 = rA.squaredNorm();
  const double rb2 = rB.squaredNorm();
  // Q = rA^2 rB^2 - 2 rA.rB a^2 + a^4 = |rB| ^2 |rA - a^2 rB/|rB|^2|^2
  const Vec3 image = (a2 / rb2) * rB;
  const double q = rb2 * (rA - image).squaredNorm();
  const double sq = std::sqrt(q);
  const double q32 = q * sq;
  const double q52 = q32 * q;
  const Vec3 u = rb2 * rA - a2 * rB;  // x^A_i rB^2 - x^B_i a^2
  const Vec3 v = ra2 * rB - a2 * rA;  // x^B_j rA^2 - x^A_j a^2
  const double c = a / (4.0 * kPi);
  return -3.0 * c * (u * v.transpose()) / q52 + c * (2.0 * rA * rB.transpose() - a2 * Tensor3::Identity()) / q32;
}

inline Tensor3 gh_tensor_sphere_isolated(const Vec3& rA, const Vec3& rB, double a) {
  Tensor3 t = gh_tensor_sphere_grounded(rA, rB, a);
  const double ra = rA.norm();
  const double rb = rB.norm();
  t += a * (rA * rB.transpose()) / (4.0 * kPi * ra * ra * ra * rb * rb * rb);
  return t;
}

// ---------------------------------------------------------------------------
// Parallel plates
// ---------------------------------------------------------------------------

namespace detail {

/// Term-wise mixed Hessian of the eigenfunction series of the full G, using
/// K0' = -K1 and K0'' = K0 + K1/x. Requires in-plane separation > 0.
inline TensorEval capacitor_series_tensor(const Vec3& rA, const Vec3& rB, double gap, const SeriesCtrl& ctrl) {
  const double dx = rA.x() - rB.x();
  const double dy = rA.y() - rB.y();
  const double rho = std::hypot(dx, dy);
  const double nx = dx / rho;
  const double ny = dy / rho;
  const double kappa = kPi / gap;
  const double phase_a = kappa * (rA.z() + 0.5 * gap);
  const double phase_b = kappa * (rB.z() + 0.5 * gap);
  const double pref = 1.0 / (kPi * gap);
  SeriesMonitor monitor(ctrl, std::exp(-kappa * rho));

  const double nn[2][2] = {{nx * nx, nx * ny}, {ny * nx, ny * ny}};
  const double nv[2] = {nx, ny};

  Tensor3 sum = Tensor3::Zero();
  for (int n = 1; n <= ctrl.n_max; ++n) {
    const double k = n * kappa;
    const auto kk = bessel_k01(k * rho);
    const double sa = std::sin(n * phase_a);
    const double sb = std::sin(n * phase_b);
    const double ca = std::cos(n * phase_a);
    const double cb = std::cos(n * phase_b);
    const double k1_over_rho = k * kk.k1 / rho;

    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 2; ++b) {
        // d_a d'_b K0(k rho) = -d_a d_b K0(k rho)
        const double hess = k * k * kk.k0 * nn[a][b] + k1_over_rho * (2.0 * nn[a][b] - (a == b ? 1.0 : 0.0));
        sum(a, b) += pref * sa * sb * (-hess);
      }
      sum(a, 2) += pref * sa * (k * cb) * (-k * kk.k1 * nv[a]);
      sum(2, a) += pref * (k * ca) * sb * (k * kk.k1 * nv[a]);
    }
    sum(2, 2) += pref * k * k * ca * cb * kk.k0;

    const double envelope = pref * (k * k * (kk.k0 + kk.k1) + 2.0 * k1_over_rho);
    if (monitor.add(envelope, sum.cwiseAbs().maxCoeff())) {
      return {sum, n, true};
    }
  }
  throw_nonconvergence("g_tensor_capacitor", ctrl.n_max, rho, gap);
}

}  // namespace detail

/// Mixed Hessian of the full gap Green function G (free kernel included).
inline TensorEval g_tensor_capacitor(const Vec3& rA, const Vec3& rB, double gap, const SeriesCtrl& ctrl = {}) {
  ctrl.validate();
  detail::check_gap(rA, gap, Closure::Open, "g_tensor_capacitor");
  detail::check_gap(rB, gap, Closure::Open, "g_tensor_capacitor");
  detail::check_distinct(rA, rB, "g_tensor_capacitor");
  if (in_plane_distance(rA, rB) < kLadderThreshold * gap) {
    return {detail::ladder_gh_tensor(rA, rB, gap) + dipole_kernel_tensor(rA, rB), detail::ladder_image_count(), true};
  }
  return detail::capacitor_series_tensor(rA, rB, gap, ctrl);
}

inline TensorEval gh_tensor_capacitor(const Vec3& rA, const Vec3& rB, double gap, const SeriesCtrl& ctrl = {}) {
  ctrl.validate();
  detail::check_gap(rA, gap, Closure::Open, "gh_tensor_capacitor");
  detail::check_gap(rB, gap, Closure::Open, "gh_tensor_capacitor");
  if (in_plane_distance(rA, rB) < kLadderThreshold * gap) {
    return {detail::ladder_gh_tensor(rA, rB, gap), detail::ladder_image_count(), true};
  }
  auto full = detail::capacitor_series_tensor(rA, rB, gap, ctrl);
  full.t -= dipole_kernel_tensor(rA, rB);
  return full;
}

/// Mixed Hessian of the large-separation form of the full gap Green function,
/// G ~ (1/4 pi) sqrt(8/(rho D)) cos(pi z/D) cos(pi z'/D) exp(-pi rho/D).
inline Tensor3 g_tensor_capacitor_asymptotic(const Vec3& rA, const Vec3& rB, double gap) {
  detail::check_gap(rA, gap, Closure::Open, "g_tensor_capacitor_asymptotic");
  detail::check_gap(rB, gap, Closure::Open, "g_tensor_capacitor_asymptotic");
  const double dx = rA.x() - rB.x();
  const double dy = rA.y() - rB.y();
  const double rho = std::hypot(dx, dy);
  if (!(rho > 0.0)) throw GeometryError("g_tensor_capacitor_asymptotic: in-plane separation must be > 0");
  const double n[2] = {dx / rho, dy / rho};
  const double kappa = kPi / gap;
  const double amp = 1.0 / (4.0 * kPi) * std::sqrt(8.0 / gap);
  const double ca = std::cos(kappa * rA.z());
  const double cb = std::cos(kappa * rB.z());
  const double sa = std::sin(kappa * rA.z());
  const double sb = std::sin(kappa * rB.z());

  // f(rho) = rho^-1/2 exp(-kappa rho)
  const double f = std::exp(-kappa * rho) / std::sqrt(rho);
  const double g = 0.5 / rho + kappa;
  const double f1 = -f * g;
  const double f2 = f * (g * g + 0.5 / (rho * rho));

  Tensor3 t;
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const double hess = f2 * n[a] * n[b] + f1 / rho * ((a == b ? 1.0 : 0.0) - n[a] * n[b]);
      t(a, b) = -amp * ca * cb * hess;
    }
    t(a, 2) = amp * ca * (-kappa * sb) * f1 * n[a];
    t(2, a) = amp * (-kappa * sa) * cb * (-f1 * n[a]);
  }
  t(2, 2) = amp * kappa * kappa * sa * sb * f;
  return t;
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

inline TensorEval gh_tensor(const Geometry& g, const Vec3& rA, const Vec3& rB, const SeriesCtrl& ctrl = {}) {
  struct V {
    const Vec3& rA;
    const Vec3& rB;
    const SeriesCtrl& ctrl;
    TensorEval operator()(const FreeSpace&) const { return {Tensor3::Zero(), 0, true}; }
    TensorEval operator()(const Plane&) const { return {gh_tensor_plane(rA, rB), 0, true}; }
    TensorEval operator()(const Capacitor& c) const { return gh_tensor_capacitor(rA, rB, c.gap, ctrl); }
    TensorEval operator()(const SphereGrounded& s) const { return {gh_tensor_sphere_grounded(rA, rB, s.radius), 0, true}; }
    TensorEval operator()(const SphereIsolated& s) const { return {gh_tensor_sphere_isolated(rA, rB, s.radius), 0, true}; }
  };
  return std::visit(V{rA, rB, ctrl}, g);
}

/// d/dr_i d/dr'_j G_H at r = r' = r0. G_H is regular at coincidence; the
/// diagonal feeds the first-order atom-surface energy.
inline Tensor3 gh_coincident_diag(const Geometry& g, const Vec3& r0, const SeriesCtrl& ctrl = {}) {
  if (std::holds_alternative<FreeSpace>(g)) {
    throw GeometryError("gh_coincident_diag: free space has no image part");
  }
  validate_position(g, r0, Closure::Open);
  if (const auto* cap = std::get_if<Capacitor>(&g)) {
    ctrl.validate();
    return detail::ladder_gh_tensor(r0, r0, cap->gap);
  }
  return gh_tensor(g, r0, r0, ctrl).t;
}

}  // namespace dispersia
