#pragma once

// Scalar Dirichlet Green functions, G = 1/(4 pi |r - r'|) + G_H, with
// laplacian G = -delta(r - r') and G = 0 on the conductor.

#include "dispersia/detail/image_ladder.hpp"
#include "dispersia/model.hpp"
#include "dispersia/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace dispersia {

struct GreensEval {
  double value = 0.0;
  int terms_used = 0;  // eigenfunction terms (series) or image count (ladder); 0 otherwise
  bool converged = true;
  double truncation_estimate = 0.0;
};

/// Below this in-plane separation (in units of D) the gap Green function is
/// evaluated from the image ladder instead of the eigenfunction series.
inline constexpr double kLadderThreshold = 0.05;

// ---------------------------------------------------------------------------
// Domain checks. Green functions accept points on the conductor (closed
// domain); atoms must be strictly inside (open domain).
// ---------------------------------------------------------------------------

enum class Closure { Closed, Open };

namespace detail {

inline void check_plane(const Vec3& r, Closure c, const char* fn) {
  require_finite(r, fn);
  const bool ok = c == Closure::Closed ? r.z() >= 0.0 : r.z() > 0.0;
  if (!ok) throw GeometryError(std::string(fn) + ": point must satisfy z " + (c == Closure::Closed ? ">=" : ">") + " 0");
}

inline void check_gap(const Vec3& r, double gap, Closure c, const char* fn) {
  require_finite(r, fn);
  if (!(gap > 0.0) || !std::isfinite(gap)) throw GeometryError(std::string(fn) + ": plate separation must be > 0");
  const double half = 0.5 * gap;
  const bool ok = c == Closure::Closed ? std::abs(r.z()) <= half : std::abs(r.z()) < half;
  if (!ok) throw GeometryError(std::string(fn) + ": point outside the gap |z| < D/2");
}

inline void check_sphere(const Vec3& r, double a, Closure c, const char* fn) {
  require_finite(r, fn);
  if (!(a > 0.0) || !std::isfinite(a)) throw GeometryError(std::string(fn) + ": sphere radius must be > 0");
  const double n = r.norm();
  // closed: allow the last bits lost when a surface point is built as a * unit
  const bool ok = c == Closure::Closed ? n >= a * (1.0 - 4.0 * std::numeric_limits<double>::epsilon()) : n > a;
  if (!ok) throw GeometryError(std::string(fn) + ": point inside the sphere");
}

inline void check_distinct(const Vec3& r, const Vec3& rp, const char* fn) {
  if ((r - rp).norm() == 0.0) throw GeometryError(std::string(fn) + ": coincident points");
}

}  // namespace detail

/// Throws GeometryError unless r is an admissible atom position.
inline void validate_position(const Geometry& g, const Vec3& r, Closure c = Closure::Open) {
  struct V {
    const Vec3& r;
    Closure c;
    void operator()(const FreeSpace&) const { require_finite(r, "free_space"); }
    void operator()(const Plane&) const { detail::check_plane(r, c, "plane"); }
    void operator()(const Capacitor& cap) const { detail::check_gap(r, cap.gap, c, "capacitor"); }
    void operator()(const SphereGrounded& s) const { detail::check_sphere(r, s.radius, c, "sphere_grounded"); }
    void operator()(const SphereIsolated& s) const { detail::check_sphere(r, s.radius, c, "sphere_isolated"); }
  };
  std::visit(V{r, c}, g);
}

/// Distance from r to the nearest conducting surface (infinity in free space).
inline double boundary_distance(const Geometry& g, const Vec3& r) {
  struct V {
    const Vec3& r;
    double operator()(const FreeSpace&) const { return std::numeric_limits<double>::infinity(); }
    double operator()(const Plane&) const { return r.z(); }
    double operator()(const Capacitor& c) const { return 0.5 * c.gap - std::abs(r.z()); }
    double operator()(const SphereGrounded& s) const { return r.norm() - s.radius; }
    double operator()(const SphereIsolated& s) const { return r.norm() - s.radius; }
  };
  return std::visit(V{r}, g);
}

// ---------------------------------------------------------------------------
// Free space
// ---------------------------------------------------------------------------

inline double free_kernel(const Vec3& r, const Vec3& rp) {
  require_finite(r, "free_kernel");
  require_finite(rp, "free_kernel");
  const double d = (r - rp).norm();
  if (d == 0.0) throw GeometryError("free_kernel: coincident points");
  return 1.0 / (4.0 * kPi * d);
}

// ---------------------------------------------------------------------------
// Plane at z = 0
// ---------------------------------------------------------------------------

inline Vec3 mirror_z(const Vec3& r) { return {r.x(), r.y(), -r.z()}; }

inline double gh_plane(const Vec3& r, const Vec3& rp) {
  detail::check_plane(r, Closure::Closed, "gh_plane");
  detail::check_plane(rp, Closure::Closed, "gh_plane");
  const double d = (r - mirror_z(rp)).norm();
  if (d == 0.0) throw GeometryError("gh_plane: both points on the plane at the same location");
  return -1.0 / (4.0 * kPi * d);
}

// ---------------------------------------------------------------------------
// Parallel plates at z = -D/2, +D/2
// ---------------------------------------------------------------------------

namespace detail {

/// Consecutive-small-terms stopping rule shared by the scalar and tensor series.
class SeriesMonitor {
 public:
  SeriesMonitor(const SeriesCtrl& ctrl, double ratio) : ctrl_(ctrl), ratio_(ratio) {}

  /// Record the envelope of term n against the running magnitude; returns
  /// true once the last min_terms envelopes are all below rel_tol * scale.
  bool add(double envelope, double running_magnitude) {
    if (first_ < 0.0) first_ = envelope;
    last_ = envelope;
    const double scale = std::max(running_magnitude, ctrl_.rel_tol * first_);
    if (envelope <= ctrl_.rel_tol * scale) {
      ++small_;
    } else {
      small_ = 0;
    }
    return small_ >= ctrl_.min_terms;
  }

  /// Geometric bound on the neglected tail.
  double tail_estimate() const { return ratio_ < 1.0 ? last_ * ratio_ / (1.0 - ratio_) : last_; }

 private:
  SeriesCtrl ctrl_;
  double ratio_;
  double first_ = -1.0;
  double last_ = 0.0;
  int small_ = 0;
};

[[noreturn]] inline void throw_nonconvergence(const char* fn, int n_max, double rho, double gap) {
  throw ConvergenceError(std::string(fn) + ": series not converged after n_max = " + std::to_string(n_max) +
                         " terms (in-plane separation / D = " + std::to_string(rho / gap) + ")");
}

/// Full Green function from the eigenfunction expansion
/// G = (1/pi D) sum_n sin(n pi zt/D) sin(n pi zt'/D) K0(n pi rho/D).
inline GreensEval capacitor_series(const Vec3& r, const Vec3& rp, double gap, const SeriesCtrl& ctrl) {
  const double rho = in_plane_distance(r, rp);
  const double kappa = kPi / gap;
  const double phase_a = kappa * (r.z() + 0.5 * gap);
  const double phase_b = kappa * (rp.z() + 0.5 * gap);
  const double pref = 1.0 / (kPi * gap);
  SeriesMonitor monitor(ctrl, std::exp(-kappa * rho));

  double sum = 0.0;
  for (int n = 1; n <= ctrl.n_max; ++n) {
    const double k0 = bessel_k0(n * kappa * rho);
    const double envelope = pref * k0;
    sum += envelope * std::sin(n * phase_a) * std::sin(n * phase_b);
    if (monitor.add(envelope, std::abs(sum))) {
      return {sum, n, true, monitor.tail_estimate()};
    }
  }
  throw_nonconvergence("g_capacitor", ctrl.n_max, rho, gap);
}

}  // namespace detail

/// Full Dirichlet Green function of the gap. Uses the eigenfunction series for
/// in-plane separations >= 0.05 D and the image ladder below.
inline GreensEval g_capacitor(const Vec3& r, const Vec3& rp, double gap, const SeriesCtrl& ctrl = {}) {
  ctrl.validate();
  detail::check_gap(r, gap, Closure::Closed, "g_capacitor");
  detail::check_gap(rp, gap, Closure::Closed, "g_capacitor");
  detail::check_distinct(r, rp, "g_capacitor");
  const double rho = in_plane_distance(r, rp);
  if (rho < kLadderThreshold * gap) {
    const double gh = detail::ladder_gh(r, rp, gap);
    return {gh + free_kernel(r, rp), detail::ladder_image_count(), true, 0.0};
  }
  return detail::capacitor_series(r, rp, gap, ctrl);
}

namespace detail {

/// cos(pi z / D), exactly zero on the plates.
inline double plate_cosine(double z, double gap) {
  return std::abs(z) == 0.5 * gap ? 0.0 : std::cos(kPi * z / gap);
}

}  // namespace detail

/// Leading term of the series with K0 replaced by its large-argument form;
/// z is measured from the midplane. Valid for in-plane separations of order D
/// and beyond.
inline double g_capacitor_asymptotic(const Vec3& r, const Vec3& rp, double gap) {
  detail::check_gap(r, gap, Closure::Closed, "g_capacitor_asymptotic");
  detail::check_gap(rp, gap, Closure::Closed, "g_capacitor_asymptotic");
  const double rho = in_plane_distance(r, rp);
  if (!(rho > 0.0)) throw GeometryError("g_capacitor_asymptotic: in-plane separation must be > 0");
  const double kappa = kPi / gap;
  return 1.0 / (4.0 * kPi) * std::sqrt(8.0 / (rho * gap)) * detail::plate_cosine(r.z(), gap) *
         detail::plate_cosine(rp.z(), gap) * std::exp(-kappa * rho);
}

inline GreensEval gh_capacitor(const Vec3& r, const Vec3& rp, double gap, const SeriesCtrl& ctrl = {}) {
  ctrl.validate();
  detail::check_gap(r, gap, Closure::Closed, "gh_capacitor");
  detail::check_gap(rp, gap, Closure::Closed, "gh_capacitor");
  const double rho = in_plane_distance(r, rp);
  if (rho < kLadderThreshold * gap) {
    return {detail::ladder_gh(r, rp, gap), detail::ladder_image_count(), true, 0.0};
  }
  auto g = detail::capacitor_series(r, rp, gap, ctrl);
  g.value -= free_kernel(r, rp);
  return g;
}

// ---------------------------------------------------------------------------
// Sphere of radius a at the origin
// ---------------------------------------------------------------------------

/// Image of a unit charge at rp in a grounded sphere: strength -a/|rp| at
/// a^2 rp/|rp|^2.
inline double gh_sphere_grounded(const Vec3& r, const Vec3& rp, double a) {
  detail::check_sphere(r, a, Closure::Closed, "gh_sphere_grounded");
  detail::check_sphere(rp, a, Closure::Closed, "gh_sphere_grounded");
  // r^2 r'^2 - 2 r.r' a^2 + a^4 = |r' r - a^2 r'_hat|^2
  const double rpn = rp.norm();
  const Vec3 scaled = rpn * r - (a * a) * rp.normalized();
  const double q = scaled.norm();
  if (q == 0.0) throw GeometryError("gh_sphere_grounded: coincident points on the sphere");
  return -a / (4.0 * kPi * q);
}

/// Isolated neutral sphere: grounded image plus a compensating charge at the centre.
inline double gh_sphere_isolated(const Vec3& r, const Vec3& rp, double a) {
  const double grounded = gh_sphere_grounded(r, rp, a);
  return grounded + a / (4.0 * kPi * r.norm() * rp.norm());
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

inline GreensEval gh(const Geometry& g, const Vec3& r, const Vec3& rp, const SeriesCtrl& ctrl = {}) {
  struct V {
    const Vec3& r;
    const Vec3& rp;
    const SeriesCtrl& ctrl;
    GreensEval operator()(const FreeSpace&) const { return {0.0, 0, true, 0.0}; }
    GreensEval operator()(const Plane&) const { return {gh_plane(r, rp), 0, true, 0.0}; }
    GreensEval operator()(const Capacitor& c) const { return gh_capacitor(r, rp, c.gap, ctrl); }
    GreensEval operator()(const SphereGrounded& s) const { return {gh_sphere_grounded(r, rp, s.radius), 0, true, 0.0}; }
    GreensEval operator()(const SphereIsolated& s) const { return {gh_sphere_isolated(r, rp, s.radius), 0, true, 0.0}; }
  };
  return std::visit(V{r, rp, ctrl}, g);
}

}  // namespace dispersia
