#pragma once

// Domain types shared by every dispersia module: positions, tensors, couplings,
// geometries and numerical control parameters.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <variant>

namespace dispersia {

using Vec3 = Eigen::Vector3d;
using Tensor3 = Eigen::Matrix3d;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a function (e.g. K0 at x <= 0).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A position violates the geometry: inside the sphere, outside the gap,
/// behind the plane, coincident atoms, or an FD stencil leaving the domain.
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// A series or extrapolation did not reach the requested tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Invalid control parameters or configuration values.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Constants and units
// ---------------------------------------------------------------------------

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kVacuumPermittivity = 8.8541878128e-12;  // F/m

enum class UnitMode { Reduced, SI };

/// epsilon_0 in the active unit system; reduced units set it to 1.
constexpr double permittivity(UnitMode mode) {
  return mode == UnitMode::SI ? kVacuumPermittivity : 1.0;
}

/// The scalar pair coupling Lambda_AB (sum over excited states of squared
/// transition dipoles over energy denominators). Treated as an input.
class PairCoupling {
 public:
  PairCoupling() = default;
  PairCoupling(double lambda_ab, UnitMode mode) : lambda_(lambda_ab), mode_(mode) {
    if (!(lambda_ab > 0.0) || !std::isfinite(lambda_ab)) {
      throw ConfigError("PairCoupling: lambda_ab must be finite and > 0");
    }
  }

  static PairCoupling reduced(double lambda_ab = 1.0) { return {lambda_ab, UnitMode::Reduced}; }
  static PairCoupling si(double lambda_ab) { return {lambda_ab, UnitMode::SI}; }

  double lambda_ab() const { return lambda_; }
  UnitMode unit_mode() const { return mode_; }
  double epsilon0() const { return permittivity(mode_); }

 private:
  double lambda_ = 1.0;
  UnitMode mode_ = UnitMode::Reduced;
};

/// Ground-state mean squares <(d_m)^2> for m = x, y, z.
struct AtomPolarization {
  std::array<double, 3> d2{0.0, 0.0, 0.0};

  static AtomPolarization isotropic(double d2_total) {
    const double c = d2_total / 3.0;
    return {{c, c, c}};
  }

  void validate() const {
    for (double v : d2) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw ConfigError("AtomPolarization: components must be finite and >= 0");
      }
    }
  }
};

// ---------------------------------------------------------------------------
// Geometries
// ---------------------------------------------------------------------------

struct FreeSpace {};

/// Grounded conducting plane at z = 0; the physical half space is z > 0.
struct Plane {};

/// Grounded parallel plates at z = -D/2 and z = +D/2.
struct Capacitor {
  double gap = 1.0;
};

/// Grounded sphere of radius a centred at the origin.
struct SphereGrounded {
  double radius = 1.0;
};

/// Isolated neutral sphere of radius a centred at the origin.
struct SphereIsolated {
  double radius = 1.0;
};

using Geometry = std::variant<FreeSpace, Plane, Capacitor, SphereGrounded, SphereIsolated>;

inline std::string geometry_name(const Geometry& g) {
  struct Visitor {
    std::string operator()(const FreeSpace&) const { return "free_space"; }
    std::string operator()(const Plane&) const { return "plane"; }
    std::string operator()(const Capacitor&) const { return "capacitor"; }
    std::string operator()(const SphereGrounded&) const { return "sphere_grounded"; }
    std::string operator()(const SphereIsolated&) const { return "sphere_isolated"; }
  };
  return std::visit(Visitor{}, g);
}

// ---------------------------------------------------------------------------
// Numerical control
// ---------------------------------------------------------------------------

/// Truncation control for the parallel-plate eigenfunction series.
struct SeriesCtrl {
  double rel_tol = 1e-12;
  int n_max = 100000;
  int min_terms = 8;

  void validate() const {
    if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw ConfigError("SeriesCtrl: need 0 < rel_tol < 1");
    if (min_terms < 1) throw ConfigError("SeriesCtrl: need min_terms >= 1");
    if (n_max < min_terms) throw ConfigError("SeriesCtrl: need n_max >= min_terms");
  }
};

/// Finite-difference control. `base_step` is expressed as a fraction of the
/// characteristic length of the configuration being differentiated.
struct FdCtrl {
  double base_step = 1e-5;
  int richardson_levels = 2;

  void validate() const {
    if (!(base_step > 0.0) || !std::isfinite(base_step)) throw ConfigError("FdCtrl: need base_step > 0");
    if (richardson_levels < 0) throw ConfigError("FdCtrl: need richardson_levels >= 0");
  }
};

// ---------------------------------------------------------------------------
// Small helpers
// ---------------------------------------------------------------------------

inline bool all_finite(const Vec3& v) { return v.allFinite(); }

inline void require_finite(const Vec3& v, const char* what) {
  if (!v.allFinite()) throw GeometryError(std::string(what) + ": non-finite coordinate");
}

inline double in_plane_distance(const Vec3& r, const Vec3& rp) {
  return std::hypot(r.x() - rp.x(), r.y() - rp.y());
}

}  // namespace dispersia
