#pragma once

// Forces as -grad E by central differences with Richardson extrapolation,
// split into the London, non-additive and first-order atom-surface parts.

#include "dispersia/energies.hpp"
#include "dispersia/greens.hpp"
#include "dispersia/model.hpp"
#include "dispersia/tensor.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <type_traits>
#include <vector>

namespace dispersia {

enum class Which { A, B };

struct AtomPair {
  Vec3 a = Vec3::Zero();
  Vec3 b = Vec3::Zero();
  AtomPolarization pol_a{};
  AtomPolarization pol_b{};
};

struct ForceBreakdown {
  Vec3 f_london = Vec3::Zero();
  Vec3 f_na = Vec3::Zero();
  Vec3 f_surface_first_order = Vec3::Zero();
};

/// Disagreement allowed between the last two Richardson levels, relative to
/// the natural force scale max(|F|, |E|/length).
inline constexpr double kRichardsonTolerance = 1e-4;

struct FdGradient {
  Vec3 grad = Vec3::Zero();
  double residual = 0.0;  // max |level L - level L-1| over components
};

/// Central-difference gradient of `energy` at x, Richardson-extrapolated over
/// the steps h 2^levels, ..., 2h, h. The finest step is h.
template <class EnergyFn>
FdGradient fd_gradient(EnergyFn&& energy, const Vec3& x, double h, int levels) {
  FdGradient out;
  for (int i = 0; i < 3; ++i) {
    std::vector<std::vector<double>> table(static_cast<std::size_t>(levels) + 1);
    double step = std::ldexp(h, levels);
    for (int k = 0; k <= levels; ++k) {
      Vec3 xp = x;
      Vec3 xm = x;
      xp[i] += step;
      xm[i] -= step;
      auto& row = table[static_cast<std::size_t>(k)];
      row.push_back((energy(xp) - energy(xm)) / (xp[i] - xm[i]));
      double factor = 4.0;
      for (int j = 1; j <= k; ++j) {
        const double finer = row[static_cast<std::size_t>(j - 1)];
        const double coarser = table[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(j - 1)];
        row.push_back(finer + (finer - coarser) / (factor - 1.0));
        factor *= 4.0;
      }
      step *= 0.5;
    }
    const auto& last = table.back();
    out.grad[i] = last.back();
    if (levels > 0) {
      out.residual = std::max(out.residual, std::abs(last.back() - last[last.size() - 2]));
    }
  }
  return out;
}

namespace detail {

inline void check_richardson(const FdGradient& g, double energy_scale, double length, const char* part) {
  const double scale = std::max(g.grad.cwiseAbs().maxCoeff(), std::abs(energy_scale) / length);
  if (g.residual > kRichardsonTolerance * scale) {
    throw ConvergenceError(std::string("force_on_atom: Richardson levels disagree for the ") + part +
                           " force (residual " + std::to_string(g.residual) + ", scale " + std::to_string(scale) + ")");
  }
}

}  // namespace detail

/// Force on one atom with a caller-supplied image-tensor provider
/// `TensorEval provider(const Vec3& rA, const Vec3& rB)`. The geometry supplies
/// the domain and the first-order surface energy.
template <class TensorProvider>
  requires std::is_invocable_r_v<TensorEval, TensorProvider, const Vec3&, const Vec3&>
ForceBreakdown force_on_atom(Which which, const PairCoupling& coupling, const AtomPair& atoms, const Geometry& g,
                             TensorProvider&& provider, const FdCtrl& fd = {}, const SeriesCtrl& ctrl = {}) {
  fd.validate();
  ctrl.validate();
  validate_position(g, atoms.a);
  validate_position(g, atoms.b);
  const Vec3 moving = which == Which::A ? atoms.a : atoms.b;
  const Vec3 other = which == Which::A ? atoms.b : atoms.a;
  const AtomPolarization& pol = which == Which::A ? atoms.pol_a : atoms.pol_b;
  const double separation = (moving - other).norm();
  if (separation == 0.0) throw GeometryError("force_on_atom: coincident atoms");

  const double length = std::min(separation, boundary_distance(g, moving));
  const double h = fd.base_step * length;
  const double widest = std::ldexp(h, fd.richardson_levels);
  for (int i = 0; i < 3; ++i) {
    for (double s : {widest, -widest}) {
      Vec3 p = moving;
      p[i] += s;
      try {
        validate_position(g, p);
      } catch (const GeometryError&) {
        throw GeometryError("force_on_atom: finite-difference stencil leaves the domain (base_step too large)");
      }
      if ((p - other).norm() <= 0.5 * separation) {
        throw GeometryError("force_on_atom: finite-difference stencil reaches the other atom (base_step too large)");
      }
    }
  }

  auto place = [&](const Vec3& p) { return which == Which::A ? std::pair{p, other} : std::pair{other, p}; };
  auto e_london = [&](const Vec3& p) {
    const auto [ra, rb] = place(p);
    return london_energy(coupling, ra, rb);
  };
  auto e_na = [&](const Vec3& p) {
    const auto [ra, rb] = place(p);
    const TensorEval te = provider(ra, rb);
    return ena1(coupling, ra, rb, te.t) + ena2(coupling, te.t);
  };
  auto e_surface = [&](const Vec3& p) { return atom_surface_energy(pol, g, p, ctrl, coupling.unit_mode()); };

  ForceBreakdown out;
  const FdGradient gl = fd_gradient(e_london, moving, h, fd.richardson_levels);
  detail::check_richardson(gl, e_london(moving), length, "London");
  out.f_london = -gl.grad;

  const FdGradient gn = fd_gradient(e_na, moving, h, fd.richardson_levels);
  detail::check_richardson(gn, e_na(moving), length, "non-additive");
  out.f_na = -gn.grad;

  if (!std::holds_alternative<FreeSpace>(g) && (pol.d2[0] != 0.0 || pol.d2[1] != 0.0 || pol.d2[2] != 0.0)) {
    const FdGradient gs = fd_gradient(e_surface, moving, h, fd.richardson_levels);
    detail::check_richardson(gs, e_surface(moving), length, "atom-surface");
    out.f_surface_first_order = -gs.grad;
  }
  return out;
}

inline ForceBreakdown force_on_atom(Which which, const PairCoupling& coupling, const AtomPair& atoms,
                                    const Geometry& g, const FdCtrl& fd = {}, const SeriesCtrl& ctrl = {}) {
  return force_on_atom(
      which, coupling, atoms, g, [&](const Vec3& ra, const Vec3& rb) { return gh_tensor(g, ra, rb, ctrl); }, fd, ctrl);
}

/// Atom B at distance rb_dist from the sphere centre, atom A displaced from B
/// by separation perpendicular to r_B. Returns |F_NA . R_hat| / |F_Lon . R_hat|
/// for the force on B, R_hat being the unit vector from B to A.
inline double sphere_transverse_force_ratio(double rb_dist, double separation, double a, bool grounded,
                                            const PairCoupling& coupling, const FdCtrl& fd = {},
                                            const SeriesCtrl& ctrl = {}) {
  if (!(separation > 0.0)) throw GeometryError("sphere_transverse_force_ratio: separation must be > 0");
  const Geometry g = grounded ? Geometry{SphereGrounded{a}} : Geometry{SphereIsolated{a}};
  AtomPair atoms;
  atoms.b = Vec3(0.0, 0.0, rb_dist);
  atoms.a = atoms.b + Vec3(separation, 0.0, 0.0);
  validate_position(g, atoms.a);
  validate_position(g, atoms.b);
  const ForceBreakdown f = force_on_atom(Which::B, coupling, atoms, g, fd, ctrl);
  const Vec3 rhat = (atoms.a - atoms.b).normalized();
  return std::abs(f.f_na.dot(rhat)) / std::abs(f.f_london.dot(rhat));
}

}  // namespace dispersia
