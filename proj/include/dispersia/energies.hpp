#pragma once

// Second-order dispersion energies of two atoms near a grounded conductor:
// the vacuum London term and the two non-additive terms built from the image
// tensor T = grad grad' G_H, plus the first-order atom-surface energy.

#include "dispersia/greens.hpp"
#include "dispersia/model.hpp"
#include "dispersia/tensor.hpp"

#include <cmath>

namespace dispersia {

struct Prefactors {
  double london_coeff;  // Lambda / (24 pi^2 eps0^2)
  double na1_coeff;     // Lambda / (18 pi eps0^2)
  double na2_coeff;     // Lambda / (9 eps0^2)
};

/// Reduced mode takes eps0 = 1 and multiplies by the reduced Lambda (1 by
/// default), so E_Lon(R) = -1/(24 pi^2 R^6) for unit coupling.
inline Prefactors reduced_prefactors(const PairCoupling& coupling) {
  const double eps0 = coupling.epsilon0();
  const double s = coupling.lambda_ab() / (eps0 * eps0);
  return {s / (24.0 * kPi * kPi), s / (18.0 * kPi), s / 9.0};
}

struct EnergyBreakdown {
  double e_london = 0.0;
  double e_na1 = 0.0;
  double e_na2 = 0.0;
  double e_na_total = 0.0;
  double ratio = 0.0;  // e_na_total / e_london
  int terms_used = 0;
  bool converged = true;
};

namespace detail {

inline double pair_distance(const Vec3& rA, const Vec3& rB, const char* fn) {
  require_finite(rA, fn);
  require_finite(rB, fn);
  const double r = (rA - rB).norm();
  if (r == 0.0) throw GeometryError(std::string(fn) + ": coincident atoms");
  return r;
}

/// Tr T - 3 R^T T R with R the unit vector from B to A.
inline double projected_trace(const Vec3& rA, const Vec3& rB, const Tensor3& t) {
  const Vec3 n = (rA - rB).normalized();
  return t.trace() - 3.0 * n.dot(t * n);
}

}  // namespace detail

inline double london_energy(const PairCoupling& coupling, const Vec3& rA, const Vec3& rB) {
  const double r = detail::pair_distance(rA, rB, "london_energy");
  const double r3 = r * r * r;
  return -reduced_prefactors(coupling).london_coeff / (r3 * r3);
}

/// Cross term between the vacuum and the image couplings:
/// -Lambda/(18 pi eps0^2 R^3) (Tr T - 3 R^T T R).
inline double ena1(const PairCoupling& coupling, const Vec3& rA, const Vec3& rB, const Tensor3& t) {
  const double r = detail::pair_distance(rA, rB, "ena1");
  return -reduced_prefactors(coupling).na1_coeff / (r * r * r) * detail::projected_trace(rA, rB, t);
}

/// Pure image term: -Lambda/(9 eps0^2) sum_ij T_ij^2. Never positive.
inline double ena2(const PairCoupling& coupling, const Tensor3& t) {
  return -reduced_prefactors(coupling).na2_coeff * t.squaredNorm();
}

/// E_NA / E_Lon; depends only on geometry.
inline double na_ratio(const Vec3& rA, const Vec3& rB, const Tensor3& t) {
  const double r = detail::pair_distance(rA, rB, "na_ratio");
  const double r3 = r * r * r;
  return 4.0 * kPi * r3 / 3.0 * detail::projected_trace(rA, rB, t) + 8.0 * kPi * kPi * r3 * r3 / 3.0 * t.squaredNorm();
}

/// Assemble the breakdown from an already computed image tensor.
inline EnergyBreakdown energy_breakdown(const PairCoupling& coupling, const Vec3& rA, const Vec3& rB,
                                        const TensorEval& te) {
  EnergyBreakdown out;
  out.e_london = london_energy(coupling, rA, rB);
  out.e_na1 = ena1(coupling, rA, rB, te.t);
  out.e_na2 = ena2(coupling, te.t);
  out.e_na_total = out.e_na1 + out.e_na2;
  out.ratio = out.e_na_total / out.e_london;
  out.terms_used = te.terms_used;
  out.converged = te.converged;
  return out;
}

inline EnergyBreakdown energy_breakdown(const PairCoupling& coupling, const Geometry& g, const Vec3& rA,
                                        const Vec3& rB, const SeriesCtrl& ctrl = {}) {
  validate_position(g, rA);
  validate_position(g, rB);
  detail::pair_distance(rA, rB, "energy_breakdown");
  return energy_breakdown(coupling, rA, rB, gh_tensor(g, rA, rB, ctrl));
}

/// E_Lon + E_NA for the plates straight from the full-G tensor:
/// -Lambda/(9 eps0^2) sum_ij G_ij^2.
inline double crossed_energy_capacitor_direct(const PairCoupling& coupling, const Vec3& rA, const Vec3& rB, double gap,
                                              const SeriesCtrl& ctrl = {}) {
  const auto full = g_tensor_capacitor(rA, rB, gap, ctrl);
  return -reduced_prefactors(coupling).na2_coeff * full.t.squaredNorm();
}

/// First-order energy of one atom and the surface:
/// (1/2 eps0) sum_m <d_m^2> [grad_m grad'_m G_H](r, r).
inline double atom_surface_energy(const AtomPolarization& atom, const Geometry& g, const Vec3& r,
                                  const SeriesCtrl& ctrl = {}, UnitMode mode = UnitMode::Reduced) {
  atom.validate();
  if (std::holds_alternative<FreeSpace>(g)) {
    require_finite(r, "atom_surface_energy");
    return 0.0;
  }
  const Tensor3 t = gh_coincident_diag(g, r, ctrl);
  double s = 0.0;
  for (int m = 0; m < 3; ++m) s += atom.d2[static_cast<std::size_t>(m)] * t(m, m);
  return s / (2.0 * permittivity(mode));
}

}  // namespace dispersia
