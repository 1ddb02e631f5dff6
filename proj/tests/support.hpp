#pragma once

#include "dispersia/model.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <random>

namespace testing_support {

using dispersia::Tensor3;
using dispersia::Vec3;
using dispersia::kPi;

inline double rel_err(double got, double want) {
  const double d = std::abs(got - want);
  return want == 0.0 ? d : d / std::abs(want);
}

/// Max entry difference relative to the largest entry of `want`.
inline double tensor_err(const Tensor3& got, const Tensor3& want) {
  const double scale = want.cwiseAbs().maxCoeff();
  const double d = (got - want).cwiseAbs().maxCoeff();
  return scale == 0.0 ? d : d / scale;
}

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }

  Vec3 unit() {
    std::normal_distribution<double> n;
    Vec3 v(n(rng_), n(rng_), n(rng_));
    return v.normalized();
  }

  Tensor3 rotation() {
    std::normal_distribution<double> n;
    Eigen::Quaterniond q(n(rng_), n(rng_), n(rng_), n(rng_));
    q.normalize();
    return q.toRotationMatrix();
  }

  /// Point above the plane z = 0 with height in [hmin, hmax].
  Vec3 above_plane(double hmin, double hmax, double spread) {
    return {uniform(-spread, spread), uniform(-spread, spread), uniform(hmin, hmax)};
  }

  /// Point in the gap of width D at least margin * D from either plate.
  Vec3 in_gap(double gap, double margin, double spread) {
    const double zmax = (0.5 - margin) * gap;
    return {uniform(-spread, spread), uniform(-spread, spread), uniform(-zmax, zmax)};
  }

  /// Point outside a sphere of radius a with |r| in [rmin, rmax].
  Vec3 outside_sphere(double rmin, double rmax) { return log_uniform(rmin, rmax) * unit(); }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// Colinear sphere energies in reduced units with lambda = 1; same_side
/// selects theta = 0.
struct Colinear {
  double na1;
  double na2;
};

inline Colinear grounded_colinear(double ra, double rb, double a, bool same_side) {
  const double sep = same_side ? std::abs(ra - rb) : ra + rb;
  const double q = same_side ? ra * rb - a * a : ra * rb + a * a;
  const double sign = same_side ? -1.0 : 1.0;
  const double na1 = sign * a * ra * rb / (36.0 * kPi * kPi * std::pow(sep, 3) * std::pow(q, 3));
  const double mid = same_side ? 2.0 : -2.0;
  const double na2 = -(3.0 * std::pow(a, 6) + mid * std::pow(a, 4) * ra * rb + a * a * ra * ra * rb * rb) /
                     (144.0 * kPi * kPi * std::pow(q, 6));
  return {na1, na2};
}

inline Colinear isolated_colinear(double ra, double rb, double a, bool same_side) {
  const double sep = same_side ? std::abs(ra - rb) : ra + rb;
  const double q = same_side ? ra * rb - a * a : ra * rb + a * a;
  const double sign = same_side ? -1.0 : 1.0;
  const double mono = a / (ra * ra * rb * rb);
  const double na1 = sign / (36.0 * kPi * kPi * std::pow(sep, 3)) * (a * ra * rb / std::pow(q, 3) - mono);
  const double cubic = same_side ? a * ra * rb + std::pow(a, 3) : a * ra * rb - std::pow(a, 3);
  const double bracket = std::pow(cubic / std::pow(q, 3) - mono, 2) + 2.0 * std::pow(a, 6) / std::pow(q, 6);
  return {na1, -bracket / (144.0 * kPi * kPi)};
}

}  // namespace testing_support
