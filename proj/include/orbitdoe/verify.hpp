#pragma once

#include <map>
#include <string>

#include "orbitdoe/info_matrix.hpp"
#include "orbitdoe/moments.hpp"
#include "orbitdoe/orbit_region.hpp"

namespace orbitdoe {

/// Orbitwise sensitivity psi~(k) = a4 t^4 + a2 t^2 + a0 with t = 2k - K.
template <class Scalar>
struct SensitivityPolyT {
  int K = 0;
  Scalar a0{0};
  Scalar a2{0};
  Scalar a4{0};

  Scalar at(int k) const {
    const Scalar t(2 * k - K);
    const Scalar t2 = t * t;
    return a4 * t2 * t2 + a2 * t2 + a0;
  }
};

using SensitivityPoly = SensitivityPolyT<double>;

/// Coefficients of f(x)' M^-1 f(x) on O_k for a regular symmetric design.
///
/// Expands c0 - 2 c2 x~'1 + x' M11^-1 x + x~' C22 x~ using x'1 = t,
/// x~'1 = (t^2 - K)/2, x~'x~ = C(K,2) and x~' S S' x~ = (K-2) t^2 + K.
template <class Scalar>
SensitivityPolyT<Scalar> sensitivity_poly(int K, const MomentSetT<Scalar>& m) {
  const auto c = inverse_coefficients(K, m);
  const Scalar k(K);
  const Scalar n = k * (k - 1) / Scalar(2);
  const Scalar s = c.c22_scale;
  const Scalar d_minus_o = c.m11_inv_diag - c.m11_inv_offdiag;
  SensitivityPolyT<Scalar> poly;
  poly.K = K;
  poly.a4 = -s * c.delta_J / Scalar(4);
  poly.a2 = c.m11_inv_offdiag - c.c2 - s * c.delta_S * (k - 2) + s * c.delta_J * k / Scalar(2);
  poly.a0 = c.c0 + c.c2 * k + d_minus_o * k + s * n - s * c.delta_S * k - s * c.delta_J * k * k / Scalar(4);
  return poly;
}

/// Outcome of the equivalence-theorem check psi(x) <= p over a region.
struct KwReport {
  int p = 0;
  double tolerance = 0;
  double max_violation = 0;        // max_k psi~(k) - p over the region
  int argmax_orbit = -1;
  double max_support_deviation = 0;  // max |psi~(k) - p| over supported orbits
  std::map<int, double> per_orbit;   // k -> psi~(k)
  bool passed = false;
};

inline constexpr double kDefaultKwTolerance = 1e-9;

/// Certifies D-optimality on the region. Symmetric designs use the closed-form
/// polynomial; others fall back to a dense inverse at one point per orbit.
KwReport kw_check(const Region& region, const OrbitDesign& design, double tol = kDefaultKwTolerance);

/// log det M(design); -infinity when singular.
double log_det(const OrbitDesign& design);

/// det(M)^(1/p) relative to the full factorial; 0 for singular designs.
double d_efficiency(const OrbitDesign& design);

/// Largest K brute_force_info accepts without an explicit override.
inline constexpr int kBruteForceMaxFactors = 12;

/// Sum over every point x of each supported orbit of (w_k / C(K,k)) f(x) f(x)'.
///
/// Orbit sums are accumulated in integers, so the only rounding happens in the
/// final weighted combination (compensated for floating point, exact for Rational).
template <class Scalar>
InfoMatrixT<Scalar> brute_force_info(const OrbitDesignT<Scalar>& design, bool allow_large = false);

/// Integer Gram matrix sum_{x in O_k} f(x) f(x)'.
Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> orbit_gram(int K, int k);

}  // namespace orbitdoe
