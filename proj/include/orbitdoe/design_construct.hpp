#pragma once

#include <optional>
#include <string>
#include <vector>

#include "orbitdoe/orbit_region.hpp"
#include "orbitdoe/scalar.hpp"
#include "orbitdoe/verify.hpp"

namespace orbitdoe {

/// B_K = (K - sqrt(3K-2))/2 for even K, (K - sqrt(3K))/2 for odd K.
double threshold_b(int K);

/// B_K as an integer when it is one (K = 2, 3, 6, 22, 27, ...).
std::optional<int> integer_threshold(int K);
inline bool is_integer_threshold(int K) { return integer_threshold(K).has_value(); }

/// L <= B_K, decided in integer arithmetic.
bool at_or_below_threshold(int K, int L);

/// Central orbit index: K/2 for even K, (K-1)/2 for odd K.
inline int central_orbit(int K) { return K / 2; }

/// Orbit indices ell with B_K <= ell <= (K - sqrt K)/2 and ell > L.
std::vector<int> admissible_ells(int K, int L);

/// The 2^K full factorial as orbit weights C(K,k)/2^K.
ExactOrbitDesign full_factorial_exact(int K);

/// Identity-information design on the outer orbits L = B_K and the central orbit(s).
/// Requires an integer threshold.
ExactOrbitDesign identity_design_exact(int K);
OrbitDesign identity_design(int K);

/// Three-symmetric-orbit design alpha xi_(L) + (1-alpha) xi_(ell) with identity information.
struct WideDesignSpec {
  int K = 0;
  int L = 0;
  std::optional<int> ell;  // empty for the identity design at L = B_K and for K <= 3
  Rational alpha;
  Rational w_L;    // inner weight of xi_(L)
  Rational w_ell;  // inner weight of xi_(ell)
  ExactOrbitDesign exact;
  OrbitDesign result;
};

/// Requires L <= B_K. Without ell the smallest admissible one is used,
/// or the identity design when L equals an integer B_K.
WideDesignSpec wide_design(int K, int L, std::optional<int> ell = std::nullopt);

/// Two-symmetric-orbit design w xi_L + (central weight) + w xi_{K-L}.
OrbitDesign narrow_family_design(int K, int L, double w);

/// log det along the narrow family and its derivative in w.
double narrow_log_det(int K, int L, double w);
double narrow_log_det_derivative(int K, int L, double w);

struct NarrowDesignSpec {
  int K = 0;
  int L = 0;
  double w_star = 0;
  OrbitDesign result;
  double log_det = 0;
  double d_efficiency = 0;
  KwReport kw;
};

/// D-optimal weights for B_K < L < K/2 by maximising log det over w in (0, 1/2).
NarrowDesignSpec narrow_design(int K, int L);

/// Wide design for max(L, K-U) when both bounds clear the threshold.
OrbitDesign asymmetric_reduce(int K, int L, int U, std::optional<int> ell = std::nullopt);

enum class Regime { wide, threshold, narrow, full_factorial };

std::string to_string(Regime regime);

struct OptimalDesign {
  Region region;
  Regime regime;
  OrbitDesign design;
  std::optional<int> ell;
  KwReport kw;
};

/// Picks the construction for the region by comparing the bounds with B_K and
/// certifies the result with kw_check.
OptimalDesign optimal_design(const Region& region, std::optional<int> ell = std::nullopt);

}  // namespace orbitdoe
