#include "orbitdoe/design_construct.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <cstdint>

#include "orbitdoe/errors.hpp"
#include "orbitdoe/info_matrix.hpp"
#include "orbitdoe/moments.hpp"

namespace orbitdoe {

namespace {

std::int64_t threshold_radicand(int K) { return K % 2 == 0 ? 3 * std::int64_t{K} - 2 : 3 * std::int64_t{K}; }

std::int64_t square(std::int64_t x) { return x * x; }

void require_k(int K, const char* who) {
  if (K < 2 || K > kMaxExactFactors) throw std::domain_error(std::string(who) + ": K must lie in 2..64");
}

void require_estimable(int K, int bound) {
  if (K <= 3 && bound >= 1)
    throw EstimabilityError("K=" + std::to_string(K) +
                            ": every restriction excludes part of the full factorial, which is required to estimate all "
                            "main effects and interactions");
}

/// Inner weight of the identity-moment design xi_(x) on orbits x, centre, K-x.
Rational inner_weight(int K, int x) {
  const std::int64_t t2 = square(2 * std::int64_t{x} - K);
  if (K % 2 == 0) return Rational(K, 2 * t2);
  return Rational(K - 1, 2 * (t2 - 1));
}

/// Central weight per central orbit of xi_(x).
Rational centre_weight(int K, const Rational& inner) {
  return K % 2 == 0 ? Rational(1) - 2 * inner : Rational(1, 2) - inner;
}

Rational mixing_alpha(int K, int L, int ell) {
  const std::int64_t num = threshold_radicand(K) - square(2 * std::int64_t{ell} - K);
  const std::int64_t den = 4 * std::int64_t{ell - L} * (K - L - ell);
  return Rational(num, den);
}

ExactOrbitDesign assemble_wide(int K, int L, std::optional<int> ell, const Rational& alpha) {
  Vector<Rational> half = Vector<Rational>::Constant(K / 2 + 1, Rational(0));
  const int c = central_orbit(K);
  const Rational wL = inner_weight(K, L);
  half[L] += alpha * wL;
  half[c] += alpha * centre_weight(K, wL);
  if (ell) {
    const Rational wl = inner_weight(K, *ell);
    half[*ell] += (1 - alpha) * wl;
    half[c] += (1 - alpha) * centre_weight(K, wl);
  }
  auto design = ExactOrbitDesign::symmetric(K, half);
  const auto m = design_moments(design);
  if (m.m2 != 0 || m.m4 != 0) throw std::logic_error("wide design construction lost the identity moments");
  return design;
}

/// Moments of the narrow family are affine in w: m(w) = m_c + 2w (m_L - m_c).
struct NarrowLine {
  int K;
  double m2c, m4c, d2, d4;

  NarrowLine(int K_, int L) : K(K_) {
    const int c = central_orbit(K);
    m2c = orbit_moment(K, c, 2);
    m4c = orbit_moment(K, c, 4);
    d2 = 2 * (orbit_moment(K, L, 2) - m2c);
    d4 = 2 * (orbit_moment(K, L, 4) - m4c);
  }

  MomentSet at(double w) const { return {0.0, m2c + w * d2, 0.0, m4c + w * d4}; }
};

void require_narrow(int K, int L) {
  require_k(K, "narrow_design");
  if (L < 0 || 2 * L > K) throw std::invalid_argument("narrow_design: need 0 <= L <= K/2");
  require_estimable(K, L);
  if (at_or_below_threshold(K, L))
    throw RegimeError("narrow_design: L=" + std::to_string(L) + " <= B_K=" + std::to_string(threshold_b(K)) +
                      "; identity-information designs exist, use wide_design");
  if (L == central_orbit(K))
    throw SingularDesignError("region X_{" + std::to_string(L) + "," + std::to_string(K - L) +
                              "} holds a single symmetric orbit; at least two are needed for a nonsingular information "
                              "matrix");
}

}  // namespace

double threshold_b(int K) {
  if (K < 2) throw std::domain_error("threshold_b: need K >= 2");
  return (K - std::sqrt(static_cast<double>(threshold_radicand(K)))) / 2.0;
}

std::optional<int> integer_threshold(int K) {
  if (K < 2) throw std::domain_error("threshold_b: need K >= 2");
  const std::int64_t D = threshold_radicand(K);
  auto s = static_cast<std::int64_t>(std::llround(std::sqrt(static_cast<double>(D))));
  if (s * s != D || (K - s) < 0 || (K - s) % 2 != 0) return std::nullopt;
  return static_cast<int>((K - s) / 2);
}

bool at_or_below_threshold(int K, int L) {
  const std::int64_t gap = K - 2 * std::int64_t{L};
  return gap >= 0 && square(gap) >= threshold_radicand(K);
}

std::vector<int> admissible_ells(int K, int L) {
  std::vector<int> out;
  const std::int64_t D = threshold_radicand(K);
  for (int ell = L + 1; 2 * ell < K; ++ell) {
    const std::int64_t gap = K - 2 * std::int64_t{ell};
    const bool above_threshold = square(gap) <= D;
    const bool below_root_k = square(gap) >= K;
    if (above_threshold && below_root_k) out.push_back(ell);
  }
  return out;
}

ExactOrbitDesign full_factorial_exact(int K) {
  require_k(K, "full_factorial");
  Vector<Rational> w(K + 1);
  const Rational scale = Rational(1) / int_pow(Rational(2), K);
  for (int k = 0; k <= K; ++k) w[k] = Rational(orbit_size(K, k)) * scale;
  return ExactOrbitDesign::from_orbit_weights(K, w);
}

ExactOrbitDesign identity_design_exact(int K) {
  require_k(K, "identity_design");
  const auto L = integer_threshold(K);
  if (!L)
    throw std::domain_error("identity_design: threshold_b(" + std::to_string(K) + ") = " + std::to_string(threshold_b(K)) +
                            " is not an integer");
  return assemble_wide(K, *L, std::nullopt, Rational(1));
}

OrbitDesign identity_design(int K) { return identity_design_exact(K).cast<double>(); }

WideDesignSpec wide_design(int K, int L, std::optional<int> ell) {
  require_k(K, "wide_design");
  if (L < 0) throw std::invalid_argument("wide_design: L must be nonnegative");
  require_estimable(K, L);
  WideDesignSpec spec;
  spec.K = K;
  spec.L = L;

  if (K <= 3) {
    spec.exact = full_factorial_exact(K);
    spec.alpha = 1;
    spec.w_L = spec.exact.weight(0);
    spec.result = spec.exact.cast<double>();
    return spec;
  }
  if (!at_or_below_threshold(K, L))
    throw RegimeError("wide_design: L=" + std::to_string(L) + " exceeds B_K=" + std::to_string(threshold_b(K)) +
                      "; use narrow_design");

  const auto threshold = integer_threshold(K);
  const auto candidates = admissible_ells(K, L);
  if (ell) {
    if (std::find(candidates.begin(), candidates.end(), *ell) == candidates.end())
      throw std::domain_error("wide_design: ell=" + std::to_string(*ell) + " is not admissible for K=" + std::to_string(K) +
                              ", L=" + std::to_string(L) + " (need L < ell and B_K <= ell <= (K - sqrt K)/2)");
  } else if (!(threshold && *threshold == L)) {
    if (candidates.empty()) throw std::logic_error("wide_design: no admissible ell");
    ell = candidates.front();
  }

  spec.ell = ell;
  spec.w_L = inner_weight(K, L);
  spec.alpha = ell ? mixing_alpha(K, L, *ell) : Rational(1);
  spec.w_ell = ell ? inner_weight(K, *ell) : Rational(0);
  spec.exact = assemble_wide(K, L, ell, spec.alpha);
  spec.result = spec.exact.cast<double>();
  return spec;
}

OrbitDesign narrow_family_design(int K, int L, double w) {
  Vector<double> half = Vector<double>::Zero(K / 2 + 1);
  half[L] = w;
  half[central_orbit(K)] = K % 2 == 0 ? 1.0 - 2.0 * w : 0.5 - w;
  return OrbitDesign::symmetric(K, half);
}

double narrow_log_det(int K, int L, double w) { return log_det_symmetric(K, NarrowLine(K, L).at(w)); }

double narrow_log_det_derivative(int K, int L, double w) {
  const NarrowLine line(K, L);
  const MomentSet m = line.at(w);
  const auto e = block_eigenvalues(K, m);
  const double k = K;
  const double d2 = line.d2;
  const double d4 = line.d4;
  double g = (k - 1) * d2 / e.det_M11_factor_big - (k - 1) * d2 / e.det_M11_factor_small;
  g += (2 * (k - 2) * d2 + (k - 2) * (k - 3) * d4 / 2 - k * (k - 1) * m.m2 * d2) / e.lambda_one;
  if (e.mult_S > 0) g += e.mult_S * ((k - 4) * d2 - (k - 3) * d4) / e.lambda_S;
  if (e.mult_I > 0) g += e.mult_I * (-2 * d2 + d4) / e.lambda_I;
  return g;
}

NarrowDesignSpec narrow_design(int K, int L) {
  require_narrow(K, L);

  // Bracketed maximisation of the concave objective on (0, 1/2) ...
  const auto negative = [K, L](double w) { return -narrow_log_det(K, L, w); };
  std::uintmax_t iterations = 200;
  const auto coarse = boost::math::tools::brent_find_minima(negative, 0.0, 0.5, std::numeric_limits<double>::digits / 2, iterations);

  // ... then polish on the sign change of the analytic derivative.
  const auto slope = [K, L](double w) { return narrow_log_det_derivative(K, L, w); };
  double lo = coarse.first;
  double hi = coarse.first;
  double step = 1e-7;
  while (!(slope(lo) > 0)) {
    lo = std::max(lo - step, 0.5 * lo);
    step *= 2;
  }
  step = 1e-7;
  while (!(slope(hi) < 0)) {
    hi = std::min(hi + step, 0.5 * (hi + 0.5));
    step *= 2;
  }
  iterations = 200;
  const auto bracket = boost::math::tools::toms748_solve(slope, lo, hi, boost::math::tools::eps_tolerance<double>(50), iterations);

  NarrowDesignSpec spec;
  spec.K = K;
  spec.L = L;
  spec.w_star = 0.5 * (bracket.first + bracket.second);
  spec.result = narrow_family_design(K, L, spec.w_star);
  spec.log_det = narrow_log_det(K, L, spec.w_star);
  spec.d_efficiency = std::exp(spec.log_det / ModelDims(K).p);
  spec.kw = kw_check(Region::symmetric(K, L), spec.result);
  if (!spec.kw.passed)
    throw std::runtime_error("narrow_design: optimised design failed the equivalence check (violation " +
                             std::to_string(spec.kw.max_violation) + ")");
  return spec;
}

OrbitDesign asymmetric_reduce(int K, int L, int U, std::optional<int> ell) {
  const Region region(K, L, U);
  const int bound = std::max(L, K - U);
  require_estimable(K, bound);
  if (!at_or_below_threshold(K, bound))
    throw UnsupportedRegionError("asymmetric_reduce: max(L, K-U)=" + std::to_string(bound) + " exceeds B_K=" +
                                 std::to_string(threshold_b(K)) +
                                 "; no construction is available for asymmetric narrow bounds");
  auto design = wide_design(K, bound, ell).result;
  if (!design.supported_within(region)) throw std::logic_error("asymmetric_reduce: support escaped the region");
  return design;
}

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::wide: return "wide";
    case Regime::threshold: return "threshold";
    case Regime::narrow: return "narrow";
    case Regime::full_factorial: return "full-factorial";
  }
  return "unknown";
}

OptimalDesign optimal_design(const Region& region, std::optional<int> ell) {
  const int K = region.k_factors();
  require_k(K, "optimal_design");
  const int bound = std::max(region.lower(), K - region.upper());
  require_estimable(K, bound);

  Regime regime;
  OrbitDesign design;
  std::optional<int> used_ell;
  if (K <= 3) {
    regime = Regime::full_factorial;
    design = full_factorial_exact(K).cast<double>();
  } else if (at_or_below_threshold(K, bound)) {
    const auto spec = wide_design(K, bound, ell);
    regime = spec.ell ? Regime::wide : Regime::threshold;
    design = spec.result;
    used_ell = spec.ell;
  } else if (region.symmetric()) {
    if (ell) throw std::invalid_argument("ell only applies to wide bounds (L <= B_K)");
    design = narrow_design(K, region.lower()).result;
    regime = Regime::narrow;
  } else {
    throw UnsupportedRegionError("bounds L=" + std::to_string(region.lower()) + ", U=" + std::to_string(region.upper()) +
                                 " are asymmetric and max(L, K-U) exceeds B_K=" + std::to_string(threshold_b(K)) +
                                 "; no construction is available");
  }
  auto kw = kw_check(region, design);
  return {region, regime, std::move(design), used_ell, std::move(kw)};
}

}  // namespace orbitdoe
