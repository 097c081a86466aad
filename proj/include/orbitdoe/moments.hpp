#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "orbitdoe/orbit_region.hpp"
#include "orbitdoe/scalar.hpp"

namespace orbitdoe {

/// The four off-diagonal values of an invariant design's information matrix:
/// averages of products of 1, 2, 3 and 4 distinct factors.
template <class Scalar>
struct MomentSetT {
  Scalar m1{0};
  Scalar m2{0};
  Scalar m3{0};
  Scalar m4{0};

  /// Odd moments vanish (chess-board information matrix).
  bool symmetric() const { return m1 == Scalar(0) && m3 == Scalar(0); }

  Scalar operator[](int j) const {
    switch (j) {
      case 1: return m1;
      case 2: return m2;
      case 3: return m3;
      case 4: return m4;
      default: throw std::domain_error("moment order must be in 1..4");
    }
  }

  template <class To>
  MomentSetT<To> cast() const {
    return {scalar_cast<To>(m1), scalar_cast<To>(m2), scalar_cast<To>(m3), scalar_cast<To>(m4)};
  }

  friend bool operator==(const MomentSetT& a, const MomentSetT& b) {
    return a.m1 == b.m1 && a.m2 == b.m2 && a.m3 == b.m3 && a.m4 == b.m4;
  }
};

using MomentSet = MomentSetT<double>;
using ExactMomentSet = MomentSetT<Rational>;

namespace detail {

inline void check_moment_args(int K, int k, int j) {
  if (K < 1 || K > kMaxExactFactors) throw std::domain_error("orbit_moment: K out of range");
  if (k < 0 || k > K) throw std::domain_error("orbit_moment: k=" + std::to_string(k) + " outside 0..K");
  if (j < 1 || j > 4) throw std::domain_error("orbit_moment: order j must be in 1..4");
}

/// Integer numerator and denominator of the closed-form orbit moment.
struct IntRatio {
  std::int64_t num;
  std::int64_t den;
};

inline IntRatio closed_form_ratio(int K, int k, int j) {
  const std::int64_t t = 2 * k - K;
  const std::int64_t n = K;
  switch (j) {
    case 1: return {t, n};
    case 2: return {t * t - n, n * (n - 1)};
    case 3: return {t * t * t - (3 * n - 2) * t, n * (n - 1) * (n - 2)};
    default: return {t * t * t * t - (6 * n - 8) * t * t + 3 * n * (n - 2), n * (n - 1) * (n - 2) * (n - 3)};
  }
}

template <class Scalar>
Scalar ratio(std::int64_t num, std::int64_t den) {
  if constexpr (is_exact_v<Scalar>) {
    return Rational(num, den);
  } else {
    // Both operands are exact integers, so the quotient is correctly rounded.
    return static_cast<Scalar>(num) / static_cast<Scalar>(den);
  }
}

}  // namespace detail

/// m_j of the uniform design on O_k, closed form polynomial in 2k-K; zero for j > K.
template <class Scalar = double>
Scalar orbit_moment(int K, int k, int j) {
  detail::check_moment_args(K, k, j);
  if (j > K) return Scalar(0);
  const auto r = detail::closed_form_ratio(K, k, j);
  return detail::ratio<Scalar>(r.num, r.den);
}

/// m_j of the uniform design on O_k from the alternating binomial sum
/// C(K,k)^-1 sum_i (-1)^(i+j) C(j,i) C(K-j,k-i).
template <class Scalar = double>
Scalar orbit_moment_alternating(int K, int k, int j) {
  detail::check_moment_args(K, k, j);
  if (j > K) return Scalar(0);
  std::int64_t num = 0;
  for (int i = 0; i <= j; ++i) {
    if (k - i < 0 || k - i > K - j) continue;
    const auto term = static_cast<std::int64_t>(orbit_size(j, i) * orbit_size(K - j, k - i));
    num += ((i + j) % 2 == 0) ? term : -term;
  }
  return detail::ratio<Scalar>(num, static_cast<std::int64_t>(orbit_size(K, k)));
}

template <class Scalar = double>
MomentSetT<Scalar> orbit_moments(int K, int k) {
  return {orbit_moment<Scalar>(K, k, 1), orbit_moment<Scalar>(K, k, 2), orbit_moment<Scalar>(K, k, 3),
          orbit_moment<Scalar>(K, k, 4)};
}

/// Moments are linear in the orbit weights. Symmetric designs report m1 = m3 = 0 exactly.
template <class Scalar>
MomentSetT<Scalar> design_moments(const OrbitDesignT<Scalar>& design) {
  const int K = design.k_factors();
  MomentSetT<Scalar> m;
  for (int k = 0; k <= K; ++k) {
    const Scalar w = design.weight(k);
    if (w == Scalar(0)) continue;
    const auto mk = orbit_moments<Scalar>(K, k);
    m.m2 += w * mk.m2;
    m.m4 += w * mk.m4;
    if (!design.is_symmetric()) {
      m.m1 += w * mk.m1;
      m.m3 += w * mk.m3;
    }
  }
  return m;
}

}  // namespace orbitdoe
