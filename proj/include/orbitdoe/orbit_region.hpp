#pragma once

#include <cmath>
#include <cstdint>
#include <iterator>
#include <stdexcept>
#include <string>
#include <vector>

#include "orbitdoe/scalar.hpp"

namespace orbitdoe {

/// A vertex of the hypercube {-1,+1}^K.
class DesignPoint {
 public:
  DesignPoint() = default;
  explicit DesignPoint(Eigen::VectorXi entries);

  int size() const { return static_cast<int>(entries_.size()); }
  int operator[](int i) const { return entries_[i]; }
  const Eigen::VectorXi& entries() const { return entries_; }

  /// Compact "+-" rendering, one character per factor.
  std::string to_string() const;

  friend bool operator==(const DesignPoint& a, const DesignPoint& b) {
    return a.entries_ == b.entries_;
  }

 private:
  Eigen::VectorXi entries_;
};

/// Number of factors set to +1.
int active_count(const DesignPoint& x);

/// Largest K for which binomials are computed exactly.
inline constexpr int kMaxExactFactors = 64;

/// C(K,k) in exact integer arithmetic; throws std::domain_error outside 0 <= k <= K <= 64.
std::uint64_t orbit_size(int K, int k);

/// The restricted region X_{L,U}: points with L <= d(x) <= U.
class Region {
 public:
  Region(int k_factors, int lower, int upper);
  static Region symmetric(int k_factors, int lower) { return Region(k_factors, lower, k_factors - lower); }

  int k_factors() const { return k_; }
  int lower() const { return lower_; }
  int upper() const { return upper_; }
  bool symmetric() const { return lower_ + upper_ == k_; }
  bool contains_orbit(int k) const { return lower_ <= k && k <= upper_; }

 private:
  int k_;
  int lower_;
  int upper_;
};

/// Points of the orbit O_k, in lexicographic order of their +1 position sets.
class OrbitPoints {
 public:
  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = DesignPoint;
    using difference_type = std::ptrdiff_t;
    using pointer = const DesignPoint*;
    using reference = const DesignPoint&;

    iterator() = default;
    iterator(int K, int k);

    reference operator*() const { return current_; }
    pointer operator->() const { return &current_; }
    iterator& operator++();
    iterator operator++(int) {
      iterator tmp = *this;
      ++*this;
      return tmp;
    }
    friend bool operator==(const iterator& a, const iterator& b) { return a.done_ == b.done_ && (a.done_ || a.positions_ == b.positions_); }

   private:
    void refresh();

    int k_factors_ = 0;
    std::vector<int> positions_;
    DesignPoint current_;
    bool done_ = true;
  };

  OrbitPoints(int K, int k);

  iterator begin() const { return iterator(k_, active_); }
  iterator end() const { return iterator(); }
  std::uint64_t size() const { return orbit_size(k_, active_); }

 private:
  int k_;
  int active_;
};

/// Lazy range over O_k; intended for K <= 22.
inline OrbitPoints enumerate_orbit(int K, int k) { return OrbitPoints(K, k); }

/// Orbits with k and K-k active factors share a symmetric orbit; returns min(k, K-k).
inline int symmetric_orbit_index(int K, int k) { return k <= K - k ? k : K - k; }

/// Invariant design: orbit weights w_k, uniform within each orbit.
///
/// Designs whose weights satisfy w_k == w_{K-k} are stored half-folded
/// (k <= K/2) and mirrored on read, so the symmetry cannot drift.
template <class Scalar>
class OrbitDesignT {
 public:
  using scalar_type = Scalar;

  OrbitDesignT() = default;

  /// Full weight vector of length K+1; folds automatically when mirror-symmetric.
  static OrbitDesignT from_orbit_weights(int K, const Vector<Scalar>& weights);

  /// Half-folded weights: entry k (k <= K/2) is the weight of O_k and of O_{K-k}.
  static OrbitDesignT symmetric(int K, const Vector<Scalar>& half_weights);

  int k_factors() const { return k_; }
  bool is_symmetric() const { return symmetric_; }

  Scalar weight(int k) const {
    if (k < 0 || k > k_) return Scalar(0);
    return symmetric_ ? stored_[symmetric_orbit_index(k_, k)] : stored_[k];
  }

  Vector<Scalar> weights() const {
    Vector<Scalar> out(k_ + 1);
    for (int k = 0; k <= k_; ++k) out[k] = weight(k);
    return out;
  }

  /// Orbits with positive weight, ascending.
  std::vector<int> support() const {
    std::vector<int> out;
    for (int k = 0; k <= k_; ++k)
      if (weight(k) > Scalar(0)) out.push_back(k);
    return out;
  }

  /// Symmetric orbit indices (k <= K/2) carrying weight.
  std::vector<int> symmetric_support() const {
    std::vector<int> out;
    for (int k = 0; 2 * k <= k_; ++k)
      if (weight(k) > Scalar(0) || weight(k_ - k) > Scalar(0)) out.push_back(k);
    return out;
  }

  bool supported_within(const Region& region) const {
    for (int k : support())
      if (!region.contains_orbit(k)) return false;
    return true;
  }

  template <class To>
  OrbitDesignT<To> cast() const {
    Vector<To> full(k_ + 1);
    for (int k = 0; k <= k_; ++k) full[k] = scalar_cast<To>(weight(k));
    if (symmetric_) {
      Vector<To> half(k_ / 2 + 1);
      for (int k = 0; 2 * k <= k_; ++k) half[k] = full[k];
      return OrbitDesignT<To>::symmetric(k_, half);
    }
    return OrbitDesignT<To>::from_orbit_weights(k_, full);
  }

 private:
  OrbitDesignT(int K, bool symmetric, Vector<Scalar> stored) : k_(K), symmetric_(symmetric), stored_(std::move(stored)) {}
  void validate() const;

  int k_ = 0;
  bool symmetric_ = false;
  Vector<Scalar> stored_;
};

using OrbitDesign = OrbitDesignT<double>;
using ExactOrbitDesign = OrbitDesignT<Rational>;

/// Weight of a single point of O_k: w_k / C(K,k).
template <class Scalar>
Scalar point_weight(const OrbitDesignT<Scalar>& design, int k) {
  if (k < 0 || k > design.k_factors()) throw std::domain_error("point_weight: orbit index out of range");
  return design.weight(k) / Scalar(orbit_size(design.k_factors(), k));
}

/// Tolerance applied to the weight-sum invariant.
template <class Scalar>
inline constexpr double weight_sum_tolerance = is_exact_v<Scalar> ? 0.0 : 1e-12;

template <class Scalar>
OrbitDesignT<Scalar> OrbitDesignT<Scalar>::from_orbit_weights(int K, const Vector<Scalar>& weights) {
  if (K < 1) throw std::domain_error("orbit design: K must be positive");
  if (weights.size() != K + 1) throw std::invalid_argument("orbit design: expected K+1 orbit weights");
  bool mirrored = true;
  for (int k = 0; k <= K; ++k)
    if (weights[k] != weights[K - k]) mirrored = false;
  OrbitDesignT design;
  if (mirrored) {
    design = OrbitDesignT(K, true, weights.head(K / 2 + 1));
  } else {
    design = OrbitDesignT(K, false, weights);
  }
  design.validate();
  return design;
}

template <class Scalar>
OrbitDesignT<Scalar> OrbitDesignT<Scalar>::symmetric(int K, const Vector<Scalar>& half_weights) {
  if (K < 1) throw std::domain_error("orbit design: K must be positive");
  if (half_weights.size() != K / 2 + 1) throw std::invalid_argument("orbit design: expected floor(K/2)+1 folded weights");
  OrbitDesignT design(K, true, half_weights);
  design.validate();
  return design;
}

template <class Scalar>
void OrbitDesignT<Scalar>::validate() const {
  Scalar total(0);
  for (int k = 0; k <= k_; ++k) {
    const Scalar w = weight(k);
    if (w < Scalar(0)) throw std::invalid_argument("orbit design: negative weight on orbit " + std::to_string(k));
    total += w;
  }
  if constexpr (is_exact_v<Scalar>) {
    if (total != Scalar(1)) throw std::invalid_argument("orbit design: weights do not sum to 1");
  } else {
    if (!(std::abs(total - 1.0) <= weight_sum_tolerance<Scalar>))
      throw std::invalid_argument("orbit design: weights do not sum to 1");
  }
}

}  // namespace orbitdoe
