#include "orbitdoe/orbit_region.hpp"

#include <array>
#include <numeric>

namespace orbitdoe {

namespace {

using PascalTable = std::array<std::array<std::uint64_t, kMaxExactFactors + 1>, kMaxExactFactors + 1>;

PascalTable build_pascal() {
  PascalTable t{};
  for (int n = 0; n <= kMaxExactFactors; ++n) {
    t[n][0] = 1;
    for (int k = 1; k <= n; ++k) {
      std::uint64_t sum = 0;
      if (__builtin_add_overflow(t[n - 1][k - 1], t[n - 1][k], &sum))
        throw std::overflow_error("orbit_size: binomial overflow");
      t[n][k] = sum;
    }
  }
  return t;
}

}  // namespace

DesignPoint::DesignPoint(Eigen::VectorXi entries) : entries_(std::move(entries)) {
  for (Eigen::Index i = 0; i < entries_.size(); ++i)
    if (entries_[i] != 1 && entries_[i] != -1) throw std::invalid_argument("design point entries must be -1 or +1");
}

std::string DesignPoint::to_string() const {
  std::string s(static_cast<std::size_t>(entries_.size()), '-');
  for (Eigen::Index i = 0; i < entries_.size(); ++i)
    if (entries_[i] == 1) s[static_cast<std::size_t>(i)] = '+';
  return s;
}

int active_count(const DesignPoint& x) { return (x.entries().sum() + x.size()) / 2; }

std::uint64_t orbit_size(int K, int k) {
  static const PascalTable table = build_pascal();
  if (K < 0 || K > kMaxExactFactors)
    throw std::domain_error("orbit_size: K=" + std::to_string(K) + " outside exact range 0.." +
                            std::to_string(kMaxExactFactors));
  if (k < 0 || k > K) throw std::domain_error("orbit_size: k=" + std::to_string(k) + " outside 0..K");
  return table[K][k];
}

Region::Region(int k_factors, int lower, int upper) : k_(k_factors), lower_(lower), upper_(upper) {
  if (k_ < 1) throw std::invalid_argument("region: K must be positive");
  if (lower_ < 0 || upper_ > k_ || lower_ > upper_)
    throw std::invalid_argument("region: need 0 <= L <= U <= K (got L=" + std::to_string(lower_) +
                                ", U=" + std::to_string(upper_) + ", K=" + std::to_string(k_) + ")");
}

OrbitPoints::OrbitPoints(int K, int k) : k_(K), active_(k) {
  if (K < 0 || k < 0 || k > K) throw std::domain_error("enumerate_orbit: need 0 <= k <= K");
}

OrbitPoints::iterator::iterator(int K, int k) : k_factors_(K), positions_(static_cast<std::size_t>(k)), done_(false) {
  std::iota(positions_.begin(), positions_.end(), 0);
  refresh();
}

void OrbitPoints::iterator::refresh() {
  Eigen::VectorXi entries = Eigen::VectorXi::Constant(k_factors_, -1);
  for (int p : positions_) entries[p] = 1;
  current_ = DesignPoint(std::move(entries));
}

OrbitPoints::iterator& OrbitPoints::iterator::operator++() {
  const int k = static_cast<int>(positions_.size());
  int i = k - 1;
  while (i >= 0 && positions_[static_cast<std::size_t>(i)] == k_factors_ - k + i) --i;
  if (i < 0) {
    done_ = true;
    return *this;
  }
  ++positions_[static_cast<std::size_t>(i)];
  for (int j = i + 1; j < k; ++j) positions_[static_cast<std::size_t>(j)] = positions_[static_cast<std::size_t>(j - 1)] + 1;
  refresh();
  return *this;
}

}  // namespace orbitdoe
