#include "orbitdoe/info_matrix.hpp"

#include <algorithm>

namespace orbitdoe {

ModelDims::ModelDims(int k_factors) : K(k_factors), p(1 + k_factors * (k_factors + 1) / 2), n_inter(k_factors * (k_factors - 1) / 2) {
  if (K < 1) throw std::domain_error("ModelDims: K must be positive");
}

std::vector<std::pair<int, int>> interaction_pairs(int K) {
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<std::size_t>(K * (K - 1) / 2));
  for (int i = 0; i < K; ++i)
    for (int j = i + 1; j < K; ++j) pairs.emplace_back(i, j);
  return pairs;
}

Eigen::MatrixXi build_s_matrix(int K) {
  if (K < 2) throw std::domain_error("build_s_matrix: need K >= 2");
  const auto pairs = interaction_pairs(K);
  Eigen::MatrixXi S = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(pairs.size()), K);
  for (std::size_t r = 0; r < pairs.size(); ++r) {
    S(static_cast<Eigen::Index>(r), pairs[r].first) = 1;
    S(static_cast<Eigen::Index>(r), pairs[r].second) = 1;
  }
  return S;
}

namespace detail {

std::vector<FactorSet> regression_factor_sets(int K) {
  std::vector<FactorSet> sets;
  sets.reserve(static_cast<std::size_t>(ModelDims(K).p));
  sets.push_back(FactorSet{});
  for (int i = 0; i < K; ++i) sets.push_back(FactorSet{1, {i, -1}});
  for (const auto& [i, j] : interaction_pairs(K)) sets.push_back(FactorSet{2, {i, j}});
  return sets;
}

int odd_factor_count(const FactorSet& a, const FactorSet& b) {
  int shared = 0;
  for (int s = 0; s < a.size; ++s)
    for (int t = 0; t < b.size; ++t)
      if (a.idx[s] == b.idx[t]) ++shared;
  return a.size + b.size - 2 * shared;
}

}  // namespace detail

std::string SingularBlocks::describe() const {
  if (!any()) return "nonsingular";
  std::string out = "singular:";
  if (m11) out += " M11 (main-effect block)";
  if (lambda_one) out += " lambda_one (fewer than two symmetric orbits)";
  if (lambda_S) out += " lambda_S (no symmetric orbit with 0 < k < K/2)";
  if (lambda_I) out += " lambda_I (no symmetric orbit with k > 1)";
  return out;
}

namespace {

bool is_zero_factor(double value, double scale) { return value <= 1e-12 * (1.0 + scale); }

}  // namespace

SingularBlocks singular_blocks(int K, const MomentSet& m) {
  const auto e = block_eigenvalues(K, m);
  const double k = K;
  const double a2 = std::abs(m.m2);
  const double a4 = std::abs(m.m4);
  SingularBlocks s;
  s.m11 = is_zero_factor(e.det_M11_factor_big, (k - 1) * a2) || is_zero_factor(e.det_M11_factor_small, a2);
  s.lambda_one = is_zero_factor(e.lambda_one, 2 * (k - 2) * a2 + (k - 2) * (k - 3) * a4 / 2 + k * (k - 1) * a2 * a2 / 2);
  s.lambda_S = e.mult_S > 0 && is_zero_factor(e.lambda_S, std::abs(k - 4) * a2 + std::abs(k - 3) * a4);
  s.lambda_I = e.mult_I > 0 && is_zero_factor(e.lambda_I, 2 * a2 + a4);
  return s;
}

double log_det_symmetric(int K, const MomentSet& m) {
  if (singular_blocks(K, m).any()) return -std::numeric_limits<double>::infinity();
  const auto e = block_eigenvalues(K, m);
  double out = std::log(e.det_M11_factor_big) + (K - 1) * std::log(e.det_M11_factor_small) + std::log(e.lambda_one);
  if (e.mult_S > 0) out += e.mult_S * std::log(e.lambda_S);
  if (e.mult_I > 0) out += e.mult_I * std::log(e.lambda_I);
  return out;
}

Rational det_symmetric(int K, const ExactMomentSet& m) {
  const auto e = block_eigenvalues(K, m);
  Rational det = e.det_M11_factor_big * e.lambda_one;
  det *= int_pow(e.det_M11_factor_small, K - 1);
  if (e.mult_S > 0) det *= int_pow(e.lambda_S, e.mult_S);
  if (e.mult_I > 0) det *= int_pow(e.lambda_I, e.mult_I);
  return det;
}

RegularityReport regularity_of_support(int K, const std::vector<int>& symmetric_support) {
  if (K < 2) throw std::domain_error("regularity: need K >= 2");
  RegularityReport r;
  r.symmetric_support = symmetric_support;
  std::sort(r.symmetric_support.begin(), r.symmetric_support.end());
  r.symmetric_support.erase(std::unique(r.symmetric_support.begin(), r.symmetric_support.end()), r.symmetric_support.end());
  for (int k : r.symmetric_support)
    if (k < 0 || 2 * k > K) throw std::domain_error("regularity: symmetric orbit index must satisfy 0 <= k <= K/2");

  const auto& S = r.symmetric_support;
  const bool inner = std::any_of(S.begin(), S.end(), [K](int k) { return k > 0 && 2 * k < K; });
  const bool beyond_one = std::any_of(S.begin(), S.end(), [](int k) { return k > 1; });

  r.failing.lambda_one = S.size() < 2;
  r.failing.m11 = S.empty() || (S.size() == 1 && (S.front() == 0 || 2 * S.front() == K));
  r.failing.lambda_S = K >= 3 && !inner;
  r.failing.lambda_I = K >= 4 && !beyond_one;
  r.regular = !r.failing.any();
  r.diagnostic = r.failing.describe();
  return r;
}

}  // namespace orbitdoe
