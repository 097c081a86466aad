#include "orbitdoe/verify.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <limits>

namespace orbitdoe {

namespace {

DesignPoint orbit_representative(int K, int k) { return *enumerate_orbit(K, k).begin(); }

/// Dense route for invariant designs without the mirror symmetry.
std::map<int, double> dense_sensitivity(const Region& region, const OrbitDesign& design) {
  const int K = design.k_factors();
  const auto info = assemble_general(K, design_moments(design));
  Eigen::FullPivLU<Eigen::MatrixXd> lu(info.dense);
  lu.setThreshold(1e-10);
  if (!lu.isInvertible()) throw SingularDesignError("kw_check: information matrix is singular (dense rank " + std::to_string(lu.rank()) + " < p)");
  std::map<int, double> psi;
  for (int k = region.lower(); k <= region.upper(); ++k) {
    const Eigen::VectorXd f = regression_vector(orbit_representative(K, k));
    psi[k] = f.dot(lu.solve(f));
  }
  return psi;
}

}  // namespace

KwReport kw_check(const Region& region, const OrbitDesign& design, double tol) {
  const int K = design.k_factors();
  if (region.k_factors() != K) throw std::invalid_argument("kw_check: design and region disagree on K");
  if (!design.supported_within(region)) throw std::invalid_argument("kw_check: design puts weight outside the region");
  if (K < 2) throw std::domain_error("kw_check: need K >= 2");

  KwReport report;
  report.p = ModelDims(K).p;
  report.tolerance = tol;

  if (design.is_symmetric()) {
    const auto reg = regularity(design);
    if (!reg.regular) throw SingularDesignError("kw_check: " + reg.diagnostic);
    const auto poly = sensitivity_poly(K, design_moments(design));
    for (int k = region.lower(); k <= region.upper(); ++k) report.per_orbit[k] = poly.at(k);
  } else {
    report.per_orbit = dense_sensitivity(region, design);
  }

  report.max_violation = -std::numeric_limits<double>::infinity();
  for (const auto& [k, psi] : report.per_orbit) {
    const double v = psi - report.p;
    if (v > report.max_violation) {
      report.max_violation = v;
      report.argmax_orbit = k;
    }
    if (design.weight(k) > 0) report.max_support_deviation = std::max(report.max_support_deviation, std::abs(v));
  }
  report.passed = report.max_violation <= tol;
  return report;
}

double log_det(const OrbitDesign& design) {
  const int K = design.k_factors();
  const auto m = design_moments(design);
  if (design.is_symmetric()) return log_det_symmetric(K, m);
  const auto info = assemble_general(K, m);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(info.dense);
  lu.setThreshold(1e-10);
  if (!lu.isInvertible()) return -std::numeric_limits<double>::infinity();
  const Eigen::VectorXd diag = lu.matrixLU().diagonal();
  return diag.array().abs().log().sum();
}

double d_efficiency(const OrbitDesign& design) {
  const double ld = log_det(design);
  if (!std::isfinite(ld)) return 0.0;
  return std::exp(ld / ModelDims(design.k_factors()).p);
}

Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> orbit_gram(int K, int k) {
  const ModelDims dims(K);
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> G =
      Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(dims.p, dims.p);
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1> f(dims.p);
  const auto pairs = interaction_pairs(K);
  for (const auto& x : enumerate_orbit(K, k)) {
    f[0] = 1;
    for (int i = 0; i < K; ++i) f[1 + i] = x[i];
    for (std::size_t r = 0; r < pairs.size(); ++r) f[1 + K + static_cast<Eigen::Index>(r)] = x[pairs[r].first] * x[pairs[r].second];
    G.noalias() += f * f.transpose();
  }
  return G;
}

template <class Scalar>
InfoMatrixT<Scalar> brute_force_info(const OrbitDesignT<Scalar>& design, bool allow_large) {
  const int K = design.k_factors();
  if (K < 2) throw std::domain_error("brute_force_info: need K >= 2");
  if (K > kBruteForceMaxFactors && !allow_large)
    throw std::domain_error("brute_force_info: K=" + std::to_string(K) + " exceeds the enumeration cost guard (" +
                            std::to_string(kBruteForceMaxFactors) + "); pass allow_large to override");
  const ModelDims dims(K);
  Matrix<Scalar> sum = Matrix<Scalar>::Zero(dims.p, dims.p);
  Matrix<Scalar> carry = Matrix<Scalar>::Zero(dims.p, dims.p);
  for (int k : design.support()) {
    const Scalar scale = point_weight(design, k);
    const auto G = orbit_gram(K, k);
    for (int r = 0; r < dims.p; ++r) {
      for (int c = 0; c < dims.p; ++c) {
        const Scalar term = scale * Scalar(G(r, c));
        if constexpr (is_exact_v<Scalar>) {
          sum(r, c) += term;
        } else {
          // Neumaier summation
          const Scalar t = sum(r, c) + term;
          if (std::abs(sum(r, c)) >= std::abs(term))
            carry(r, c) += (sum(r, c) - t) + term;
          else
            carry(r, c) += (term - t) + sum(r, c);
          sum(r, c) = t;
        }
      }
    }
  }
  if constexpr (!is_exact_v<Scalar>) sum += carry;
  return {dims, std::move(sum), design_moments(design)};
}

template InfoMatrixT<double> brute_force_info(const OrbitDesignT<double>&, bool);
template InfoMatrixT<Rational> brute_force_info(const OrbitDesignT<Rational>&, bool);

}  // namespace orbitdoe
