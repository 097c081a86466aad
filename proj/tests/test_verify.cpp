#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracle.hpp"
#include "orbitdoe/design_construct.hpp"
#include "orbitdoe/errors.hpp"
#include "orbitdoe/verify.hpp"

using namespace orbitdoe;

namespace {

std::vector<double> full_weights(const OrbitDesign& d) {
  std::vector<double> w;
  for (int k = 0; k <= d.k_factors(); ++k) w.push_back(d.weight(k));
  return w;
}

OrbitDesign k6_design(double w2, double w3) {
  Vector<double> half(4);
  half << 0, 0, w2, w3;
  return OrbitDesign::symmetric(6, half);
}

}  // namespace

TEST(SensitivityPoly, MatchesDenseQuadraticForm) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  for (int K = 2; K <= 8; ++K) {
    for (int trial = 0; trial < 5; ++trial) {
      Vector<double> half(K / 2 + 1);
      double total = 0;
      for (int k = 0; 2 * k <= K; ++k) {
        half[k] = u(rng);
        total += (2 * k == K ? 1.0 : 2.0) * half[k];
      }
      half /= total;
      const auto d = OrbitDesign::symmetric(K, half);
      const auto poly = sensitivity_poly(K, design_moments(d));
      const auto psi = oracle::sensitivity(K, oracle::info(K, full_weights(d)));
      for (int k = 0; k <= K; ++k) EXPECT_NEAR(poly.at(k), psi[static_cast<std::size_t>(k)], 1e-9) << K << ' ' << k;
    }
  }
}

TEST(SensitivityPoly, ExactForIdentityDesign) {
  const auto poly = sensitivity_poly(6, design_moments(identity_design_exact(6)));
  // With M = I the sensitivity is ||f(x)||^2 = p everywhere.
  EXPECT_EQ(poly.a4, 0);
  EXPECT_EQ(poly.a2, 0);
  EXPECT_EQ(poly.a0, 22);
}

TEST(KwCheck, NarrowOptimumK6) {
  const auto spec = narrow_design(6, 2);
  const auto poly = sensitivity_poly(6, design_moments(spec.result));
  EXPECT_GT(poly.a4, 0);
  for (int k = 2; k <= 4; ++k) EXPECT_NEAR(spec.kw.per_orbit.at(k), 22.0, 1e-9);
  EXPECT_TRUE(spec.kw.passed);
  EXPECT_LE(spec.kw.max_support_deviation, 1e-9);
}

TEST(KwCheck, UniformDesignFails) {
  const auto report = kw_check(Region::symmetric(6, 2), k6_design(0.3, 0.4));
  EXPECT_FALSE(report.passed);
  EXPECT_NEAR(report.max_violation, 27.0 / 14.0, 1e-10);
  EXPECT_TRUE(report.argmax_orbit == 2 || report.argmax_orbit == 4);
}

TEST(KwCheck, PerturbedOptimumFails) {
  const double w = (45 - 6 * std::sqrt(37.0)) / 22;
  const auto report = kw_check(Region::symmetric(6, 2), k6_design(w + 0.05, 1 - 2 * w - 0.1));
  EXPECT_FALSE(report.passed);
  EXPECT_NEAR(report.max_violation, 4.10770139133216, 1e-9);
  EXPECT_EQ(report.argmax_orbit, 3);
}

TEST(KwCheck, WideDesignsAttainEquality) {
  for (int K = 4; K <= 12; ++K) {
    const auto spec = wide_design(K, 0);
    const auto report = kw_check(Region::symmetric(K, 0), spec.result);
    EXPECT_TRUE(report.passed);
    EXPECT_LE(report.max_violation, 1e-9);
  }
}

TEST(KwCheck, DenseFallbackForAsymmetricDesigns) {
  Vector<double> w(7);
  w << 0, 0.1, 0.3, 0.3, 0.2, 0.1, 0;
  const auto d = OrbitDesign::from_orbit_weights(6, w);
  ASSERT_FALSE(d.is_symmetric());
  const auto report = kw_check(Region(6, 1, 5), d);
  const auto psi = oracle::sensitivity(6, oracle::info(6, full_weights(d)));
  for (int k = 1; k <= 5; ++k) EXPECT_NEAR(report.per_orbit.at(k), psi[static_cast<std::size_t>(k)], 1e-9);
}

TEST(KwCheck, Errors) {
  const auto d = k6_design(0.3, 0.4);
  EXPECT_THROW(kw_check(Region::symmetric(7, 2), d), std::invalid_argument);
  EXPECT_THROW(kw_check(Region::symmetric(6, 3), d), std::invalid_argument);
  EXPECT_THROW(kw_check(Region::symmetric(6, 2), k6_design(0, 1)), SingularDesignError);
}

TEST(Efficiency, FullFactorialIsOne) {
  for (int K = 2; K <= 12; ++K) EXPECT_NEAR(d_efficiency(full_factorial_exact(K).cast<double>()), 1.0, 1e-12);
  EXPECT_EQ(d_efficiency(k6_design(0, 1)), 0.0);
}

TEST(Efficiency, AsymmetricLogDetMatchesDense) {
  Vector<double> w(7);
  w << 0.05, 0.1, 0.3, 0.3, 0.2, 0.05, 0;
  const auto d = OrbitDesign::from_orbit_weights(6, w);
  EXPECT_NEAR(log_det(d), oracle::log_det(oracle::info(6, full_weights(d))), 1e-10);
}

TEST(BruteForce, MatchesAssembly) {
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int K = 2; K <= 10; ++K) {
    Vector<double> w(K + 1);
    for (int k = 0; k <= K; ++k) w[k] = u(rng);
    w /= w.sum();
    const auto d = OrbitDesign::from_orbit_weights(K, w);
    const auto brute = brute_force_info(d);
    const auto assembled = assemble_general(K, design_moments(d));
    EXPECT_LE((brute.dense - assembled.dense).cwiseAbs().maxCoeff(), 1e-12) << "K=" << K;
  }
}

TEST(BruteForce, ExactIdentity) {
  const auto M = brute_force_info(identity_design_exact(6)).dense;
  EXPECT_TRUE(M == Matrix<Rational>::Identity(22, 22));
}

TEST(BruteForce, CostGuard) {
  const auto d = full_factorial_exact(13).cast<double>();
  EXPECT_THROW(brute_force_info(d), std::domain_error);
}

TEST(OrbitGram, TraceCountsPoints) {
  const auto G = orbit_gram(5, 2);
  EXPECT_EQ(G.trace(), 10 * 16);
  EXPECT_EQ(G(0, 0), 10);
}
