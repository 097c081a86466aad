// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <Eigen/Dense>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>

#include "golden_tables.hpp"
#include "oracle.hpp"
#include "orbitdoe/design_construct.hpp"
#include "orbitdoe/info_matrix.hpp"
#include "orbitdoe/verify.hpp"

using namespace orbitdoe;

namespace {

struct Outcome {
  bool ok = true;
  std::ostringstream detail;

  void fail(const std::string& what) {
    if (ok) detail << "first failure: " << what << "; ";
    ok = false;
  }
};

int failures = 0;

void criterion(int id, const char* name, double limit_seconds, const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.fail(std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (limit_seconds > 0 && secs >= limit_seconds) o.fail("runtime " + std::to_string(secs) + " s over limit");
  if (!o.ok) ++failures;
  std::printf("%s  %d  %-52s %7.3f s  %s\n", o.ok ? "PASS" : "FAIL", id, name, secs, o.detail.str().c_str());
}

/// |exact - printed| <= 5e-5, decided in rational arithmetic.
bool within_half_unit(const Rational& exact, double printed) {
  const Rational shown(static_cast<long long>(std::llround(printed * 10000)), 10000);
  const Rational diff = exact > shown ? Rational(exact - shown) : Rational(shown - exact);
  return diff <= Rational(1, 20000);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

/// Random symmetric designs on K: a random nonempty subset of symmetric orbits with random weights.
std::vector<OrbitDesign> test_grid(int K, int count, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.01, 1.0);
  std::bernoulli_distribution keep(0.6);
  std::vector<OrbitDesign> grid;
  const int half = K / 2;
  while (static_cast<int>(grid.size()) < count) {
    Vector<double> h = Vector<double>::Zero(half + 1);
    double total = 0;
    for (int k = 0; k <= half; ++k) {
      if (!keep(rng)) continue;
      h[k] = u(rng);
      total += (2 * k == K ? 1.0 : 2.0) * h[k];
    }
    if (total == 0) continue;
    h /= total;
    grid.push_back(OrbitDesign::symmetric(K, h));
  }
  return grid;
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

int main() {
  criterion(1, "wide-bound designs match reference weights", 1.0, [](Outcome& o) {
    int rows = 0;
    for (const auto& row : golden::kWide) {
      const auto spec = wide_design(row.K, row.L, row.ell);
      const auto& d = spec.exact;
      const int c = central_orbit(row.K);
      const std::string tag = "K=" + std::to_string(row.K) + " L=" + std::to_string(row.L);
      if (!within_half_unit(d.weight(row.L), row.w_L)) o.fail(tag + " w_L");
      if (row.ell && !within_half_unit(d.weight(*row.ell), row.w_ell)) o.fail(tag + " w_ell");
      if (!within_half_unit(d.weight(c), row.w_c)) o.fail(tag + " w_c");
      if (!(design_moments(d) == ExactMomentSet{})) o.fail(tag + " nonzero moments");
      ++rows;
    }
    o.detail << rows << " rows, exact zero moments";
  });

  criterion(2, "narrow-bound optima match reference weights", 10.0, [](Outcome& o) {
    double worst = 0;
    for (const auto& row : golden::kNarrow) {
      const auto spec = narrow_design(row.K, row.L);
      const double dw = std::abs(spec.w_star - row.w_L);
      const double de = std::abs(spec.d_efficiency - row.efficiency);
      worst = std::max({worst, dw, de});
      if (dw > 5e-5 || de > 5e-5) o.fail("K=" + std::to_string(row.K) + " L=" + std::to_string(row.L));
    }
    o.detail << std::size(golden::kNarrow) << " rows, worst deviation " << fmt(worst);
  });

  criterion(3, "equivalence check certifies every generated design", 0, [](Outcome& o) {
    double worst = -std::numeric_limits<double>::infinity();
    int designs = 0;
    const auto check = [&](const Region& region, const OrbitDesign& d, const std::string& tag) {
      const auto report = kw_check(region, d);
      worst = std::max(worst, report.max_violation);
      if (!(report.max_violation <= 1e-9)) o.fail(tag + " violation " + fmt(report.max_violation));
      ++designs;
    };
    for (int K = 4; K <= 30; ++K)
      for (int L = 0; at_or_below_threshold(K, L); ++L) {
        const auto tag = "wide K=" + std::to_string(K) + " L=" + std::to_string(L);
        for (int ell : admissible_ells(K, L)) check(Region::symmetric(K, L), wide_design(K, L, ell).result, tag);
        if (integer_threshold(K) == L) check(Region::symmetric(K, L), wide_design(K, L).result, tag);
      }
    for (int K : {3, 6, 22, 27}) check(Region::symmetric(K, integer_threshold(K).value()), identity_design(K), "identity");
    for (int K = 4; K <= 22; ++K)
      for (int L = 0; L < central_orbit(K); ++L)
        if (!at_or_below_threshold(K, L))
          check(Region::symmetric(K, L), narrow_design(K, L).result, "narrow K=" + std::to_string(K));
    for (int K = 2; K <= 22; ++K)
      for (int L = 0; L < central_orbit(K); ++L) {
        const auto solved = optimal_design(Region::symmetric(K, L));
        check(solved.region, solved.design, "optimal K=" + std::to_string(K));
      }
    o.detail << designs << " designs, max violation " << fmt(worst);
  });

  criterion(4, "identity-information designs give M = I exactly", 0, [](Outcome& o) {
    for (int K : {3, 6, 22, 27}) {
      const auto d = identity_design_exact(K);
      const auto M = assemble_general(K, design_moments(d)).dense;
      if (!(M == Matrix<Rational>::Identity(M.rows(), M.cols()))) o.fail("assembled K=" + std::to_string(K));
    }
    for (int K : {3, 6}) {
      const auto M = brute_force_info(identity_design_exact(K)).dense;
      if (!(M == Matrix<Rational>::Identity(M.rows(), M.cols()))) o.fail("enumerated K=" + std::to_string(K));
    }
    o.detail << "K in {3, 6, 22, 27} rational; enumeration for K in {3, 6}";
  });

  criterion(5, "structured assembly equals point enumeration", 60.0, [](Outcome& o) {
    std::mt19937 rng(20240601);
    double worst_entry = 0;
    double worst_logdet = 0;
    int designs = 0;
    for (int K = 2; K <= 10; ++K) {
      for (const auto& d : test_grid(K, 24, rng)) {
        const auto brute = brute_force_info(d).dense;
        const auto assembled = assemble_general(K, design_moments(d)).dense;
        const double entry = max_abs(brute - assembled);
        worst_entry = std::max(worst_entry, entry);
        if (entry > 1e-12) o.fail("entry K=" + std::to_string(K));
        const double structured = log_det_symmetric(K, design_moments(d));
        Eigen::FullPivLU<Eigen::MatrixXd> lu(brute);
        lu.setThreshold(1e-10);
        if (lu.isInvertible() && std::isfinite(structured)) {
          const double dense_det = lu.determinant();
          const double rel = std::abs(std::exp(structured) - dense_det) / std::abs(dense_det);
          worst_logdet = std::max(worst_logdet, rel);
          if (rel > 1e-10) o.fail("det K=" + std::to_string(K));
        } else if (lu.isInvertible() != std::isfinite(structured)) {
          o.fail("singularity disagreement K=" + std::to_string(K));
        }
        ++designs;
      }
    }
    o.detail << designs << " designs, max entry diff " << fmt(worst_entry) << ", max det rel diff " << fmt(worst_logdet);
  });

  criterion(6, "support regularity agrees with dense rank", 0, [](Outcome& o) {
    int patterns = 0;
    for (int K = 2; K <= 10; ++K) {
      const int half = K / 2;
      for (std::uint32_t subset = 1; subset < (1u << (half + 1)); ++subset) {
        if (std::popcount(subset) > 3) continue;
        Vector<Rational> h = Vector<Rational>::Zero(half + 1);
        std::vector<int> support;
        Rational total = 0;
        for (int k = 0; k <= half; ++k)
          if (subset >> k & 1u) {
            support.push_back(k);
            h[k] = 1;
            total += 2 * k == K ? 1 : 2;
          }
        h /= total;
        const auto M = brute_force_info(ExactOrbitDesign::symmetric(K, h).cast<double>()).dense;
        const bool full = oracle::rank(M) == ModelDims(K).p;
        if (regularity_of_support(K, support).regular != full)
          o.fail("K=" + std::to_string(K) + " subset " + std::to_string(subset));
        ++patterns;
      }
    }
    o.detail << patterns << " support patterns";
  });

  criterion(7, "worked K=6 narrow example", 0, [](Outcome& o) {
    const auto spec = narrow_design(6, 2);
    const double closed = (45 - 6 * std::sqrt(37.0)) / 22;
    const auto four = [](double v) {
      char buf[16];
      std::snprintf(buf, sizeof buf, "%.4f", v);
      return std::string(buf);
    };
    if (std::abs(spec.w_star - closed) > 1e-12) o.fail("w_star " + fmt(spec.w_star - closed));
    if (four(point_weight(spec.result, 2)) != "0.0258") o.fail("point weight on O_2");
    if (four(point_weight(spec.result, 3)) != "0.0113") o.fail("point weight on O_3");
    if (four(spec.d_efficiency) != "0.8854") o.fail("efficiency");
    o.detail << "w_star - closed form = " << fmt(spec.w_star - closed);
  });

  criterion(8, "sensitivity polynomial matches dense quadratic form", 0, [](Outcome& o) {
    std::mt19937 rng(20240601);
    double worst = 0;
    int checked = 0;
    for (int K = 2; K <= 8; ++K) {
      for (const auto& d : test_grid(K, 24, rng)) {
        if (!regularity(d).regular) continue;
        const auto poly = sensitivity_poly(K, design_moments(d));
        const Eigen::MatrixXd M = brute_force_info(d).dense;
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
        for (int k = 0; k <= K; ++k) {
          const Eigen::VectorXd f = regression_vector(*enumerate_orbit(K, k).begin());
          const double dense = f.dot(lu.solve(f));
          const double diff = std::abs(poly.at(k) - dense);
          worst = std::max(worst, diff);
          if (diff > 1e-9) o.fail("K=" + std::to_string(K) + " k=" + std::to_string(k));
        }
        ++checked;
      }
    }
    double min_a4 = std::numeric_limits<double>::infinity();
    for (int K = 4; K <= 22; ++K)
      for (int L = 0; L < central_orbit(K); ++L) {
        if (at_or_below_threshold(K, L)) continue;
        const double a4 = sensitivity_poly(K, design_moments(narrow_design(K, L).result)).a4;
        min_a4 = std::min(min_a4, a4);
        if (!(a4 > 0)) o.fail("a4 <= 0 at K=" + std::to_string(K) + " L=" + std::to_string(L));
      }
    o.detail << checked << " regular designs, max diff " << fmt(worst) << ", min narrow a4 " << fmt(min_a4);
  });

  std::printf("%s: %d criteria failed\n", failures ? "FAILED" : "OK", failures);
  return failures ? 1 : 0;
}
