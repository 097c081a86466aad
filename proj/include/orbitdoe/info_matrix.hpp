#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "orbitdoe/errors.hpp"
#include "orbitdoe/moments.hpp"
#include "orbitdoe/orbit_region.hpp"
#include "orbitdoe/scalar.hpp"

namespace orbitdoe {

/// Parameter bookkeeping for the model with all two-factor interactions.
struct ModelDims {
  int K;
  int p;
  int n_inter;

  explicit ModelDims(int k_factors);
};

/// Interaction pairs (i,j), i<j, in lexicographic order (0-based factor indices).
std::vector<std::pair<int, int>> interaction_pairs(int K);

/// 0/1 incidence of factors in interactions, C(K,2) x K.
Eigen::MatrixXi build_s_matrix(int K);

/// Regression vector f(x) = (1, x', x~')'.
template <class Scalar = double>
Vector<Scalar> regression_vector(const DesignPoint& x) {
  const int K = x.size();
  const ModelDims dims(K);
  Vector<Scalar> f(dims.p);
  f[0] = Scalar(1);
  for (int i = 0; i < K; ++i) f[1 + i] = Scalar(x[i]);
  int r = 1 + K;
  for (const auto& [i, j] : interaction_pairs(K)) f[r++] = Scalar(x[i] * x[j]);
  return f;
}

template <class Scalar>
struct InfoMatrixT {
  ModelDims dims;
  Matrix<Scalar> dense;
  MomentSetT<Scalar> moments;
};

using InfoMatrix = InfoMatrixT<double>;
using ExactInfoMatrix = InfoMatrixT<Rational>;

namespace detail {

/// Factor index set behind each coordinate of f: {}, {i}, {i,j}.
struct FactorSet {
  int size = 0;
  int idx[2] = {-1, -1};
};

std::vector<FactorSet> regression_factor_sets(int K);

/// Number of factors appearing an odd number of times in the product of two coordinates.
int odd_factor_count(const FactorSet& a, const FactorSet& b);

}  // namespace detail

/// Dense information matrix of an invariant design from its moments.
/// Handles asymmetric designs (m1, m3 nonzero).
template <class Scalar>
InfoMatrixT<Scalar> assemble_general(int K, const MomentSetT<Scalar>& m) {
  if (K < 2) throw std::domain_error("assemble_general: need K >= 2");
  ModelDims dims(K);
  const auto sets = detail::regression_factor_sets(K);
  const Scalar values[5] = {Scalar(1), m.m1, m.m2, m.m3, m.m4};
  Matrix<Scalar> M(dims.p, dims.p);
  for (int r = 0; r < dims.p; ++r) {
    for (int c = r; c < dims.p; ++c) {
      const Scalar v = values[detail::odd_factor_count(sets[static_cast<std::size_t>(r)], sets[static_cast<std::size_t>(c)])];
      M(r, c) = v;
      M(c, r) = v;
    }
  }
  return {dims, std::move(M), m};
}

/// Eigenvalues of M22 - m2^2 J together with the two factors of det(M11).
template <class Scalar>
struct BlockEigenvaluesT {
  Scalar lambda_one{0};
  Scalar lambda_S{0};
  Scalar lambda_I{0};
  int mult_one = 1;
  int mult_S = 0;
  int mult_I = 0;
  Scalar det_M11_factor_big{0};    // 1 + (K-1) m2, multiplicity 1
  Scalar det_M11_factor_small{0};  // 1 - m2, multiplicity K-1
};

using BlockEigenvalues = BlockEigenvaluesT<double>;

inline void require_symmetric_moments(const char* who, const auto& m) {
  if (!m.symmetric()) throw std::domain_error(std::string(who) + ": requires symmetric moments (m1 = m3 = 0)");
}

template <class Scalar>
BlockEigenvaluesT<Scalar> block_eigenvalues(int K, const MomentSetT<Scalar>& m) {
  if (K < 2) throw std::domain_error("block_eigenvalues: need K >= 2");
  require_symmetric_moments("block_eigenvalues", m);
  const Scalar k(K);
  BlockEigenvaluesT<Scalar> e;
  e.lambda_one = Scalar(1) + Scalar(2) * (k - 2) * m.m2 + (k - 2) * (k - 3) * m.m4 / Scalar(2) -
                 k * (k - 1) * m.m2 * m.m2 / Scalar(2);
  e.lambda_S = Scalar(1) + (k - 4) * m.m2 - (k - 3) * m.m4;
  e.lambda_I = Scalar(1) - Scalar(2) * m.m2 + m.m4;
  // With K = 2 the single interaction only carries the all-ones direction.
  e.mult_S = K >= 3 ? K - 1 : 0;
  e.mult_I = K >= 3 ? K * (K - 3) / 2 : 0;
  e.det_M11_factor_big = Scalar(1) + (k - 1) * m.m2;
  e.det_M11_factor_small = Scalar(1) - m.m2;
  return e;
}

/// Which structured block of a symmetric design loses rank.
struct SingularBlocks {
  bool m11 = false;
  bool lambda_one = false;
  bool lambda_S = false;
  bool lambda_I = false;

  bool any() const { return m11 || lambda_one || lambda_S || lambda_I; }
  std::string describe() const;
};

/// A factor counts as zero when it is at most 1e-12 times its magnitude scale.
SingularBlocks singular_blocks(int K, const MomentSet& m);

/// log det M for symmetric moments from the block factorisation; -infinity when singular.
double log_det_symmetric(int K, const MomentSet& m);

/// Exact determinant of the chess-board matrix (rational path).
Rational det_symmetric(int K, const ExactMomentSet& m);

/// Support-based nonsingularity test for symmetric designs.
struct RegularityReport {
  bool regular = false;
  SingularBlocks failing;
  std::vector<int> symmetric_support;
  std::string diagnostic;
};

RegularityReport regularity_of_support(int K, const std::vector<int>& symmetric_support);

template <class Scalar>
RegularityReport regularity(const OrbitDesignT<Scalar>& design) {
  if (!design.is_symmetric()) throw std::domain_error("regularity: requires a symmetric design");
  return regularity_of_support(design.k_factors(), design.symmetric_support());
}

/// Scalars defining the inverse of a nonsingular chess-board information matrix:
///
///   M^-1 = [ c0       0        -c2 1' ]
///          [ 0        M11^-1    0     ]
///          [ -c2 1    0         C22   ]
///
/// with M11^-1 = diag/offdiag entries and
/// C22 = c22_scale (I - delta_S S S' - delta_J J).
template <class Scalar>
struct InverseCoefficientsT {
  Scalar c0{0};
  Scalar c2{0};
  Scalar delta_S{0};
  Scalar delta_J{0};
  Scalar c22_scale{0};
  Scalar m11_inv_diag{0};
  Scalar m11_inv_offdiag{0};
};

using InverseCoefficients = InverseCoefficientsT<double>;

template <class Scalar>
InverseCoefficientsT<Scalar> inverse_coefficients(int K, const MomentSetT<Scalar>& m) {
  require_symmetric_moments("inverse_coefficients", m);
  const auto e = block_eigenvalues(K, m);
  bool singular = false;
  if constexpr (is_exact_v<Scalar>) {
    singular = e.det_M11_factor_big <= 0 || e.det_M11_factor_small <= 0 || e.lambda_one <= 0 ||
               (e.mult_S > 0 && e.lambda_S <= 0) || (e.mult_I > 0 && e.lambda_I <= 0);
  } else {
    singular = singular_blocks(K, m).any();
  }
  if (singular) throw SingularDesignError("inverse_coefficients: information matrix is singular");

  const Scalar k(K);
  const Scalar n = k * (k - 1) / Scalar(2);
  InverseCoefficientsT<Scalar> c;
  c.c2 = m.m2 / e.lambda_one;
  c.c0 = Scalar(1) + c.c2 * n * m.m2;
  const Scalar inv_small = Scalar(1) / e.det_M11_factor_small;
  const Scalar shrink = m.m2 / e.det_M11_factor_big;
  c.m11_inv_diag = inv_small * (Scalar(1) - shrink);
  c.m11_inv_offdiag = -inv_small * shrink;
  if (K >= 4) {
    c.c22_scale = Scalar(1) / e.lambda_I;
    c.delta_S = (m.m2 - m.m4) / e.lambda_S;
    c.delta_J = (Scalar(2) * m.m4 - Scalar(4) * c.delta_S * ((k - 3) * m.m4 + Scalar(2) * m.m2) -
                 Scalar(2) * c.c2 * m.m2 * e.lambda_I) /
                (Scalar(2) + Scalar(4) * (k - 2) * m.m2 + (k - 2) * (k - 3) * m.m4);
  } else {
    // K <= 3: I, SS' and J are linearly dependent and M22 = a I + b J.
    const Scalar a = K == 2 ? Scalar(1) : Scalar(1) - m.m2;
    const Scalar b = K == 2 ? Scalar(0) : m.m2;
    c.c22_scale = Scalar(1) / a;
    c.delta_S = Scalar(0);
    c.delta_J = (b - m.m2 * m.m2) / e.lambda_one;
  }
  return c;
}

/// Dense p x p matrix assembled from the structured inverse.
template <class Scalar>
Matrix<Scalar> structured_inverse(int K, const InverseCoefficientsT<Scalar>& c) {
  const ModelDims dims(K);
  const auto pairs = interaction_pairs(K);
  Matrix<Scalar> inv = Matrix<Scalar>::Zero(dims.p, dims.p);
  inv(0, 0) = c.c0;
  for (int i = 0; i < K; ++i)
    for (int j = 0; j < K; ++j) inv(1 + i, 1 + j) = i == j ? c.m11_inv_diag : c.m11_inv_offdiag;
  const int off = 1 + K;
  for (int a = 0; a < dims.n_inter; ++a) {
    inv(0, off + a) = -c.c2;
    inv(off + a, 0) = -c.c2;
    for (int b = 0; b < dims.n_inter; ++b) {
      const auto& [i1, j1] = pairs[static_cast<std::size_t>(a)];
      const auto& [i2, j2] = pairs[static_cast<std::size_t>(b)];
      // (S S')_{ab} counts shared factors.
      const int shared = (i1 == i2) + (i1 == j2) + (j1 == i2) + (j1 == j2);
      Scalar v = (a == b ? Scalar(1) : Scalar(0)) - c.delta_S * Scalar(shared) - c.delta_J;
      inv(off + a, off + b) = c.c22_scale * v;
    }
  }
  return inv;
}

}  // namespace orbitdoe
