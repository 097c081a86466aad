#pragma once

#include <type_traits>

#include <Eigen/Core>
#include <boost/multiprecision/cpp_int.hpp>

// Boost 1.74 probes every constructor argument for a byte-container
// interface; Eigen 3.4 expressions expose a void const_iterator, which makes
// that probe a hard error. Eigen types are never byte containers.
namespace boost::multiprecision::detail {
template <class S, int R, int C, int O, int MR, int MC>
struct is_byte_container<Eigen::Matrix<S, R, C, O, MR, MC>> : std::false_type {};
template <class D>
struct is_byte_container<Eigen::MatrixBase<D>> : std::false_type {};
template <class D>
struct is_byte_container<Eigen::DenseBase<D>> : std::false_type {};
template <class D>
struct is_byte_container<Eigen::ArrayBase<D>> : std::false_type {};
}  // namespace boost::multiprecision::detail

#include <boost/multiprecision/eigen.hpp>

namespace orbitdoe {

/// Exact scalar used for the rational code paths.
using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend,
                                               boost::multiprecision::et_off>;

template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class Scalar>
inline constexpr bool is_exact_v = std::is_same_v<Scalar, Rational>;

template <class Scalar>
double to_double(const Scalar& x) {
  return static_cast<double>(x);
}

/// Converts between the supported scalars (double <-> Rational).
template <class To, class From>
To scalar_cast(const From& x) {
  if constexpr (std::is_same_v<To, From>) {
    return x;
  } else if constexpr (is_exact_v<To>) {
    return To(x);  // exact binary value of the double
  } else {
    return static_cast<To>(x);
  }
}

/// Nonnegative integer power by squaring.
template <class S>
S int_pow(S base, int n) {
  S out(1);
  for (; n > 0; n >>= 1, base *= base)
    if (n & 1) out *= base;
  return out;
}

}  // namespace orbitdoe
