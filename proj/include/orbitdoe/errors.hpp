#pragma once

#include <stdexcept>
#include <string>

namespace orbitdoe {

/// The information matrix of the design is singular.
class SingularDesignError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No design on the requested region can estimate all parameters.
class EstimabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The requested bounds belong to a different construction regime.
class RegimeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Region shapes for which no construction is available (asymmetric narrow bounds).
class UnsupportedRegionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace orbitdoe
