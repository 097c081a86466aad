#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "orbitdoe/design_construct.hpp"
#include "orbitdoe/moments.hpp"
#include "orbitdoe/orbit_region.hpp"
#include "orbitdoe/verify.hpp"

namespace orbitdoe::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsageError = 2,
  kSingularError = 3,
  kKwFailure = 4,
};

/// Malformed design file or invalid weights.
class DesignFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DesignFile {
  Region region;
  OrbitDesign design;
};

/// Weight sums within this distance of 1 are accepted and renormalised.
inline constexpr double kFileWeightSumTolerance = 1e-9;

/// {"k": int, "lower": int, "upper": int, "orbits": [{"k": int, "weight": float}]}
DesignFile read_design_json(std::istream& in);
void write_design_json(std::ostream& out, const Region& region, const OrbitDesign& design);

/// Header k,orbit_weight,point_weight,orbit_size; 17 significant digits or 4 decimals.
void write_orbit_csv(std::ostream& out, const OrbitDesign& design, bool table_mode = false);

struct OrbitRow {
  int k;
  double orbit_weight;
  double point_weight;
  std::uint64_t orbit_size;
};

struct DesignReport {
  int k_factors = 0;
  int lower = 0;
  int upper = 0;
  int p = 0;
  Regime regime = Regime::wide;
  std::vector<OrbitRow> orbits;
  MomentSet moments;
  double log_det = 0;
  double d_efficiency = 0;
  double kw_max_violation = 0;
  bool passed = false;
};

DesignReport make_report(const OptimalDesign& solved);
void print_report(std::ostream& out, const DesignReport& report);

/// Fixed-point rendering with round-half-to-even on the exact value.
std::string format_fixed(const Rational& value, int decimals);

struct WideTableRow {
  int K;
  int L;
  std::optional<int> ell;
  int c;
  Rational w_L;    // orbit weight on O_L (zero when dropped)
  Rational w_ell;  // orbit weight on O_ell (zero when dropped or absent)
  Rational w_c;    // weight on each central orbit
  double b_k;
};

struct NarrowTableRow {
  int K;
  int L;
  int c;
  double w_L;
  double w_c;
  double d_efficiency;
  double b_k;
};

/// Every (L, ell) combination for the wide regime at this K, in table order.
std::vector<WideTableRow> wide_table_rows(int K);
/// Every narrow L at this K.
std::vector<NarrowTableRow> narrow_table_rows(int K);

std::string format_row(const WideTableRow& row);
std::string format_row(const NarrowTableRow& row);

/// One design point with its weight and optional naive replication count.
struct ExpandedPoint {
  DesignPoint x;
  int k;
  double point_weight;
  std::optional<long long> count;
};

std::vector<ExpandedPoint> expand_design(const OrbitDesign& design, std::optional<long long> n = std::nullopt);

/// Entry point shared by the executable and the tests. args excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace orbitdoe::cli
