#include "orbitdoe/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <numeric>
#include <set>
#include <sstream>

#include "orbitdoe/errors.hpp"
#include "orbitdoe/info_matrix.hpp"

namespace orbitdoe::cli {

namespace {

using json = nlohmann::json;

std::string printf_string(const char* fmt, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, value);
  return buf;
}

std::string fixed4(double v) { return printf_string("%.4f", v); }
std::string machine(double v) { return printf_string("%.17g", v); }
std::string fixed2(double v) { return printf_string("%.2f", v); }

void require_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw DesignFileError(where + ": expected a JSON object");
  for (const auto& item : obj.items())
    if (!allowed.count(item.key())) throw DesignFileError(where + ": unknown key \"" + item.key() + "\"");
  for (const auto& key : allowed)
    if (!obj.contains(key)) throw DesignFileError(where + ": missing key \"" + key + "\"");
}

int require_int(const json& v, const std::string& what) {
  if (!v.is_number_integer()) throw DesignFileError(what + " must be an integer");
  return v.get<int>();
}

}  // namespace

DesignFile read_design_json(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw DesignFileError(std::string("design file is not valid JSON: ") + e.what());
  }
  require_keys(doc, {"k", "lower", "upper", "orbits"}, "design file");
  const int K = require_int(doc["k"], "k");
  const int lower = require_int(doc["lower"], "lower");
  const int upper = require_int(doc["upper"], "upper");
  if (K < 2 || K > kMaxExactFactors) throw DesignFileError("k must lie in 2..64");
  std::optional<Region> region;
  try {
    region.emplace(K, lower, upper);
  } catch (const std::invalid_argument& e) {
    throw DesignFileError(e.what());
  }
  if (!doc["orbits"].is_array()) throw DesignFileError("orbits must be an array");

  Vector<double> w = Vector<double>::Zero(K + 1);
  std::set<int> seen;
  for (const auto& entry : doc["orbits"]) {
    require_keys(entry, {"k", "weight"}, "orbit entry");
    const int k = require_int(entry["k"], "orbit k");
    if (k < 0 || k > K) throw DesignFileError("orbit k=" + std::to_string(k) + " outside 0..K");
    if (!seen.insert(k).second) throw DesignFileError("orbit k=" + std::to_string(k) + " listed twice");
    if (!entry["weight"].is_number()) throw DesignFileError("orbit weight must be a number");
    const double weight = entry["weight"].get<double>();
    if (!std::isfinite(weight) || weight < 0) throw DesignFileError("orbit weight must be finite and nonnegative");
    if (weight > 0 && !region->contains_orbit(k))
      throw DesignFileError("orbit k=" + std::to_string(k) + " carries weight outside [" + std::to_string(lower) + ", " +
                            std::to_string(upper) + "]");
    w[k] = weight;
  }
  const double total = w.sum();
  if (!(std::abs(total - 1.0) <= kFileWeightSumTolerance))
    throw DesignFileError("orbit weights sum to " + machine(total) + ", expected 1");
  w /= total;
  return {*region, OrbitDesign::from_orbit_weights(K, w)};
}

void write_design_json(std::ostream& out, const Region& region, const OrbitDesign& design) {
  json orbits = json::array();
  for (int k : design.support()) orbits.push_back(json{{"k", k}, {"weight", design.weight(k)}});
  const json doc = {{"k", design.k_factors()}, {"lower", region.lower()}, {"upper", region.upper()}, {"orbits", orbits}};
  out << doc.dump(2) << '\n';
}

void write_orbit_csv(std::ostream& out, const OrbitDesign& design, bool table_mode) {
  const auto fmt = table_mode ? fixed4 : machine;
  out << "k,orbit_weight,point_weight,orbit_size\n";
  for (int k : design.support())
    out << k << ',' << fmt(design.weight(k)) << ',' << fmt(point_weight(design, k)) << ','
        << orbit_size(design.k_factors(), k) << '\n';
}

DesignReport make_report(const OptimalDesign& solved) {
  const auto& d = solved.design;
  DesignReport r;
  r.k_factors = d.k_factors();
  r.lower = solved.region.lower();
  r.upper = solved.region.upper();
  r.p = ModelDims(r.k_factors).p;
  r.regime = solved.regime;
  for (int k : d.support()) r.orbits.push_back({k, d.weight(k), point_weight(d, k), orbit_size(r.k_factors, k)});
  r.moments = design_moments(d);
  r.log_det = log_det(d);
  r.d_efficiency = d_efficiency(d);
  r.kw_max_violation = solved.kw.max_violation;
  r.passed = solved.kw.passed;
  return r;
}

void print_report(std::ostream& out, const DesignReport& r) {
  out << "regime            " << to_string(r.regime) << '\n'
      << "K                 " << r.k_factors << '\n'
      << "region            [" << r.lower << ", " << r.upper << "]\n"
      << "p                 " << r.p << '\n'
      << "orbit  orbit_weight  point_weight  orbit_size\n";
  for (const auto& row : r.orbits) {
    char line[96];
    std::snprintf(line, sizeof line, "%5d  %12.4f  %12.4f  %10llu\n", row.k, row.orbit_weight, row.point_weight,
                  static_cast<unsigned long long>(row.orbit_size));
    out << line;
  }
  out << "moments           m1=" << printf_string("%.6g", r.moments.m1) << " m2=" << printf_string("%.6g", r.moments.m2)
      << " m3=" << printf_string("%.6g", r.moments.m3) << " m4=" << printf_string("%.6g", r.moments.m4) << '\n'
      << "log_det           " << printf_string("%.12g", r.log_det) << '\n'
      << "d_efficiency      " << fixed4(r.d_efficiency) << '\n'
      << "kw_max_violation  " << printf_string("%.3e", r.kw_max_violation) << '\n'
      << "passed            " << (r.passed ? "yes" : "no") << '\n';
}

std::string format_fixed(const Rational& value, int decimals) {
  using boost::multiprecision::cpp_int;
  const bool negative = value < 0;
  const Rational magnitude = negative ? Rational(-value) : value;
  cpp_int scale = 1;
  for (int i = 0; i < decimals; ++i) scale *= 10;
  const cpp_int num = boost::multiprecision::numerator(magnitude) * scale;
  const cpp_int den = boost::multiprecision::denominator(magnitude);
  cpp_int q = num / den;
  const cpp_int twice_rem = 2 * (num % den);
  if (twice_rem > den || (twice_rem == den && q % 2 == 1)) ++q;
  std::string digits = q.str();
  if (static_cast<int>(digits.size()) <= decimals) digits.insert(0, static_cast<std::size_t>(decimals + 1) - digits.size(), '0');
  if (decimals > 0) digits.insert(digits.size() - static_cast<std::size_t>(decimals), ".");
  if (negative && q != 0) digits.insert(0, "-");
  return digits;
}

std::vector<WideTableRow> wide_table_rows(int K) {
  std::vector<WideTableRow> rows;
  const double b = threshold_b(K);
  const int c = central_orbit(K);
  const auto threshold = integer_threshold(K);
  for (int L = 0; at_or_below_threshold(K, L); ++L) {
    std::vector<std::optional<int>> choices;
    if (threshold && *threshold == L) choices.emplace_back(std::nullopt);
    for (int ell : admissible_ells(K, L)) choices.emplace_back(ell);
    for (const auto& ell : choices) {
      const auto spec = wide_design(K, L, ell);
      rows.push_back({K, L, ell, c, spec.exact.weight(L), ell ? spec.exact.weight(*ell) : Rational(0), spec.exact.weight(c), b});
    }
  }
  return rows;
}

std::vector<NarrowTableRow> narrow_table_rows(int K) {
  std::vector<NarrowTableRow> rows;
  const double b = threshold_b(K);
  const int c = central_orbit(K);
  for (int L = 0; L < c; ++L) {
    if (at_or_below_threshold(K, L)) continue;
    const auto spec = narrow_design(K, L);
    rows.push_back({K, L, c, spec.w_star, spec.result.weight(c), spec.d_efficiency, b});
  }
  return rows;
}

std::string format_row(const WideTableRow& row) {
  const auto cell = [](const Rational& w) { return w == 0 ? std::string("-") : format_fixed(w, 4); };
  std::ostringstream s;
  s << row.K << ' ' << row.L << ' ' << (row.ell ? std::to_string(*row.ell) : "-") << ' ' << row.c << ' ' << cell(row.w_L)
    << ' ' << cell(row.w_ell) << ' ' << cell(row.w_c) << ' ' << fixed2(row.b_k);
  return s.str();
}

std::string format_row(const NarrowTableRow& row) {
  std::ostringstream s;
  s << row.K << ' ' << row.L << ' ' << row.c << ' ' << fixed4(row.w_L) << ' ' << fixed4(row.w_c) << ' '
    << fixed4(row.d_efficiency) << ' ' << fixed2(row.b_k);
  return s.str();
}

std::vector<ExpandedPoint> expand_design(const OrbitDesign& design, std::optional<long long> n) {
  std::vector<ExpandedPoint> points;
  const int K = design.k_factors();
  for (int k : design.support()) {
    const double pw = point_weight(design, k);
    std::optional<long long> count;
    if (n) count = std::llround(static_cast<double>(*n) * pw);
    for (const auto& x : enumerate_orbit(K, k)) points.push_back({x, k, pw, count});
  }
  return points;
}

namespace {

struct OptimalArgs {
  int k = 0;
  int lower = 0;
  std::optional<int> upper;
  std::optional<int> ell;
  double tol = kDefaultKwTolerance;
  std::string json_path;
  std::string csv_path;
  bool force = false;
};

struct VerifyArgs {
  std::string file;
  std::optional<int> k;
  std::optional<int> lower;
  std::optional<int> upper;
  double tol = kDefaultKwTolerance;
};

struct TablesArgs {
  std::string which = "both";
  std::string k_range;
  std::string csv_path;
};

struct ExpandArgs {
  std::string file;
  std::optional<int> k;
  std::optional<int> lower;
  std::optional<int> upper;
  std::optional<int> ell;
  std::optional<long long> n;
  std::string csv_path;
};

constexpr int kSoftMaxFactors = 22;

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::invalid_argument("cannot open " + path + " for writing");
  return f;
}

OptimalDesign solve(int K, int lower, std::optional<int> upper, std::optional<int> ell, double tol, bool force) {
  if (K > kSoftMaxFactors && !force)
    throw std::invalid_argument("K=" + std::to_string(K) + " exceeds the supported range 2.." + std::to_string(kSoftMaxFactors) +
                                " (pass --force to override)");
  if (K < 2) throw std::invalid_argument("K must be at least 2");
  const Region region(K, lower, upper.value_or(K - lower));
  auto solved = optimal_design(region, ell);
  solved.kw = kw_check(region, solved.design, tol);
  return solved;
}

int cmd_optimal(const OptimalArgs& a, std::ostream& out) {
  const auto solved = solve(a.k, a.lower, a.upper, a.ell, a.tol, a.force);
  print_report(out, make_report(solved));
  if (!a.json_path.empty()) {
    auto f = open_output(a.json_path);
    write_design_json(f, solved.region, solved.design);
  }
  if (!a.csv_path.empty()) {
    auto f = open_output(a.csv_path);
    write_orbit_csv(f, solved.design);
  }
  return solved.kw.passed ? kSuccess : kKwFailure;
}

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
  std::ifstream in(a.file);
  if (!in) throw DesignFileError("cannot open design file " + a.file);
  const auto file = read_design_json(in);
  const int K = file.design.k_factors();
  if (a.k && *a.k != K) throw std::invalid_argument("--k " + std::to_string(*a.k) + " disagrees with the file (k=" + std::to_string(K) + ")");
  const int lower = a.lower.value_or(file.region.lower());
  const int upper = a.upper.value_or(a.lower ? K - lower : file.region.upper());
  const Region region(K, lower, upper);
  if (!file.design.supported_within(region))
    throw DesignFileError("design carries weight outside [" + std::to_string(lower) + ", " + std::to_string(upper) + "]");

  const auto report = kw_check(region, file.design, a.tol);
  out << "K                 " << K << '\n'
      << "region            [" << lower << ", " << upper << "]\n"
      << "p                 " << report.p << '\n'
      << "orbit  weight        psi               psi-p\n";
  for (const auto& [k, psi] : report.per_orbit) {
    char line[128];
    std::snprintf(line, sizeof line, "%5d  %-12.4f  %-16.10f  %.3e\n", k, file.design.weight(k), psi, psi - report.p);
    out << line;
  }
  out << "max_violation     " << printf_string("%.3e", report.max_violation) << " at orbit " << report.argmax_orbit << '\n'
      << "tolerance         " << printf_string("%.3e", report.tolerance) << '\n'
      << "d_efficiency      " << fixed4(d_efficiency(file.design)) << '\n'
      << "result            " << (report.passed ? "PASS" : "FAIL") << '\n';
  return report.passed ? kSuccess : kKwFailure;
}

std::vector<int> parse_k_range(const std::string& spec, const std::vector<int>& fallback) {
  if (spec.empty()) return fallback;
  int lo = 0;
  int hi = 0;
  const auto dash = spec.find('-');
  try {
    std::size_t used = 0;
    if (dash == std::string::npos) {
      lo = hi = std::stoi(spec, &used);
      if (used != spec.size()) throw std::invalid_argument(spec);
    } else {
      lo = std::stoi(spec.substr(0, dash), &used);
      if (used != dash) throw std::invalid_argument(spec);
      hi = std::stoi(spec.substr(dash + 1), &used);
      if (used != spec.size() - dash - 1) throw std::invalid_argument(spec);
    }
  } catch (const std::logic_error&) {
    throw std::invalid_argument("--k expects N or A-B, got \"" + spec + "\"");
  }
  if (lo < 4 || hi > kSoftMaxFactors || lo > hi) throw std::invalid_argument("--k range must lie within 4..22");
  std::vector<int> ks(static_cast<std::size_t>(hi - lo + 1));
  std::iota(ks.begin(), ks.end(), lo);
  return ks;
}

int cmd_tables(const TablesArgs& a, std::ostream& out) {
  const bool wide = a.which == "wide" || a.which == "both";
  const bool narrow = a.which == "narrow" || a.which == "both";
  std::vector<int> wide_default{4, 5, 6, 7, 8, 9, 10, 11, 12, 22};
  std::vector<int> narrow_default(19);
  std::iota(narrow_default.begin(), narrow_default.end(), 4);

  std::ostringstream csv;
  csv << "table,K,L,ell,c,w_L,w_ell,w_c,d_efficiency,B_K\n";
  const auto to_csv = [](const std::string& row) {
    std::string s = row;
    std::replace(s.begin(), s.end(), ' ', ',');
    return s;
  };
  if (wide) {
    out << "# wide bounds: K L ell c w_L w_ell w_c B_K\n";
    for (int K : parse_k_range(a.k_range, wide_default)) {
      for (const auto& row : wide_table_rows(K)) {
        const std::string line = format_row(row);
        out << line << '\n';
        // splice an empty d_efficiency cell before B_K
        std::string cells = to_csv(line);
        cells.insert(cells.rfind(','), ",");
        csv << "wide," << cells << '\n';
      }
    }
  }
  if (wide && narrow) out << '\n';
  if (narrow) {
    out << "# narrow bounds: K L c w_L w_c d_efficiency B_K\n";
    for (int K : parse_k_range(a.k_range, narrow_default)) {
      for (const auto& row : narrow_table_rows(K)) {
        const std::string line = format_row(row);
        out << line << '\n';
        std::ostringstream cells;
        cells << row.K << ',' << row.L << ",," << row.c << ',' << fixed4(row.w_L) << ",," << fixed4(row.w_c) << ','
              << fixed4(row.d_efficiency) << ',' << fixed2(row.b_k);
        csv << "narrow," << cells.str() << '\n';
      }
    }
  }
  if (!a.csv_path.empty()) {
    auto f = open_output(a.csv_path);
    f << csv.str();
  }
  return kSuccess;
}

int cmd_expand(const ExpandArgs& a, std::ostream& out, std::ostream& err) {
  OrbitDesign design;
  if (!a.file.empty()) {
    std::ifstream in(a.file);
    if (!in) throw DesignFileError("cannot open design file " + a.file);
    design = read_design_json(in).design;
  } else {
    if (!a.k || !a.lower) throw std::invalid_argument("expand needs a design file or --k and --lower");
    design = solve(*a.k, *a.lower, a.upper, a.ell, kDefaultKwTolerance, false).design;
  }
  if (a.n && *a.n <= 0) throw std::invalid_argument("--n must be positive");

  const auto points = expand_design(design, a.n);
  std::ostringstream body;
  body << "point,k,point_weight" << (a.n ? ",count" : "") << '\n';
  long long total = 0;
  for (const auto& p : points) {
    body << p.x.to_string() << ',' << p.k << ',' << machine(p.point_weight);
    if (p.count) {
      body << ',' << *p.count;
      total += *p.count;
    }
    body << '\n';
  }
  if (a.csv_path.empty()) {
    out << body.str();
  } else {
    auto f = open_output(a.csv_path);
    f << body.str();
  }
  if (a.n) {
    err << "warning: counts are round(N * point_weight); optimal rounding to an exact design is not attempted\n";
    if (total != *a.n) err << "warning: rounded counts sum to " << total << ", not N=" << *a.n << '\n';
  }
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"D-optimal invariant designs for two-level models with two-factor interactions on a restricted hypercube",
               "orbitdoe"};
  app.require_subcommand(1);

  OptimalArgs opt;
  auto* optimal = app.add_subcommand("optimal", "construct and certify the optimal design for X_{L,U}");
  optimal->add_option("--k", opt.k, "number of factors K")->required();
  optimal->add_option("--lower", opt.lower, "minimal number of active factors L")->required();
  optimal->add_option("--upper", opt.upper, "maximal number of active factors U (default K-L)");
  optimal->add_option("--ell", opt.ell, "inner orbit for wide bounds");
  optimal->add_option("--tol", opt.tol, "equivalence-check tolerance");
  optimal->add_option("--json", opt.json_path, "write the design file here");
  optimal->add_option("--csv", opt.csv_path, "write orbit weights as CSV here");
  optimal->add_flag("--force", opt.force, "allow K above 22");

  VerifyArgs ver;
  auto* verify = app.add_subcommand("verify", "check a design file against the equivalence theorem");
  verify->add_option("file", ver.file, "design file (JSON)")->required();
  verify->add_option("--k", ver.k, "expected number of factors");
  verify->add_option("--lower", ver.lower, "region lower bound (default from file)");
  verify->add_option("--upper", ver.upper, "region upper bound (default from file, or K-L with --lower)");
  verify->add_option("--tol", ver.tol, "equivalence-check tolerance");

  TablesArgs tab;
  auto* tables = app.add_subcommand("tables", "regenerate the tables of wide- and narrow-bound designs");
  tables->add_option("--which", tab.which, "wide, narrow or both")->check(CLI::IsMember({"wide", "narrow", "both"}));
  tables->add_option("--k", tab.k_range, "K or A-B within 4..22");
  tables->add_option("--csv", tab.csv_path, "also write the rows as CSV here");

  ExpandArgs exp;
  auto* expand = app.add_subcommand("expand", "list every support point with its weight");
  expand->add_option("file", exp.file, "design file (JSON); otherwise generated from --k/--lower");
  expand->add_option("--k", exp.k, "number of factors K");
  expand->add_option("--lower", exp.lower, "minimal number of active factors L");
  expand->add_option("--upper", exp.upper, "maximal number of active factors U");
  expand->add_option("--ell", exp.ell, "inner orbit for wide bounds");
  expand->add_option("--n", exp.n, "total sample size for naive replication counts");
  expand->add_option("--csv", exp.csv_path, "write the point list here");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    if (optimal->parsed()) return cmd_optimal(opt, out);
    if (verify->parsed()) return cmd_verify(ver, out);
    if (tables->parsed()) return cmd_tables(tab, out);
    return cmd_expand(exp, out, err);
  } catch (const SingularDesignError& e) {
    err << "error: " << e.what() << '\n';
    return kSingularError;
  } catch (const EstimabilityError& e) {
    err << "error: " << e.what() << '\n';
    return kSingularError;
  } catch (const DesignFileError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace orbitdoe::cli
