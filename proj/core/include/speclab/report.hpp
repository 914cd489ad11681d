#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace speclab {

/// Outcome record shared by every checker: the two sides of the inequality
/// under test, their ratio, optional fitted constants, and the pass verdict
/// together with the sizes and tolerances that determined it. Serializes to
/// JSON deterministically (sorted keys, shortest round-trip numbers), so a
/// fixed config and seed give byte-identical reports.
struct InequalityReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  std::optional<double> fitted_constant;
  std::optional<double> fitted_exponent;
  bool pass = false;
  std::uint64_t seed = 0;
  std::map<std::string, double> sizes;
  std::map<std::string, double> tolerances;
  std::map<std::string, double> metadata;

  /// Optional per-trial / per-band table (written as CSV by the CLI).
  std::vector<std::string> table_header;
  std::vector<std::vector<double>> table;
};

/// JSON text of the report (no trailing newline). `tool_version`, when
/// non-empty, is included as a field.
std::string report_to_json(const InequalityReport& report,
                           const std::string& tool_version = {});

/// Shortest round-trip decimal form of a double (bit-exact on re-parse).
std::string format_double(double v);

/// Parses a double previously produced by format_double.
double parse_double(const std::string& s);

}  // namespace speclab
