#include "speclab/report.hpp"

#include <charconv>
#include <system_error>

#include <json.hpp>

#include "speclab/errors.hpp"

namespace speclab {

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw structural_error("parse_double: malformed number '" + s + "'");
  return v;
}

std::string report_to_json(const InequalityReport& report, const std::string& tool_version) {
  nlohmann::json j;
  j["name"] = report.name;
  j["lhs"] = report.lhs;
  j["rhs"] = report.rhs;
  j["ratio"] = report.ratio;
  if (report.fitted_constant)
    j["fitted_constant"] = *report.fitted_constant;
  else
    j["fitted_constant"] = nullptr;
  if (report.fitted_exponent)
    j["fitted_exponent"] = *report.fitted_exponent;
  else
    j["fitted_exponent"] = nullptr;
  j["pass"] = report.pass;
  j["seed"] = report.seed;
  j["sizes"] = report.sizes;
  j["tolerances"] = report.tolerances;
  j["metadata"] = report.metadata;
  if (!tool_version.empty()) j["tool_version"] = tool_version;
  return j.dump(2);
}

}  // namespace speclab
