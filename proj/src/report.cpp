#include "hypadams/report.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace hypadams::report {

namespace {

Json finite_or_null(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

Json pairs(const std::vector<std::pair<std::string, double>>& kv) {
  Json j = Json::object();
  for (const auto& [k, v] : kv) j[k] = finite_or_null(v);
  return j;
}

} // namespace

std::string number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_csv(std::ostream& out, std::span<const std::string> header, const std::vector<std::vector<double>>& rows) {
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << number(row[i]);
    out << '\n';
  }
}

Json to_json(const TheoremReport& r) {
  Json j;
  j["theorem"] = r.theorem;
  j["family"] = r.family;
  j["beta"] = r.beta;
  Json rows = Json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"param", row.param}, {"constraint", finite_or_null(row.constraint)}, {"value", finite_or_null(row.value)}});
  j["rows"] = std::move(rows);
  j["verdict"] = to_string(r.verdict);
  j["fitted_constants"] = pairs(r.fitted_constants);
  j["chain_passed"] = r.chain_passed();
  j["failed_conditions"] = r.failed_conditions;
  return j;
}

Json to_json(const BoundReport& r) {
  Json j;
  j["name"] = r.name;
  j["variable"] = r.variable;
  j["points"] = r.grid.size();
  j["passed"] = r.passed();
  j["min_margin"] = r.grid.empty() ? Json(nullptr) : finite_or_null(r.min_margin());
  j["fitted_constant"] = r.fitted_constant ? finite_or_null(*r.fitted_constant) : Json(nullptr);
  j["extras"] = pairs(r.extras);
  j["failed_conditions"] = r.failed_conditions;
  return j;
}

Json to_json(const AdamsReport& r) {
  Json j;
  j["profile"] = r.label;
  j["psi_norm2"] = r.psi_norm2;
  j["c_fitted"] = finite_or_null(r.c_fitted);
  j["c_refined"] = finite_or_null(r.c_refined);
  j["inf_functional"] = finite_or_null(r.inf_functional);
  j["exp_integral"] = finite_or_null(r.exp_integral);
  j["exp_integral_simpson"] = finite_or_null(r.exp_integral_simpson);
  j["exp_tail"] = finite_or_null(r.exp_tail);
  j["level_slope"] = r.slope;
  j["level_intercept"] = r.intercept;
  j["level_r2"] = r.r2;
  j["b1"] = r.b1;
  j["b2"] = r.b2;
  j["identity_error"] = r.identity_error;
  j["phi_upper_margin"] = r.phi_upper_margin;
  j["phi_log_constant"] = r.phi_log_constant;
  j["phi_log_constant_refined"] = r.phi_log_constant_refined;
  Json levels = Json::array();
  for (std::size_t i = 0; i < r.lambdas.size(); ++i) levels.push_back({{"lambda", r.lambdas[i]}, {"measure", r.level_measure[i]}});
  j["level_sets"] = std::move(levels);
  j["passed"] = r.passed();
  j["failed_conditions"] = r.failed_conditions;
  return j;
}

Json to_json(const PlancherelCheck& c) {
  return {{"t", c.t},
          {"direct_norm2", c.direct_norm2},
          {"spectral_integral", c.spectral_integral},
          {"fitted_constant", c.fitted_constant},
          {"constant_error", c.constant_error},
          {"literature_ratio", c.literature_ratio},
          {"transform_error", c.transform_error},
          {"round_trip_error", c.round_trip_error}};
}

Json to_json(const ConformalIdentityCheck& c) {
  return {{"weighted_gradient", c.weighted_gradient}, {"gradient", c.gradient},
          {"weighted_mass", c.weighted_mass},         {"substitution_error", c.substitution_error},
          {"hyperbolic_gap", c.hyperbolic_gap},       {"chain_error", c.chain_error},
          {"improved_hardy", c.improved_hardy},       {"bilaplacian_gap", c.bilaplacian_gap},
          {"euclidean_mass", c.euclidean_mass},       {"spectral_lower", c.spectral_lower},
          {"passed", c.passed()}};
}

Json to_json(const PotentialRepresentationCheck& c) {
  return {{"constraint", c.constraint}, {"mass", c.mass}, {"relative_error", c.relative_error()},
          {"transform_error", c.transform_error}, {"lambda_cut", c.lambda_cut}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

} // namespace hypadams::report
