#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "maxent/inference.hpp"
#include "maxent/simulation.hpp"
#include "maxent/solver.hpp"

namespace maxent {

// Serialization of fit, inference and simulation results. Vertex indices are
// written 1-based and every floating-point value carries 12 significant
// digits, so output is stable under diff.

// Rounds to 12 significant digits; the JSON writer then prints the shortest
// representation of the rounded double. Non-finite values become null.
inline nlohmann::json json_number(double x) {
  if (!std::isfinite(x)) return nullptr;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline nlohmann::json json_numbers(std::span<const double> xs) {
  auto out = nlohmann::json::array();
  for (const double x : xs) out.push_back(json_number(x));
  return out;
}

inline nlohmann::json json_indices(std::span<const std::size_t> xs) {
  auto out = nlohmann::json::array();
  for (const auto x : xs) out.push_back(x + 1);
  return out;
}

inline nlohmann::json to_json(const FitResult& fit, const WeightModel& model,
                              std::span<const BoundaryVertex> boundary) {
  nlohmann::json j;
  j["model"] = model.to_string();
  j["n"] = fit.theta_hat.size();
  j["theta_hat"] = json_numbers(fit.theta_hat);
  j["converged"] = fit.converged;
  j["exists"] = to_string(fit.exists);
  j["iterations"] = fit.iterations;
  j["residual_inf_norm"] = json_number(fit.residual_inf_norm);
  j["exists_method"] = "operational";
  auto flagged = nlohmann::json::array();
  for (const auto& b : boundary) {
    flagged.push_back({{"vertex", b.index + 1}, {"side", b.side == BoundarySide::Lower ? "lower" : "upper"}});
  }
  j["boundary_vertices"] = flagged;
  return j;
}

inline nlohmann::json to_json(const RateDiagnostics& diag) {
  nlohmann::json j;
  j["L_n"] = json_number(diag.L_n);
  j["M_n"] = json_number(diag.M_n);
  auto ratios = nlohmann::json::array();
  for (const auto& r : diag.ratios) {
    ratios.push_back({{"name", r.name}, {"value", json_number(r.value)}, {"flagged", r.flagged}});
  }
  j["ratios"] = ratios;
  return j;
}

inline nlohmann::json to_json(const InferenceReport& report, const WeightModel& model) {
  nlohmann::json j;
  j["model"] = model.to_string();
  j["theta_hat"] = json_numbers(report.theta_hat);
  j["v_hat_diag"] = json_numbers(report.v_hat_diag);
  j["se"] = json_numbers(report.se_theta);
  auto pairs = nlohmann::json::array();
  for (const auto& p : report.pairs) {
    pairs.push_back({{"i", p.i + 1},
                     {"j", p.j + 1},
                     {"alpha", json_number(p.alpha)},
                     {"center", json_number(p.interval.center)},
                     {"half_width", json_number(p.interval.half_width)},
                     {"lower", json_number(p.interval.lower())},
                     {"upper", json_number(p.interval.upper())}});
  }
  j["pairs"] = pairs;
  auto tests = nlohmann::json::array();
  for (const auto& t : report.tests) {
    tests.push_back({{"indices", json_indices(t.indices)},
                     {"statistic", json_number(t.result.statistic)},
                     {"df", t.result.df},
                     {"p_value", json_number(t.result.p_value)}});
  }
  j["tests"] = tests;
  j["diagnostics"] = to_json(report.diagnostics);
  return j;
}

inline nlohmann::json to_json(const ExperimentSummary& s) {
  const auto& spec = s.spec;
  nlohmann::json j;
  j["model"] = spec.model.to_string();
  j["n"] = spec.n;
  j["mtilde"] = spec.mtilde.label();
  j["mtilde_value"] = json_number(spec.mtilde.resolve(spec.n));
  j["reps"] = s.reps;
  j["alpha"] = json_number(spec.alpha);
  j["seed"] = spec.seed;
  j["existing"] = s.existing;
  j["boundary_flagged"] = s.boundary_flagged;
  j["diverged"] = s.diverged;
  j["max_iterations"] = s.max_iterations;
  j["nonexistence_pct"] = json_number(s.nonexistence_pct);
  auto pairs = nlohmann::json::array();
  for (const auto& p : s.pairs) {
    pairs.push_back({{"i", p.i + 1},
                     {"j", p.j + 1},
                     {"covered", p.covered},
                     {"evaluated", p.evaluated},
                     {"coverage_pct", json_number(p.coverage_pct)},
                     {"mean_ci_length", json_number(p.mean_ci_length)}});
  }
  j["pairs"] = pairs;
  auto coords = nlohmann::json::array();
  for (const auto& c : s.coordinates) {
    coords.push_back({{"index", c.index + 1},
                      {"ks_distance", json_number(c.ks_distance)},
                      {"z_samples", json_numbers(c.z_samples)}});
  }
  j["coordinates"] = coords;
  j["max_abs_error"] = json_numbers(s.max_abs_error);
  if (s.equality) {
    j["equality_test"] = {{"indices", json_indices(s.equality->indices)},
                          {"rejections", s.equality->rejections},
                          {"evaluated", s.equality->evaluated},
                          {"rejection_pct", json_number(s.equality->rejection_pct)}};
  } else {
    j["equality_test"] = nullptr;
  }
  return j;
}

inline void write_table_header(std::ostream& out) {
  out << "n,mtilde,pair_i,pair_j,coverage_pct,mean_ci_length,nonexistence_pct\n";
}

// One row per tracked pair, laid out like the coverage table.
inline void write_table_rows(std::ostream& out, const ExperimentSummary& s) {
  for (const auto& p : s.pairs) {
    out << s.spec.n << ',' << s.spec.mtilde.label() << ',' << p.i + 1 << ',' << p.j + 1 << ','
        << format_number(p.coverage_pct) << ',' << format_number(p.mean_ci_length) << ','
        << format_number(s.nonexistence_pct) << '\n';
  }
}

inline void write_qq_table(std::ostream& out, std::span<const QQRow> rows) {
  out << "empirical,theoretical\n";
  for (const auto& r : rows) out << format_number(r.empirical) << ',' << format_number(r.theoretical) << '\n';
}

}  // namespace maxent
