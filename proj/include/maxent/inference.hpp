#pragma once

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "maxent/graph.hpp"
#include "maxent/weight_model.hpp"

namespace maxent {

/// v_ii evaluated at theta_hat; identical to the diagonal of fisher_matrix().
inline std::vector<double> estimated_fisher_diag(const WeightModel& model,
                                                 std::span<const double> theta_hat) {
  require_feasible(model, theta_hat);
  const std::size_t n = theta_hat.size();
  std::vector<double> diag(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) sum += variance(model, theta_hat[i] + theta_hat[j]);
    }
    diag[i] = sum;
  }
  return diag;
}

inline std::vector<double> standard_errors(std::span<const double> v_hat_diag) {
  std::vector<double> se(v_hat_diag.size());
  for (std::size_t i = 0; i < se.size(); ++i) se[i] = 1.0 / std::sqrt(v_hat_diag[i]);
  return se;
}

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// Z_p, the 100p percentile of the standard normal.
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal quantile needs 0 < p < 1");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

struct Interval {
  double center = 0.0;
  double half_width = 0.0;

  double lower() const { return center - half_width; }
  double upper() const { return center + half_width; }
  double length() const { return 2.0 * half_width; }
  bool contains(double x) const { return lower() <= x && x <= upper(); }
};

/// Wald interval theta_i - theta_j +- Z_{1 - alpha/2} (1/v_ii + 1/v_jj)^{1/2}
/// (0-based vertex indices).
inline Interval ci_difference(std::size_t i, std::size_t j, std::span<const double> theta_hat,
                              std::span<const double> v_hat_diag, double alpha) {
  if (i == j) throw std::invalid_argument("confidence interval needs two distinct vertices");
  if (i >= theta_hat.size() || j >= theta_hat.size() || theta_hat.size() != v_hat_diag.size()) {
    throw std::out_of_range("vertex index out of range");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must be in (0, 1)");
  const double z = normal_quantile(1.0 - alpha / 2.0);
  return {theta_hat[i] - theta_hat[j], z * std::sqrt(1.0 / v_hat_diag[i] + 1.0 / v_hat_diag[j])};
}

struct EqualityTestResult {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
};

/// Wald chi-square test of theta_{i_1} = ... = theta_{i_{r+1}} built from the
/// consecutive differences c_k = theta_{i_k} - theta_{i_{k+1}}, whose
/// asymptotic covariance is tridiagonal with 1/v_{i_k} + 1/v_{i_{k+1}} on the
/// diagonal and -1/v at shared indices. Returns c^T Sigma^-1 c with r degrees
/// of freedom.
inline EqualityTestResult equality_test(std::span<const std::size_t> indices,
                                        std::span<const double> theta_hat,
                                        std::span<const double> v_hat_diag) {
  if (indices.size() < 2) throw std::invalid_argument("equality test needs at least two vertices");
  if (theta_hat.size() != v_hat_diag.size()) {
    throw std::invalid_argument("theta_hat and v_hat_diag differ in length");
  }
  std::set<std::size_t> distinct;
  for (const auto idx : indices) {
    if (idx >= theta_hat.size()) throw std::out_of_range("vertex index out of range");
    if (!distinct.insert(idx).second) {
      throw std::invalid_argument("equality test indices must be distinct");
    }
  }
  const auto r = static_cast<Eigen::Index>(indices.size() - 1);
  Eigen::VectorXd c(r);
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Zero(r, r);
  for (Eigen::Index k = 0; k < r; ++k) {
    const auto a = indices[static_cast<std::size_t>(k)];
    const auto b = indices[static_cast<std::size_t>(k) + 1];
    c(k) = theta_hat[a] - theta_hat[b];
    sigma(k, k) = 1.0 / v_hat_diag[a] + 1.0 / v_hat_diag[b];
    if (k + 1 < r) {
      sigma(k, k + 1) = -1.0 / v_hat_diag[b];
      sigma(k + 1, k) = -1.0 / v_hat_diag[b];
    }
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("equality test covariance is not positive definite");
  }
  EqualityTestResult out;
  out.statistic = c.dot(llt.solve(c));
  out.df = static_cast<int>(r);
  out.p_value = boost::math::cdf(
      boost::math::complement(boost::math::chi_squared_distribution<double>(out.df), out.statistic));
  return out;
}

struct Diagnostic {
  std::string name;
  double value = 0.0;
  bool flagged = false;  // value > 1
};

struct RateDiagnostics {
  double L_n = 0.0;
  double M_n = 0.0;
  std::vector<Diagnostic> ratios;
};

// Finite-n values of the growth conditions behind the asymptotic normality
// results, each divided by its allowed rate so that values above 1 flag a
// regime where the normal approximation is not backed by the theory. The
// conditions are asymptotic; these numbers are diagnostics only.
//
//   continuous: (M_n/L_n) / (n^{1/16} / (log n)^{1/8}),
//               Lyapunov bound 6 (M_n/L_n) / (n-1)^{1/2}
//   geometric:  (e^{17 M_n} / L_n^3) / (n^{1/2} / log n),
//               Lyapunov bound [7 + 6/(e^{L_n}-1)] (e^{M_n}-1) / (n^{1/2} e^{M_n/2})
//   finite:     max_i |theta_i| (the theory needs it bounded; not flagged)
//
// Every family also reports max_i sum_j E[a_ij^3] / v_ii^{3/2}.
inline RateDiagnostics rate_condition_check(const WeightModel& model,
                                            std::span<const double> theta) {
  require_feasible(model, theta);
  const auto range = pair_sum_range(theta);
  const double n = static_cast<double>(theta.size());
  RateDiagnostics out;
  out.L_n = range.min;
  out.M_n = range.max;
  const double L = range.min;
  const double M = range.max;
  auto add = [&out](std::string name, double value, bool can_flag = true) {
    out.ratios.push_back({std::move(name), value, can_flag && !(value <= 1.0)});
  };
  switch (model.family()) {
    case Family::Continuous:
      add("normality_rate", (M / L) / (std::pow(n, 1.0 / 16.0) / std::pow(std::log(n), 1.0 / 8.0)));
      add("lyapunov_bound", 6.0 * (M / L) / std::sqrt(n - 1.0));
      break;
    case Family::InfiniteDiscrete:
      add("normality_rate", std::exp(17.0 * M) / (L * L * L) / (std::sqrt(n) / std::log(n)));
      add("lyapunov_bound",
          (7.0 + 6.0 / std::expm1(L)) * std::expm1(M) / (std::sqrt(n) * std::exp(M / 2.0)));
      break;
    case Family::FiniteDiscrete: {
      double largest = 0.0;
      for (const double t : theta) largest = std::max(largest, std::abs(t));
      add("max_abs_theta", largest, false);
      break;
    }
  }
  double lyapunov = 0.0;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    double third = 0.0;
    double var = 0.0;
    for (std::size_t j = 0; j < theta.size(); ++j) {
      if (j == i) continue;
      third += third_moment(model, theta[i] + theta[j]);
      var += variance(model, theta[i] + theta[j]);
    }
    lyapunov = std::max(lyapunov, third / std::pow(var, 1.5));
  }
  add("lyapunov_third_moment", lyapunov);
  return out;
}

struct PairInterval {
  std::size_t i = 0;  // 0-based
  std::size_t j = 0;
  double alpha = 0.05;
  Interval interval;
};

struct EqualityTestRecord {
  std::vector<std::size_t> indices;  // 0-based
  EqualityTestResult result;
};

struct InferenceReport {
  std::vector<double> theta_hat;
  std::vector<double> v_hat_diag;
  std::vector<double> se_theta;
  std::vector<PairInterval> pairs;
  std::vector<EqualityTestRecord> tests;
  RateDiagnostics diagnostics;
};

// Plug-in Fisher diagonal, standard errors and rate diagnostics at theta_hat;
// intervals and tests are appended with add_interval() and add_test().
inline InferenceReport make_inference_report(const WeightModel& model,
                                             std::vector<double> theta_hat) {
  InferenceReport report;
  report.v_hat_diag = estimated_fisher_diag(model, theta_hat);
  report.se_theta = standard_errors(report.v_hat_diag);
  report.diagnostics = rate_condition_check(model, theta_hat);
  report.theta_hat = std::move(theta_hat);
  return report;
}

inline void add_interval(InferenceReport& report, std::size_t i, std::size_t j, double alpha) {
  report.pairs.push_back({i, j, alpha, ci_difference(i, j, report.theta_hat, report.v_hat_diag, alpha)});
}

inline void add_test(InferenceReport& report, std::vector<std::size_t> indices) {
  const auto result = equality_test(indices, report.theta_hat, report.v_hat_diag);
  report.tests.push_back({std::move(indices), result});
}

}  // namespace maxent
