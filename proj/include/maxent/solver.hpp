#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "maxent/graph.hpp"
#include "maxent/weight_model.hpp"

namespace maxent {

enum class InitMode {
  Symmetric,  // every theta_i solves the regular-graph equation at the mean degree
  PerVertex,  // theta_i solves the regular-graph equation at d_i
};

struct SolverConfig {
  double tolerance = 1e-10;         // residual infinity norm, degree units
  double scalar_tolerance = 1e-10;  // per-coordinate residual
  int max_sweeps = 500;
  // Largest |theta_i| accepted before the fit is declared divergent. For the
  // continuous family, whose solutions scale as 1/degree, the cap is measured
  // in units of the symmetric starting value (n - 1) / (2 mean(d)).
  double parameter_cap = 50.0;
  double feasibility_floor = 1e-12;  // smallest admissible pair sum (continuous, geometric)
  InitMode init_mode = InitMode::Symmetric;

  // Reads `key = value` lines; blank lines and `#` comments are ignored.
  static SolverConfig from_key_value(std::istream& in);
};

enum class Existence { Exists, BoundaryDivergence, MaxIterations };

inline std::string to_string(Existence e) {
  switch (e) {
    case Existence::Exists:
      return "Exists";
    case Existence::BoundaryDivergence:
      return "BoundaryDivergence";
    case Existence::MaxIterations:
      return "MaxIterations";
  }
  return {};
}

struct FitResult {
  ParameterVector theta_hat;
  bool converged = false;
  Existence exists = Existence::MaxIterations;
  int iterations = 0;  // completed sweeps
  double residual_inf_norm = std::numeric_limits<double>::infinity();
};

namespace detail {

struct MeanVar {
  double mean;
  double variance;
};

// mean() and variance() sharing one transcendental evaluation. Callers are
// responsible for feasibility of t.
inline MeanVar mean_and_variance(const WeightModel& model, double t) {
  switch (model.family()) {
    case Family::FiniteDiscrete: {
      const auto m = finite_moments(*model.q(), t);
      return {m.mean, m.variance};
    }
    case Family::Continuous: {
      const double mu = 1.0 / t;
      return {mu, mu * mu};
    }
    case Family::InfiniteDiscrete: {
      const double mu = 1.0 / std::expm1(t);
      return {mu, mu * (1.0 + mu)};
    }
  }
  return {0.0, 0.0};
}

inline double trim_value(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("trailing characters in '" + s + "'");
  return v;
}

}  // namespace detail

inline SolverConfig SolverConfig::from_key_value(std::istream& in) {
  SolverConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return std::string();
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "tolerance") {
        cfg.tolerance = detail::trim_value(value);
      } else if (key == "scalar_tolerance") {
        cfg.scalar_tolerance = detail::trim_value(value);
      } else if (key == "max_sweeps") {
        cfg.max_sweeps = static_cast<int>(detail::trim_value(value));
      } else if (key == "parameter_cap") {
        cfg.parameter_cap = detail::trim_value(value);
      } else if (key == "feasibility_floor") {
        cfg.feasibility_floor = detail::trim_value(value);
      } else if (key == "init_mode") {
        if (value == "symmetric") {
          cfg.init_mode = InitMode::Symmetric;
        } else if (value == "per_vertex") {
          cfg.init_mode = InitMode::PerVertex;
        } else {
          throw std::invalid_argument("init_mode must be symmetric or per_vertex");
        }
      } else {
        throw std::invalid_argument("unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!(cfg.tolerance > 0) || !(cfg.scalar_tolerance > 0) || cfg.max_sweeps < 1 ||
      !(cfg.parameter_cap > 0) || !(cfg.feasibility_floor >= 0)) {
    throw std::invalid_argument("solver config values out of range");
  }
  return cfg;
}

/// Expected degree sequence: entry i is sum_{j != i} mean(theta_i + theta_j).
inline DegreeSequence expected_degrees(const WeightModel& model, std::span<const double> theta) {
  require_feasible(model, theta);
  const std::size_t n = theta.size();
  DegreeSequence out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double mu = detail::mean_and_variance(model, theta[i] + theta[j]).mean;
      out[i] += mu;
      out[j] += mu;
    }
  }
  return out;
}

inline double residual_inf_norm(const WeightModel& model, std::span<const double> theta,
                                std::span<const double> d) {
  const auto expected = expected_degrees(model, theta);
  double worst = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) worst = std::max(worst, std::abs(d[i] - expected[i]));
  return worst;
}

enum class BoundarySide { Lower, Upper };

struct BoundaryVertex {
  std::size_t index;  // 0-based
  BoundarySide side;
};

// Vertices whose degree sits on the edge of the attainable range: d_i = 0 for
// every family, and d_i = (q - 1)(n - 1) for the finite discrete family. Any
// such vertex drives its estimate to +-infinity, so an empty report is
// necessary (though not sufficient) for the MLE to exist.
inline std::vector<BoundaryVertex> identifiability_gauge(const WeightModel& model,
                                                         std::span<const double> d) {
  std::vector<BoundaryVertex> report;
  const double top = model.max_weight() * static_cast<double>(d.size() - 1);
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d[i] <= 0.0) {
      report.push_back({i, BoundarySide::Lower});
    } else if (std::isfinite(top) && d[i] >= top) {
      report.push_back({i, BoundarySide::Upper});
    }
  }
  return report;
}

namespace detail {

// Solves sum_{j != i} mean(x + theta_j) = d_i for x by Newton's method inside
// a shrinking bracket, falling back to bisection (or bracket expansion) when
// the Newton step leaves it. h(x) = sign * (sum mean - d_i) is increasing with
// derivative sum variance. Returns false when x runs past `cap` or the root
// would need a pair sum below the feasibility floor.
inline bool solve_coordinate(const WeightModel& model, std::span<const double> theta,
                             std::size_t i, double d_i, const SolverConfig& cfg, double cap,
                             double& x) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  const double sign = model.mean_slope_sign();
  const std::size_t n = theta.size();

  double lo = -kInf;
  double hi = kInf;
  bool lo_evaluated = false;
  if (model.requires_positive_pair_sums()) {
    double min_other = kInf;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) min_other = std::min(min_other, theta[j]);
    }
    // h -> -infinity as x approaches the boundary from above.
    lo = cfg.feasibility_floor - min_other;
    if (!(x > lo)) x = lo + std::max(1e-3, 1e-3 * std::abs(lo));
  }

  for (int iter = 0; iter < 400; ++iter) {
    if (!(std::abs(x) <= cap)) return false;
    double mu_sum = 0.0;
    double var_sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const auto mv = mean_and_variance(model, x + theta[j]);
      mu_sum += mv.mean;
      var_sum += mv.variance;
    }
    const double g = mu_sum - d_i;
    const double tol = std::max(cfg.scalar_tolerance, 8.0 * kEps * (mu_sum + d_i));
    if (std::abs(g) <= tol) return true;
    const double h = sign * g;
    if (h < 0.0) {
      lo = x;
      lo_evaluated = true;
    } else {
      hi = x;
    }
    if (hi - lo <= 4.0 * kEps * std::max(1.0, std::abs(x))) {
      // Bracket at machine resolution; only trust it if both ends were seen.
      return lo_evaluated;
    }
    double next = x - h / var_sum;
    if (!(next > lo && next < hi) || !std::isfinite(next)) {
      if (std::isfinite(lo) && std::isfinite(hi)) {
        next = 0.5 * (lo + hi);
      } else if (std::isfinite(lo)) {
        next = x + std::max(1.0, std::abs(x));
      } else {
        next = x - std::max(1.0, std::abs(x));
      }
    }
    x = next;
  }
  // Out of iterations with a two-sided bracket: keep x and let the next sweep
  // continue from it.
  return lo_evaluated && std::isfinite(hi);
}

// theta solving (n - 1) mean(2 theta) = degree, i.e. the exact MLE of a
// regular graph with that degree.
inline double symmetric_start(const WeightModel& model, std::size_t n, double degree, double cap) {
  const double per_edge = degree / static_cast<double>(n - 1);
  constexpr double kTiny = 1e-12;
  switch (model.family()) {
    case Family::Continuous:
      return 1.0 / (2.0 * std::max(per_edge, kTiny));
    case Family::InfiniteDiscrete:
      return 0.5 * std::log1p(1.0 / std::max(per_edge, kTiny));
    case Family::FiniteDiscrete: {
      const double top = model.max_weight();
      if (per_edge <= 0.0) return -cap / 2;
      if (per_edge >= top) return cap / 2;
      double lo = -cap / 2;
      double hi = cap / 2;
      for (int k = 0; k < 80; ++k) {
        const double mid = 0.5 * (lo + hi);
        if (finite_moments(*model.q(), 2.0 * mid).mean < per_edge) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      return 0.5 * (lo + hi);
    }
  }
  return 0.0;
}

}  // namespace detail

/// Solves the moment equations d_i = sum_{j != i} mean(theta_i + theta_j) by
/// cyclic coordinate-wise root finding (one safeguarded Newton solve per
/// vertex per sweep, always using the latest values of the other
/// coordinates).
inline FitResult fit(const WeightModel& model, std::span<const double> d,
                     const SolverConfig& config = {}) {
  const std::size_t n = d.size();
  if (n < 3) throw ValidationError("fitting needs n >= 3 vertices, got " + std::to_string(n));
  const double top = model.max_weight() * static_cast<double>(n - 1);
  double total = 0.0;
  double largest = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(d[i]) || d[i] < 0.0) {
      throw DomainError("degree d_" + std::to_string(i + 1) + " must be finite and >= 0");
    }
    if (d[i] > top) {
      throw DomainError("degree d_" + std::to_string(i + 1) + " exceeds (q-1)(n-1) for " +
                        model.to_string());
    }
    total += d[i];
    largest = std::max(largest, d[i]);
  }
  const double mean_degree = total / static_cast<double>(n);
  // The residual cannot drop below the rounding error of an n-term sum.
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  const double tolerance =
      std::max(config.tolerance, 4.0 * static_cast<double>(n) * kEps * largest);
  // Coordinate solves must land well inside the global target or sweeps stall.
  SolverConfig inner = config;
  inner.scalar_tolerance = std::min(config.scalar_tolerance, 0.1 * tolerance);

  double cap = config.parameter_cap;
  if (model.family() == Family::Continuous) {
    cap *= detail::symmetric_start(model, n, mean_degree, cap);
  }

  FitResult result;
  result.theta_hat.assign(n, 0.0);
  const double common = detail::symmetric_start(model, n, mean_degree, config.parameter_cap);
  for (std::size_t i = 0; i < n; ++i) {
    result.theta_hat[i] = config.init_mode == InitMode::Symmetric
                              ? common
                              : detail::symmetric_start(model, n, d[i], config.parameter_cap);
  }

  auto& theta = result.theta_hat;
  // A boundary degree can be matched to any absolute tolerance at a large but
  // finite theta_i, so sweeping would report a spurious fit.
  if (!identifiability_gauge(model, d).empty()) {
    result.exists = Existence::BoundaryDivergence;
    result.residual_inf_norm = residual_inf_norm(model, theta, d);
    return result;
  }
  for (int sweep = 1; sweep <= config.max_sweeps; ++sweep) {
    result.iterations = sweep;
    for (std::size_t i = 0; i < n; ++i) {
      double x = theta[i];
      const bool ok = detail::solve_coordinate(model, theta, i, d[i], inner, cap, x);
      theta[i] = x;
      if (!ok) {
        result.exists = Existence::BoundaryDivergence;
        result.converged = false;
        try {
          result.residual_inf_norm = residual_inf_norm(model, theta, d);
        } catch (const DomainError&) {
          result.residual_inf_norm = std::numeric_limits<double>::infinity();
        }
        return result;
      }
    }
    result.residual_inf_norm = residual_inf_norm(model, theta, d);
    if (result.residual_inf_norm <= tolerance) {
      result.converged = true;
      result.exists = Existence::Exists;
      return result;
    }
  }
  result.exists = Existence::MaxIterations;
  result.converged = false;
  return result;
}

}  // namespace maxent
