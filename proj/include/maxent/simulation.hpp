#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "maxent/graph.hpp"
#include "maxent/inference.hpp"
#include "maxent/random.hpp"
#include "maxent/solver.hpp"
#include "maxent/weight_model.hpp"

namespace maxent {

// Scale of the simulation design. Continuous weights use
// theta_i = M + i M^2 / n, the discrete families theta_i = 0.1 + i M / n
// (i = 1..n), so larger M pushes the pair sums toward the boundary of the
// parameter space.
class MTilde {
 public:
  enum class Rule { Zero, One, LogLogN, SqrtLogN, LogN, SqrtN, N, Value };

  static MTilde of(Rule rule) { return MTilde(rule, 0.0); }
  static MTilde value(double v) { return MTilde(Rule::Value, v); }

  // Named rules "0", "1", "loglogn", "sqrtlogn", "logn", "sqrtn", "n", or any
  // other number.
  static MTilde parse(const std::string& token) {
    if (token == "0") return of(Rule::Zero);
    if (token == "1") return of(Rule::One);
    if (token == "loglogn") return of(Rule::LogLogN);
    if (token == "sqrtlogn") return of(Rule::SqrtLogN);
    if (token == "logn") return of(Rule::LogN);
    if (token == "sqrtn") return of(Rule::SqrtN);
    if (token == "n") return of(Rule::N);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (token.empty() || used != token.size() || !std::isfinite(v)) {
      throw std::invalid_argument("unknown mtilde '" + token + "'");
    }
    return value(v);
  }

  Rule rule() const { return rule_; }

  double resolve(std::size_t n) const {
    const double nn = static_cast<double>(n);
    switch (rule_) {
      case Rule::Zero:
        return 0.0;
      case Rule::One:
        return 1.0;
      case Rule::LogLogN:
        return std::log(std::log(nn));
      case Rule::SqrtLogN:
        return std::sqrt(std::log(nn));
      case Rule::LogN:
        return std::log(nn);
      case Rule::SqrtN:
        return std::sqrt(nn);
      case Rule::N:
        return nn;
      case Rule::Value:
        return value_;
    }
    return 0.0;
  }

  std::string label() const {
    switch (rule_) {
      case Rule::Zero:
        return "0";
      case Rule::One:
        return "1";
      case Rule::LogLogN:
        return "loglogn";
      case Rule::SqrtLogN:
        return "sqrtlogn";
      case Rule::LogN:
        return "logn";
      case Rule::SqrtN:
        return "sqrtn";
      case Rule::N:
        return "n";
      case Rule::Value: {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.12g", value_);
        return buf;
      }
    }
    return {};
  }

 private:
  MTilde(Rule rule, double v) : rule_(rule), value_(v) {}
  Rule rule_;
  double value_;
};

// Vertex indices are 0-based here; files and flags use 1-based indices.
struct ExperimentSpec {
  WeightModel model = WeightModel::continuous();
  std::size_t n = 50;
  MTilde mtilde = MTilde::of(MTilde::Rule::One);
  std::size_t reps = 1000;
  double alpha = 0.05;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<std::size_t> tracked;            // coordinates whose z-scores are kept
  std::vector<std::size_t> equality_indices;   // optional chi-square test, size >= 2
  std::uint64_t seed = 1;
  unsigned threads = 1;
  SolverConfig solver;
  // Replaces the mtilde design when set, e.g. for all-equal null models.
  std::optional<ParameterVector> theta;

  // Table-1 style defaults: pairs (1,n), (n/2, n/2+1), (n-1, n) and
  // coordinates 1, ceil(n/2), n.
  static std::vector<std::pair<std::size_t, std::size_t>> default_pairs(std::size_t n) {
    return {{0, n - 1}, {n / 2 - 1, n / 2}, {n - 2, n - 1}};
  }
  static std::vector<std::size_t> default_tracked(std::size_t n) {
    return {0, (n + 1) / 2 - 1, n - 1};
  }

  void validate() const {
    if (n < 3) throw std::invalid_argument("experiment needs n >= 3");
    if (reps < 1) throw std::invalid_argument("experiment needs reps >= 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must be in (0, 1)");
    for (const auto& [i, j] : pairs) {
      if (i >= n || j >= n || i == j) {
        throw std::invalid_argument("pair (" + std::to_string(i + 1) + "," +
                                    std::to_string(j + 1) + ") is not a pair of distinct vertices in 1.." +
                                    std::to_string(n));
      }
    }
    for (const auto i : tracked) {
      if (i >= n) throw std::invalid_argument("tracked coordinate out of range");
    }
    if (equality_indices.size() == 1) {
      throw std::invalid_argument("equality test needs at least two indices");
    }
    for (const auto i : equality_indices) {
      if (i >= n) throw std::invalid_argument("equality index out of range");
    }
  }
};

/// True parameter vector of the simulation design.
inline ParameterVector parameter_grid(const ExperimentSpec& spec) {
  if (spec.n < 3) throw std::invalid_argument("experiment needs n >= 3");
  if (spec.theta) {
    if (spec.theta->size() != spec.n) {
      throw std::invalid_argument("theta has " + std::to_string(spec.theta->size()) +
                                  " entries, expected n = " + std::to_string(spec.n));
    }
    require_feasible(spec.model, *spec.theta);
    return *spec.theta;
  }
  const double m = spec.mtilde.resolve(spec.n);
  const double nn = static_cast<double>(spec.n);
  ParameterVector theta(spec.n);
  for (std::size_t k = 0; k < spec.n; ++k) {
    const double i = static_cast<double>(k + 1);
    theta[k] = spec.model.family() == Family::Continuous ? m + i * m * m / nn : 0.1 + i * m / nn;
  }
  try {
    require_feasible(spec.model, theta);
  } catch (const DomainError& e) {
    throw DomainError("mtilde = " + spec.mtilde.label() + " is incompatible with " +
                      spec.model.to_string() + ": " + e.what());
  }
  return theta;
}

/// Kolmogorov-Smirnov distance between the empirical CDF of the samples and
/// the standard normal CDF.
inline double ks_statistic(std::vector<double> samples) {
  if (samples.empty()) throw std::invalid_argument("KS statistic needs at least one sample");
  std::sort(samples.begin(), samples.end());
  const double N = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double F = normal_cdf(samples[k]);
    d = std::max({d, F - static_cast<double>(k) / N, static_cast<double>(k + 1) / N - F});
  }
  return d;
}

struct QQRow {
  double empirical;
  double theoretical;
};

/// Sorted samples against normal quantiles at plotting positions (k - 0.5) / N.
inline std::vector<QQRow> qq_export(std::vector<double> samples) {
  if (samples.empty()) throw std::invalid_argument("QQ table needs at least one sample");
  std::sort(samples.begin(), samples.end());
  const double N = static_cast<double>(samples.size());
  std::vector<QQRow> rows(samples.size());
  for (std::size_t k = 0; k < samples.size(); ++k) {
    rows[k] = {samples[k], normal_quantile((static_cast<double>(k) + 0.5) / N)};
  }
  return rows;
}

struct PairSummary {
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t covered = 0;
  std::size_t evaluated = 0;
  double coverage_pct = std::numeric_limits<double>::quiet_NaN();
  double mean_ci_length = std::numeric_limits<double>::quiet_NaN();
};

struct CoordinateSummary {
  std::size_t index = 0;
  std::vector<double> z_samples;  // v_hat_ii^{1/2} (theta_hat_i - theta_i), replication order
  double ks_distance = std::numeric_limits<double>::quiet_NaN();
};

struct EqualitySummary {
  std::vector<std::size_t> indices;
  std::size_t rejections = 0;
  std::size_t evaluated = 0;
  double rejection_pct = std::numeric_limits<double>::quiet_NaN();
};

struct ExperimentSummary {
  ExperimentSpec spec;
  ParameterVector theta;
  std::size_t reps = 0;
  std::size_t existing = 0;
  std::size_t boundary_flagged = 0;  // rejected by identifiability_gauge before fitting
  std::size_t diverged = 0;          // fit returned BoundaryDivergence
  std::size_t max_iterations = 0;    // fit returned MaxIterations
  double nonexistence_pct = 0.0;
  std::vector<PairSummary> pairs;
  std::vector<CoordinateSummary> coordinates;
  std::vector<double> max_abs_error;  // max_i |theta_hat_i - theta_i| per existing replication
  std::optional<EqualitySummary> equality;
};

namespace detail {

struct Replication {
  enum class Outcome { Exists, Flagged, Diverged, MaxIterations } outcome = Outcome::Flagged;
  std::vector<double> z;
  std::vector<char> covered;
  std::vector<double> length;
  double max_abs_error = 0.0;
  bool rejected = false;
};

inline Replication run_replication(const ExperimentSpec& spec, std::span<const double> theta,
                                   std::uint64_t index) {
  Replication rep;
  Rng rng = Rng::substream(spec.seed, index);
  const auto graph = sample_graph(spec.model, theta, rng);
  const auto d = degrees(graph);
  if (!identifiability_gauge(spec.model, d).empty()) {
    rep.outcome = Replication::Outcome::Flagged;
    return rep;
  }
  const auto result = fit(spec.model, d, spec.solver);
  if (result.exists == Existence::BoundaryDivergence) {
    rep.outcome = Replication::Outcome::Diverged;
    return rep;
  }
  if (result.exists == Existence::MaxIterations) {
    rep.outcome = Replication::Outcome::MaxIterations;
    return rep;
  }
  rep.outcome = Replication::Outcome::Exists;
  const auto& theta_hat = result.theta_hat;
  const auto v_hat = estimated_fisher_diag(spec.model, theta_hat);
  for (const auto i : spec.tracked) {
    rep.z.push_back(std::sqrt(v_hat[i]) * (theta_hat[i] - theta[i]));
  }
  for (const auto& [i, j] : spec.pairs) {
    const auto ci = ci_difference(i, j, theta_hat, v_hat, spec.alpha);
    rep.covered.push_back(ci.contains(theta[i] - theta[j]) ? 1 : 0);
    rep.length.push_back(ci.length());
  }
  for (std::size_t i = 0; i < theta.size(); ++i) {
    rep.max_abs_error = std::max(rep.max_abs_error, std::abs(theta_hat[i] - theta[i]));
  }
  if (spec.equality_indices.size() >= 2) {
    rep.rejected = equality_test(spec.equality_indices, theta_hat, v_hat).p_value < spec.alpha;
  }
  return rep;
}

}  // namespace detail

/// Monte Carlo study: sample, fit, and record interval coverage, z-scores and
/// existence for `spec.reps` replications. Replication k always draws from
/// Rng::substream(seed, k) and results are aggregated in replication order, so
/// the summary does not depend on `spec.threads`.
inline ExperimentSummary run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  ExperimentSummary summary;
  summary.spec = spec;
  summary.theta = parameter_grid(spec);
  summary.reps = spec.reps;

  std::vector<detail::Replication> reps(spec.reps);
  const unsigned workers = std::max(1u, std::min<unsigned>(spec.threads, static_cast<unsigned>(spec.reps)));
  if (workers == 1) {
    for (std::size_t k = 0; k < spec.reps; ++k) {
      reps[k] = detail::run_replication(spec, summary.theta, k);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < spec.reps; k = next++) {
          reps[k] = detail::run_replication(spec, summary.theta, k);
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  for (const auto& [i, j] : spec.pairs) summary.pairs.push_back({i, j});
  for (const auto i : spec.tracked) summary.coordinates.push_back({i, {}});
  if (spec.equality_indices.size() >= 2) summary.equality = EqualitySummary{spec.equality_indices};
  std::vector<double> length_sum(spec.pairs.size(), 0.0);

  using Outcome = detail::Replication::Outcome;
  for (const auto& rep : reps) {
    switch (rep.outcome) {
      case Outcome::Flagged:
        ++summary.boundary_flagged;
        continue;
      case Outcome::Diverged:
        ++summary.diverged;
        continue;
      case Outcome::MaxIterations:
        ++summary.max_iterations;
        continue;
      case Outcome::Exists:
        break;
    }
    ++summary.existing;
    for (std::size_t c = 0; c < rep.z.size(); ++c) summary.coordinates[c].z_samples.push_back(rep.z[c]);
    for (std::size_t p = 0; p < rep.covered.size(); ++p) {
      summary.pairs[p].covered += rep.covered[p];
      ++summary.pairs[p].evaluated;
      length_sum[p] += rep.length[p];
    }
    summary.max_abs_error.push_back(rep.max_abs_error);
    if (summary.equality) {
      ++summary.equality->evaluated;
      if (rep.rejected) ++summary.equality->rejections;
    }
  }

  summary.nonexistence_pct = 100.0 * static_cast<double>(summary.reps - summary.existing) /
                             static_cast<double>(summary.reps);
  for (std::size_t p = 0; p < summary.pairs.size(); ++p) {
    auto& ps = summary.pairs[p];
    if (ps.evaluated > 0) {
      ps.coverage_pct = 100.0 * static_cast<double>(ps.covered) / static_cast<double>(ps.evaluated);
      ps.mean_ci_length = length_sum[p] / static_cast<double>(ps.evaluated);
    }
  }
  for (auto& c : summary.coordinates) {
    if (!c.z_samples.empty()) c.ks_distance = ks_statistic(c.z_samples);
  }
  if (summary.equality && summary.equality->evaluated > 0) {
    summary.equality->rejection_pct = 100.0 * static_cast<double>(summary.equality->rejections) /
                                      static_cast<double>(summary.equality->evaluated);
  }
  return summary;
}

}  // namespace maxent
