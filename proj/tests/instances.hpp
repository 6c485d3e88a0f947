#pragma once

// Random problem instances shared by the unit and acceptance tests.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "maxent/maxent.hpp"
#include "oracles.hpp"

namespace instances {

struct Family {
  std::string name;
  maxent::WeightModel model;
  oracle::Kind kind;
  int q;
  double theta_lo;
  double theta_hi;
};

inline std::vector<Family> families() {
  return {
      {"finite:3", maxent::WeightModel::finite_discrete(3), oracle::Kind::Finite, 3, -1.0, 1.0},
      {"continuous", maxent::WeightModel::continuous(), oracle::Kind::Exponential, 0, 0.2, 1.5},
      {"geometric", maxent::WeightModel::infinite_discrete(), oracle::Kind::Geometric, 0, 0.1, 1.0},
  };
}

inline std::vector<double> random_theta(const Family& f, std::size_t n, maxent::Rng& rng) {
  std::vector<double> theta(n);
  for (auto& t : theta) t = f.theta_lo + (f.theta_hi - f.theta_lo) * rng.uniform();
  return theta;
}

struct Observed {
  std::vector<double> theta;  // parameter that generated the graph
  std::vector<double> d;
  maxent::FitResult fit;
  int attempts = 0;
};

// Samples graphs until the coordinate-wise fit reports an existing MLE.
inline Observed sample_fittable(const Family& f, std::size_t n, maxent::Rng& rng,
                                int max_attempts = 1000) {
  Observed out;
  for (out.attempts = 1; out.attempts <= max_attempts; ++out.attempts) {
    out.theta = random_theta(f, n, rng);
    out.d = maxent::degrees(maxent::sample_graph(f.model, out.theta, rng));
    if (!maxent::identifiability_gauge(f.model, out.d).empty()) continue;
    out.fit = maxent::fit(f.model, out.d);
    if (out.fit.exists == maxent::Existence::Exists) return out;
  }
  throw std::runtime_error("no fittable graph for " + f.name);
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace instances
