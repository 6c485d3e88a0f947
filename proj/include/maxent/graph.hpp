#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "maxent/random.hpp"
#include "maxent/weight_model.hpp"

namespace maxent {

class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// theta in R^n, one potential per vertex (0-based in memory).
using ParameterVector = std::vector<double>;
// d_i = sum_{j != i} a_ij.
using DegreeSequence = std::vector<double>;

// Dense symmetric weight matrix with a zero diagonal.
class WeightedGraph {
 public:
  explicit WeightedGraph(std::size_t n) : n_(n), weights_(n * n, 0.0) {}

  // Takes a row-major n x n array; rejects asymmetry, a nonzero diagonal,
  // negative and non-finite entries.
  static WeightedGraph from_dense(std::size_t n, std::vector<double> weights) {
    if (weights.size() != n * n) {
      throw ValidationError("weight array has " + std::to_string(weights.size()) +
                            " entries, expected " + std::to_string(n * n));
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (weights[i * n + i] != 0.0) {
        throw ValidationError("nonzero diagonal entry at vertex " + std::to_string(i + 1));
      }
      for (std::size_t j = i + 1; j < n; ++j) {
        const double w = weights[i * n + j];
        if (w != weights[j * n + i]) {
          throw ValidationError("asymmetric weights at pair (" + std::to_string(i + 1) + "," +
                                std::to_string(j + 1) + ")");
        }
        if (!std::isfinite(w) || w < 0.0) {
          throw ValidationError("weight at pair (" + std::to_string(i + 1) + "," +
                                std::to_string(j + 1) + ") must be finite and >= 0");
        }
      }
    }
    WeightedGraph g(n);
    g.weights_ = std::move(weights);
    return g;
  }

  std::size_t size() const { return n_; }

  double operator()(std::size_t i, std::size_t j) const { return weights_[i * n_ + j]; }

  void set_edge(std::size_t i, std::size_t j, double w) {
    if (i == j) throw ValidationError("self-loop at vertex " + std::to_string(i + 1));
    if (!std::isfinite(w) || w < 0.0) {
      throw ValidationError("edge weight must be finite and >= 0");
    }
    weights_[i * n_ + j] = w;
    weights_[j * n_ + i] = w;
  }

  std::span<const double> row(std::size_t i) const {
    return {weights_.data() + i * n_, n_};
  }

  // Checks the entries lie in the model's support.
  void validate_for(const WeightModel& model) const {
    const double top = model.max_weight();
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = i + 1; j < n_; ++j) {
        const double w = (*this)(i, j);
        const bool integral = std::floor(w) == w;
        if ((model.integer_valued() && !integral) || w > top) {
          std::ostringstream msg;
          msg << "weight " << w << " at pair (" << i + 1 << "," << j + 1
              << ") is outside the support of " << model.to_string();
          throw ValidationError(msg.str());
        }
      }
    }
  }

  bool operator==(const WeightedGraph&) const = default;

 private:
  std::size_t n_;
  std::vector<double> weights_;
};

inline DegreeSequence degrees(const WeightedGraph& g) {
  const std::size_t n = g.size();
  DegreeSequence d(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) sum += g(i, j);
    }
    d[i] = sum;
  }
  return d;
}

// Smallest and largest pair sum theta_i + theta_j over i != j (L_n, M_n).
struct PairSumRange {
  double min;
  double max;
};

inline PairSumRange pair_sum_range(std::span<const double> theta) {
  if (theta.size() < 2) throw std::invalid_argument("pair sums need at least two vertices");
  // The extreme sums pair the two smallest (largest) entries.
  std::vector<double> sorted(theta.begin(), theta.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  return {sorted[0] + sorted[1], sorted[n - 1] + sorted[n - 2]};
}

// Throws DomainError naming the first pair (1-based) whose sum is infeasible.
inline void require_feasible(const WeightModel& model, std::span<const double> theta) {
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (!std::isfinite(theta[i])) {
      throw DomainError("theta_" + std::to_string(i + 1) + " is not finite");
    }
  }
  if (!model.requires_positive_pair_sums()) return;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    for (std::size_t j = i + 1; j < theta.size(); ++j) {
      if (!(theta[i] + theta[j] > 0.0)) {
        std::ostringstream msg;
        msg << model.to_string() << ": pair (" << i + 1 << "," << j + 1
            << ") has theta_i + theta_j = " << theta[i] + theta[j] << ", must be > 0";
        throw DomainError(msg.str());
      }
    }
  }
}

// Draws every upper-triangle edge independently, row-major, so that a seed
// reproduces the same graph on every platform.
inline WeightedGraph sample_graph(const WeightModel& model, std::span<const double> theta,
                                  Rng& rng) {
  require_feasible(model, theta);
  const std::size_t n = theta.size();
  WeightedGraph g(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      g.set_edge(i, j, sample_edge(model, theta[i] + theta[j], rng));
    }
  }
  return g;
}

}  // namespace maxent
