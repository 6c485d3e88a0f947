#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "maxent/random.hpp"

namespace maxent {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class Family { FiniteDiscrete, Continuous, InfiniteDiscrete };

// Edge-weight family of a maximum entropy graph model. Every per-edge
// quantity below is a function of the pair sum t = theta_i + theta_j.
//
// Sign conventions: the finite discrete family puts mass proportional to
// exp(a t) on a in {0, ..., q-1}, so its mean increases with t. The
// continuous (exponential) and infinite discrete (geometric) families put
// density proportional to exp(-a t) on a >= 0, so their means decrease with t
// and need t > 0.
class WeightModel {
 public:
  static WeightModel finite_discrete(int q) {
    if (q < 2) {
      throw DomainError("finite discrete model needs q >= 2, got " + std::to_string(q));
    }
    return WeightModel(Family::FiniteDiscrete, q);
  }
  static WeightModel continuous() { return WeightModel(Family::Continuous, 0); }
  static WeightModel infinite_discrete() { return WeightModel(Family::InfiniteDiscrete, 0); }

  // Accepts "finite:q", "continuous" and "geometric".
  static WeightModel parse(std::string_view spec) {
    if (spec == "continuous") return continuous();
    if (spec == "geometric") return infinite_discrete();
    constexpr std::string_view prefix = "finite:";
    if (spec.substr(0, prefix.size()) == prefix) {
      const std::string digits(spec.substr(prefix.size()));
      std::size_t used = 0;
      int q = 0;
      try {
        q = std::stoi(digits, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (digits.empty() || used != digits.size()) {
        throw std::invalid_argument("bad support size in model '" + std::string(spec) + "'");
      }
      return finite_discrete(q);
    }
    throw std::invalid_argument("unknown model '" + std::string(spec) +
                                "' (expected finite:q, continuous or geometric)");
  }

  Family family() const { return family_; }
  std::optional<int> q() const {
    if (family_ == Family::FiniteDiscrete) return q_;
    return std::nullopt;
  }

  std::string to_string() const {
    switch (family_) {
      case Family::FiniteDiscrete:
        return "finite:" + std::to_string(q_);
      case Family::Continuous:
        return "continuous";
      case Family::InfiniteDiscrete:
        return "geometric";
    }
    return {};
  }

  // +1 when the mean increases with t, -1 when it decreases. The derivative
  // of the mean is mean_slope_sign() * variance.
  int mean_slope_sign() const { return family_ == Family::FiniteDiscrete ? 1 : -1; }

  bool requires_positive_pair_sums() const { return family_ != Family::FiniteDiscrete; }

  // Largest attainable edge weight.
  double max_weight() const {
    if (family_ == Family::FiniteDiscrete) return static_cast<double>(q_ - 1);
    return std::numeric_limits<double>::infinity();
  }

  bool integer_valued() const { return family_ != Family::Continuous; }

  bool is_feasible(double t) const {
    if (!std::isfinite(t)) return false;
    return !requires_positive_pair_sums() || t > 0.0;
  }

  void require_feasible(double t) const {
    if (std::isnan(t) || std::isinf(t)) {
      throw DomainError(to_string() + ": pair sum must be finite");
    }
    if (requires_positive_pair_sums() && !(t > 0.0)) {
      std::ostringstream msg;
      msg << to_string() << ": pair sum theta_i + theta_j must be > 0, got " << t;
      throw DomainError(msg.str());
    }
  }

  bool operator==(const WeightModel&) const = default;

 private:
  WeightModel(Family family, int q) : family_(family), q_(q) {}

  Family family_;
  int q_;
};

namespace detail {

struct FiniteMoments {
  double log_normalizer;  // log sum_a exp(a t)
  double mean;
  double variance;
  double third_central;
  double third_raw;
};

// Probabilities are formed with the largest exponent factored out so that
// |t| (q - 1) far beyond the exp() range stays finite.
inline FiniteMoments finite_moments(int q, double t) {
  const double shift = t > 0.0 ? (q - 1) * t : 0.0;
  std::vector<double> w(static_cast<std::size_t>(q));
  double total = 0.0;
  for (int a = 0; a < q; ++a) {
    w[a] = std::exp(a * t - shift);
    total += w[a];
  }
  double mean = 0.0;
  double raw3 = 0.0;
  for (int a = 0; a < q; ++a) {
    w[a] /= total;
    mean += a * w[a];
    raw3 += static_cast<double>(a) * a * a * w[a];
  }
  double var = 0.0;
  double k3 = 0.0;
  for (int a = 0; a < q; ++a) {
    const double c = a - mean;
    var += c * c * w[a];
    k3 += c * c * c * w[a];
  }
  return {shift + std::log(total), mean, var, k3, raw3};
}

}  // namespace detail

/// E[a_ij] at pair sum t.
inline double mean(const WeightModel& model, double t) {
  model.require_feasible(t);
  switch (model.family()) {
    case Family::FiniteDiscrete:
      return detail::finite_moments(*model.q(), t).mean;
    case Family::Continuous:
      return 1.0 / t;
    case Family::InfiniteDiscrete:
      return 1.0 / std::expm1(t);
  }
  return 0.0;
}

/// Var(a_ij), which is also the single-edge Fisher information v_ij.
inline double variance(const WeightModel& model, double t) {
  model.require_feasible(t);
  switch (model.family()) {
    case Family::FiniteDiscrete:
      return detail::finite_moments(*model.q(), t).variance;
    case Family::Continuous:
      return 1.0 / (t * t);
    case Family::InfiniteDiscrete:
      // e^t / (e^t - 1)^2 = 1 / ((e^t - 1)(1 - e^-t))
      return 1.0 / (std::expm1(t) * -std::expm1(-t));
  }
  return 0.0;
}

/// Second derivative of mean() in t. For the finite discrete family this is
/// the third cumulant, bounded by (q - 1)^3 in magnitude.
inline double mean_second_derivative(const WeightModel& model, double t) {
  model.require_feasible(t);
  switch (model.family()) {
    case Family::FiniteDiscrete:
      return detail::finite_moments(*model.q(), t).third_central;
    case Family::Continuous:
      return 2.0 / (t * t * t);
    case Family::InfiniteDiscrete: {
      // e^t (e^t + 1) / (e^t - 1)^3 = v (1 + 2 mu)
      const double mu = 1.0 / std::expm1(t);
      return variance(model, t) * (1.0 + 2.0 * mu);
    }
  }
  return 0.0;
}

/// Raw third moment E[a_ij^3].
inline double third_moment(const WeightModel& model, double t) {
  model.require_feasible(t);
  switch (model.family()) {
    case Family::FiniteDiscrete:
      return detail::finite_moments(*model.q(), t).third_raw;
    case Family::Continuous:
      return 6.0 / (t * t * t);
    case Family::InfiniteDiscrete: {
      // Factorial moments of the geometric law: E[X^3] = mu + 6 mu^2 + 6 mu^3
      // with mu = e^-t / (1 - e^-t).
      const double mu = 1.0 / std::expm1(t);
      return mu + 6.0 * mu * mu + 6.0 * mu * mu * mu;
    }
  }
  return 0.0;
}

/// One pair's contribution to the log-partition function z(theta), under the
/// same sign convention as the edge law (so d/dt equals
/// mean_slope_sign() * mean()).
inline double log_partition_term(const WeightModel& model, double t) {
  model.require_feasible(t);
  switch (model.family()) {
    case Family::FiniteDiscrete:
      return detail::finite_moments(*model.q(), t).log_normalizer;
    case Family::Continuous:
      return -std::log(t);
    case Family::InfiniteDiscrete:
      return -std::log(-std::expm1(-t));
  }
  return 0.0;
}

/// Inverse-CDF transform of a uniform draw u in (0, 1].
inline double edge_from_uniform(const WeightModel& model, double t, double u) {
  model.require_feasible(t);
  switch (model.family()) {
    case Family::FiniteDiscrete: {
      const int q = *model.q();
      const double shift = t > 0.0 ? (q - 1) * t : 0.0;
      std::vector<double> w(static_cast<std::size_t>(q));
      double total = 0.0;
      for (int a = 0; a < q; ++a) {
        w[a] = std::exp(a * t - shift);
        total += w[a];
      }
      const double target = u * total;
      double cumulative = 0.0;
      for (int a = 0; a < q - 1; ++a) {
        cumulative += w[a];
        if (cumulative >= target) return a;
      }
      return q - 1;
    }
    case Family::Continuous:
      return -std::log(u) / t;
    case Family::InfiniteDiscrete:
      return std::floor(-std::log(u) / t);
  }
  return 0.0;
}

inline double sample_edge(const WeightModel& model, double t, Rng& rng) {
  return edge_from_uniform(model, t, rng.uniform_open_closed());
}

}  // namespace maxent
