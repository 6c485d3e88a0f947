#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "maxent/graph.hpp"
#include "maxent/weight_model.hpp"

namespace maxent {

// Fisher information of theta: v_ij = Var(a_ij) off the diagonal and
// v_ii = sum_{j != i} v_ij. `m` and `M` are the smallest and largest
// off-diagonal entries, so V belongs to the class L_n(m, M).
struct FisherInfo {
  Eigen::MatrixXd V;
  double m = 0.0;
  double M = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(V.rows()); }
  // v.. = sum_i v_ii
  double total() const { return V.diagonal().sum(); }
};

inline FisherInfo fisher_matrix(const WeightModel& model, std::span<const double> theta) {
  require_feasible(model, theta);
  const auto n = static_cast<Eigen::Index>(theta.size());
  FisherInfo info;
  info.V = Eigen::MatrixXd::Zero(n, n);
  info.m = std::numeric_limits<double>::infinity();
  info.M = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double v = variance(model, theta[i] + theta[j]);
      info.V(i, j) = v;
      info.V(j, i) = v;
      info.m = std::min(info.m, v);
      info.M = std::max(info.M, v);
    }
  }
  // Row sums in index order so the diagonal matches estimated_fisher_diag.
  for (Eigen::Index i = 0; i < n; ++i) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j != i) sum += info.V(i, j);
    }
    info.V(i, i) = sum;
  }
  return info;
}

/// S_n = diag(1 / v_11, ..., 1 / v_nn).
inline Eigen::MatrixXd diag_inverse_approx(const FisherInfo& F) {
  return F.V.diagonal().cwiseInverse().asDiagonal();
}

/// S_n + (1 / v..) 1 1^T.
inline Eigen::MatrixXd rank_one_inverse_approx(const FisherInfo& F) {
  Eigen::MatrixXd S = diag_inverse_approx(F);
  S.array() += 1.0 / F.total();
  return S;
}

/// Upper bound on max_ij |(V^-1 - S_n)_ij| for V in L_n(m, M), n >= 3.
inline double approx_error_bound(std::size_t n, double m, double M) {
  if (n < 3) throw DomainError("approximation bound needs n >= 3");
  if (!(m > 0.0)) throw DomainError("approximation bound needs m > 0");
  if (!(M >= m)) throw DomainError("approximation bound needs M >= m");
  const double nn = static_cast<double>(n);
  const double n1 = nn - 1.0;
  const double n2 = nn - 2.0;
  return M * (nn * M + n2 * m) / (2.0 * m * m * m * n2 * n1 * n1) + 1.0 / (2.0 * m * n1 * n1) +
         1.0 / (m * nn * n1);
}

/// max_ij |a_ij|, the only matrix norm used here.
inline double max_abs_norm(const Eigen::MatrixXd& A) { return A.cwiseAbs().maxCoeff(); }

/// ||V^-1 - S_n|| via a Cholesky factorization of V.
inline double inverse_residual_norm(const FisherInfo& F) {
  const Eigen::LLT<Eigen::MatrixXd> llt(F.V);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("Fisher matrix is not numerically positive definite");
  }
  const auto n = F.V.rows();
  const Eigen::MatrixXd inverse = llt.solve(Eigen::MatrixXd::Identity(n, n));
  if (!inverse.allFinite()) throw std::runtime_error("Fisher matrix inverse is not finite");
  return max_abs_norm(inverse - diag_inverse_approx(F));
}

}  // namespace maxent
