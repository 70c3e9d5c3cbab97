#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "scrible/algorithms.hpp"
#include "scrible/eigen.hpp"
#include "scrible/errors.hpp"
#include "scrible/estimator.hpp"
#include "scrible/geometry.hpp"
#include "scrible/newton.hpp"

namespace scrible {

inline constexpr double max_reduction_branches = 1e5;

struct ReductionCheck {
  /// Expected regret of the sampled bandit play on the true losses.
  double lhs = 0.0;
  /// Expected regret of deterministic FTRL on the estimated losses.
  double rhs = 0.0;
  bool equal = false;
  std::size_t branches = 0;
};

/// Exact expectation check of the bandit reduction.
///
/// Enumerates every sequence of (i, sign) draws, each with probability
/// (1/2n)^T, and follows the deterministic FTRL state down every branch.
/// The comparator u is the best vertex in hindsight for the true losses.
/// lhs = E[sum_t f_t^T y_t - f_t^T u], rhs = E[sum_t fhat_t^T x_t - fhat_t^T u].
inline ReductionCheck enumerate_reduction_check(const std::vector<Vector>& losses, const LogBarrier& barrier,
                                                double eta, double newton_tol = default_newton_tol) {
  const std::size_t n = barrier.dimension();
  const std::size_t T = losses.size();
  const double fanout = 2.0 * static_cast<double>(n);
  if (std::pow(fanout, static_cast<double>(T)) > max_reduction_branches) {
    throw SizeError("enumerate_reduction_check: (2n)^T exceeds the branch guard");
  }
  if (!(eta > 0.0)) throw ArgumentError("enumerate_reduction_check: eta must be positive");

  Vector total = Vector::Zero(static_cast<Eigen::Index>(n));
  for (const auto& f : losses) {
    if (static_cast<std::size_t>(f.size()) != n) throw ArgumentError("enumerate_reduction_check: dimension mismatch");
    total += f;
  }
  const Vector u = best_in_hindsight(barrier.domain(), total).point;

  ReductionCheck out;
  auto explore = [&](auto&& self, std::size_t t, const Vector& x, const Vector& scaled_sum, double prob) -> void {
    if (t == T) {
      ++out.branches;
      return;
    }
    const EigenBasis basis = symmetric_eigendecomposition(barrier.hessian(x));
    const double p = prob / fanout;
    for (std::size_t i = 0; i < n; ++i) {
      for (int sign : {1, -1}) {
        const SampleOutcome outcome = make_outcome(x, basis, i, sign);
        const double loss = losses[t].dot(outcome.prediction);
        const Vector estimate = estimate_loss_vector(loss, outcome, basis, n);
        out.lhs += p * (loss - losses[t].dot(u));
        out.rhs += p * (estimate.dot(x) - estimate.dot(u));

        Vector next_sum = scaled_sum + eta * estimate;
        if (t + 1 < T) {
          const Vector next = minimize(Objective(next_sum, barrier), x, newton_tol);
          self(self, t + 1, next, next_sum, p);
        } else {
          ++out.branches;
        }
      }
    }
  };
  const Vector x1 = analytic_center(barrier, newton_tol);
  if (T == 0) {
    out.equal = true;
    return out;
  }
  explore(explore, 0, x1, Vector::Zero(static_cast<Eigen::Index>(n)), 1.0);
  out.equal = std::abs(out.lhs - out.rhs) <= 1e-9;
  return out;
}

}  // namespace scrible
