#pragma once

#include <cmath>
#include <string>
#include <utility>

#include "scrible/errors.hpp"
#include "scrible/geometry.hpp"
#include "scrible/linalg.hpp"

namespace scrible {

inline constexpr double default_newton_tol = 1e-8;
inline constexpr int max_newton_iterations = 200;

/// F(x) = g^T x + R(x) for a linear term g and barrier R.
struct Objective {
  Vector linear_term;
  LogBarrier barrier;

  Objective(Vector g, LogBarrier r) : linear_term(std::move(g)), barrier(std::move(r)) {
    if (static_cast<std::size_t>(linear_term.size()) != barrier.dimension()) {
      throw ArgumentError("Objective: linear term dimension does not match the barrier");
    }
  }

  /// Pure barrier objective (g = 0).
  explicit Objective(LogBarrier r)
      : linear_term(Vector::Zero(static_cast<Eigen::Index>(r.dimension()))), barrier(std::move(r)) {}

  double value(const Vector& x) const { return linear_term.dot(x) + barrier.value(x); }
  Vector gradient(const Vector& x) const { return linear_term + barrier.gradient(x); }
};

struct NewtonStep {
  Vector point;
  double decrement = 0.0;
  /// Number of step halvings needed to stay strictly interior (0 in exact arithmetic).
  int halvings = 0;
};

namespace detail {

struct NewtonDirection {
  Vector direction;  // H^{-1} grad F
  double decrement;
};

inline NewtonDirection newton_direction(const Objective& obj, const Vector& x) {
  const BarrierEval eval = obj.barrier.evaluate(x);
  const Vector grad = obj.linear_term + eval.gradient;
  Vector dir = spd_solve(eval.hessian, grad);
  const double dec = std::sqrt(std::max(0.0, grad.dot(dir)));
  return {std::move(dir), dec};
}

}  // namespace detail

/// lambda(x) = sqrt(grad F^T Hess R^{-1} grad F).
inline double newton_decrement(const Objective& obj, const Vector& x) {
  return detail::newton_direction(obj, x).decrement;
}

/// One damped Newton step x - H^{-1} grad F / (1 + lambda), reporting the
/// decrement at x and any rounding-safeguard halvings.
inline NewtonStep damped_newton_step_detailed(const Objective& obj, const Vector& x) {
  const auto [dir, dec] = detail::newton_direction(obj, x);
  NewtonStep out{x, dec, 0};
  if (dec == 0.0) return out;

  const ConvexPolytope& body = obj.barrier.domain();
  double scale = 1.0 / (1.0 + dec);
  Vector next = x - scale * dir;
  while (!body.is_strictly_interior(next)) {
    if (++out.halvings > 60) {
      throw NumericError("damped_newton_step: cannot find an interior step");
    }
    scale *= 0.5;
    next = x - scale * dir;
  }
  out.point = std::move(next);
  return out;
}

inline Vector damped_newton_step(const Objective& obj, const Vector& x) {
  return damped_newton_step_detailed(obj, x).point;
}

/// Iterates damped Newton steps from start until the decrement is <= tol.
inline Vector minimize(const Objective& obj, const Vector& start, double tol = default_newton_tol) {
  if (!(tol > 0.0)) throw ArgumentError("minimize: tol must be positive");
  Vector x = start;
  double dec = 0.0;
  for (int it = 0; it <= max_newton_iterations; ++it) {
    NewtonStep step = damped_newton_step_detailed(obj, x);
    dec = step.decrement;
    if (dec <= tol) return x;
    if (it == max_newton_iterations) break;
    x = std::move(step.point);
  }
  throw ConvergenceError("minimize: Newton decrement " + std::to_string(dec) + " above tolerance after " +
                             std::to_string(max_newton_iterations) + " steps",
                         dec);
}

/// argmin of the barrier over the interior, started at the body's known interior point.
inline Vector analytic_center(const LogBarrier& barrier, double tol = default_newton_tol) {
  return minimize(Objective(barrier), barrier.domain().interior_point(), tol);
}

}  // namespace scrible
