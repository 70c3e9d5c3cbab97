#pragma once

// Test-only generators and oracles. Nothing here calls the Newton code, so
// it can stand as an independent check of it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "scrible/geometry.hpp"
#include "scrible/random.hpp"

namespace scrible::testing {

/// Box [-1,1]^n cut by `cuts` random half-spaces a^T x <= b with b in
/// [0.3, 1.2] and unit-norm a, so the origin stays strictly interior.
inline ConvexPolytope random_polytope(std::size_t n, std::size_t cuts, RandomStream& rng) {
  const auto dim = static_cast<Eigen::Index>(n);
  const auto m = static_cast<Eigen::Index>(2 * n + cuts);
  Matrix A = Matrix::Zero(m, dim);
  Vector b(m);
  for (Eigen::Index j = 0; j < dim; ++j) {
    A(2 * j, j) = 1.0;
    A(2 * j + 1, j) = -1.0;
    b(2 * j) = b(2 * j + 1) = 1.0;
  }
  for (Eigen::Index i = 2 * dim; i < m; ++i) {
    Vector a(dim);
    for (Eigen::Index j = 0; j < dim; ++j) a(j) = rng.normal();
    A.row(i) = a.normalized().transpose();
    b(i) = rng.uniform(0.3, 1.2);
  }
  return ConvexPolytope(std::move(A), std::move(b), Vector(Vector::Zero(dim)));
}

inline Vector random_vector(std::size_t n, RandomStream& rng, double scale = 1.0) {
  Vector v(static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < v.size(); ++j) v(j) = scale * rng.normal();
  return v;
}

/// The triangle {x, y >= 0, x + y <= 1}.
// A few ulps of a function value; descent below this is invisible in doubles.
inline double rounding_slack(double value) {
  return 16.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(value));
}

inline ConvexPolytope triangle() { return ConvexPolytope::simplex(2); }

/// Golden-section minimization of a unimodal function on [lo, hi].
inline double golden_section(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-11) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

/// Interval of t with A (base + t dir) < b, shrunk by a relative margin.
inline std::pair<double, double> feasible_interval(const Matrix& A, const Vector& b, const Vector& base,
                                                   const Vector& dir) {
  double lo = -std::numeric_limits<double>::infinity(), hi = std::numeric_limits<double>::infinity();
  const Vector slack = b - A * base;
  const Vector rate = A * dir;
  for (Eigen::Index i = 0; i < rate.size(); ++i) {
    if (rate(i) > 0.0) hi = std::min(hi, slack(i) / rate(i));
    if (rate(i) < 0.0) lo = std::max(lo, slack(i) / rate(i));
  }
  const double margin = 1e-13 * (hi - lo);
  return {lo + margin, hi - margin};
}

/// F(x) = g^T x - sum log(b - A x), +inf outside the interior. Evaluated
/// directly, without the library's barrier class.
inline double barrier_objective(const Matrix& A, const Vector& b, const Vector& g, const Vector& x) {
  const Vector s = b - A * x;
  if ((s.array() <= 0.0).any()) return std::numeric_limits<double>::infinity();
  return g.dot(x) - s.array().log().sum();
}

/// Minimizer of g^T x + log-barrier by golden-section search: directly in 1-D,
/// nested (outer over x_1, inner over x_2) in 2-D.
inline Vector golden_oracle_minimizer(const ConvexPolytope& body, const Vector& g) {
  const Matrix& A = body.constraint_matrix();
  const Vector& b = body.constraint_bounds();
  const auto n = body.dimension();
  if (n == 1) {
    const Vector zero = Vector::Zero(1), e = Vector::Ones(1);
    const auto [lo, hi] = feasible_interval(A, b, zero, e);
    const double t = golden_section([&](double s) { return barrier_objective(A, b, g, s * e); }, lo, hi);
    return Vector::Constant(1, t);
  }
  if (n != 2) throw std::invalid_argument("golden_oracle_minimizer: 1-D or 2-D only");

  const Vector e1 = Vector::Unit(2, 0), e2 = Vector::Unit(2, 1);
  auto inner = [&](double x1) {
    const Vector base = x1 * e1;
    const auto [lo, hi] = feasible_interval(A, b, base, e2);
    if (!(lo < hi)) return std::make_pair(std::numeric_limits<double>::infinity(), 0.0);
    const double x2 = golden_section([&](double s) { return barrier_objective(A, b, g, base + s * e2); }, lo, hi);
    return std::make_pair(barrier_objective(A, b, g, base + x2 * e2), x2);
  };
  // x_1 range over the body: extreme vertices along e1
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& v : enumerate_vertices(body)) {
    lo = std::min(lo, v(0));
    hi = std::max(hi, v(0));
  }
  const double margin = 1e-12 * (hi - lo);
  const double x1 = golden_section([&](double s) { return inner(s).first; }, lo + margin, hi - margin);
  Vector out(2);
  out << x1, inner(x1).second;
  return out;
}

}  // namespace scrible::testing
