#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/LU>

#include "scrible/errors.hpp"
#include "scrible/linalg.hpp"
#include "scrible/random.hpp"

namespace scrible {

namespace tolerance {
/// A point is strictly interior when every slack exceeds this times (1 + |b_i|).
inline constexpr double strict_interior = 1e-12;
/// Closed-body membership accepts slacks down to minus this.
inline constexpr double closed_body = 1e-9;
}  // namespace tolerance

/// Hard cap on the number of n-subsets of constraints tried by vertex enumeration.
inline constexpr double max_vertex_subsets = 1e6;

namespace detail {

inline double binomial(std::size_t m, std::size_t k) {
  if (k > m) return 0.0;
  k = std::min(k, m - k);
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    r = r * static_cast<double>(m - k + i) / static_cast<double>(i);
  }
  return r;
}

inline bool lexicographically_less(const Vector& l, const Vector& r) {
  for (Eigen::Index i = 0; i < l.size(); ++i) {
    if (l(i) < r(i)) return true;
    if (l(i) > r(i)) return false;
  }
  return false;
}

}  // namespace detail

/// Vertices of {x : A x <= b}, found by solving every non-singular n-subset of
/// the constraints and keeping the feasible solutions. Sorted lexicographically,
/// duplicates (within 1e-9) removed.
inline std::vector<Vector> enumerate_vertices(const Matrix& A, const Vector& b) {
  const auto m = static_cast<std::size_t>(A.rows());
  const auto n = static_cast<std::size_t>(A.cols());
  if (detail::binomial(m, n) > max_vertex_subsets) {
    throw SizeError("enumerate_vertices: " + std::to_string(m) + " choose " + std::to_string(n) +
                    " constraint subsets exceeds the enumeration guard");
  }

  std::vector<Vector> found;
  std::vector<std::size_t> pick(n);
  for (std::size_t i = 0; i < n; ++i) pick[i] = i;

  Matrix sub(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  Vector rhs(static_cast<Eigen::Index>(n));
  while (true) {
    for (std::size_t r = 0; r < n; ++r) {
      sub.row(static_cast<Eigen::Index>(r)) = A.row(static_cast<Eigen::Index>(pick[r]));
      rhs(static_cast<Eigen::Index>(r)) = b(static_cast<Eigen::Index>(pick[r]));
    }
    Eigen::FullPivLU<Matrix> lu(sub);
    lu.setThreshold(1e-12);
    if (lu.isInvertible()) {
      Vector x = lu.solve(rhs);
      const Vector slack = b - A * x;
      bool feasible = x.allFinite();
      for (Eigen::Index i = 0; feasible && i < slack.size(); ++i) {
        feasible = slack(i) >= -1e-9 * (1.0 + std::abs(b(i)));
      }
      if (feasible) found.push_back(std::move(x));
    }

    // advance to the next combination
    std::size_t k = n;
    while (k > 0 && pick[k - 1] == m - n + k - 1) --k;
    if (k == 0) break;
    ++pick[k - 1];
    for (std::size_t j = k; j < n; ++j) pick[j] = pick[j - 1] + 1;
  }

  std::sort(found.begin(), found.end(), detail::lexicographically_less);
  std::vector<Vector> unique;
  for (auto& v : found) {
    if (unique.empty() || (unique.back() - v).cwiseAbs().maxCoeff() > 1e-9) {
      unique.push_back(std::move(v));
    }
  }
  return unique;
}

/// Bounded polytope {x in R^n : A x <= b} with non-empty interior.
///
/// Construction rejects bodies that recede along any coordinate axis or along
/// 2n pseudo-random probe directions, and bodies whose interior is empty. An
/// interior point is either supplied or taken as the centroid of the vertices.
class ConvexPolytope {
public:
  ConvexPolytope(Matrix A, Vector b, std::optional<Vector> interior_point = std::nullopt)
      : A_(std::move(A)), b_(std::move(b)) {
    if (A_.rows() == 0 || A_.cols() == 0) {
      throw ArgumentError("ConvexPolytope: constraint matrix must be non-empty");
    }
    if (b_.size() != A_.rows()) {
      throw ArgumentError("ConvexPolytope: constraint_bounds length does not match row count");
    }
    if (!A_.allFinite() || !b_.allFinite()) {
      throw ArgumentError("ConvexPolytope: non-finite constraint data");
    }
    check_bounded();

    if (interior_point) {
      if (interior_point->size() != A_.cols()) {
        throw ArgumentError("ConvexPolytope: interior point has wrong dimension");
      }
      interior_ = std::move(*interior_point);
    } else {
      const auto verts = enumerate_vertices(A_, b_);
      if (verts.empty()) throw ArgumentError("ConvexPolytope: body is empty");
      interior_ = Vector::Zero(A_.cols());
      for (const auto& v : verts) interior_ += v;
      interior_ /= static_cast<double>(verts.size());
    }
    if (!is_strictly_interior(interior_)) {
      throw ArgumentError("ConvexPolytope: body has empty interior (no strictly interior point)");
    }
  }

  /// Axis-aligned box prod [lo_j, hi_j].
  static ConvexPolytope box(const Vector& lo, const Vector& hi) {
    const Eigen::Index n = lo.size();
    if (hi.size() != n || n == 0) throw ArgumentError("box: bad bounds");
    Matrix A = Matrix::Zero(2 * n, n);
    Vector b(2 * n);
    for (Eigen::Index j = 0; j < n; ++j) {
      A(2 * j, j) = 1.0;
      b(2 * j) = hi(j);
      A(2 * j + 1, j) = -1.0;
      b(2 * j + 1) = -lo(j);
    }
    return ConvexPolytope(std::move(A), std::move(b), Vector(0.5 * (lo + hi)));
  }

  /// The cube [-half_width, half_width]^n.
  static ConvexPolytope cube(std::size_t n, double half_width = 1.0) {
    const auto dim = static_cast<Eigen::Index>(n);
    return box(Vector::Constant(dim, -half_width), Vector::Constant(dim, half_width));
  }

  /// {x >= 0, sum x <= cap}.
  static ConvexPolytope simplex(std::size_t n, double cap = 1.0) {
    const auto dim = static_cast<Eigen::Index>(n);
    Matrix A(dim + 1, dim);
    A.topRows(dim) = -Matrix::Identity(dim, dim);
    A.row(dim).setOnes();
    Vector b = Vector::Zero(dim + 1);
    b(dim) = cap;
    return ConvexPolytope(std::move(A), std::move(b),
                          Vector(Vector::Constant(dim, cap / static_cast<double>(n + 1))));
  }

  std::size_t dimension() const { return static_cast<std::size_t>(A_.cols()); }
  std::size_t constraint_count() const { return static_cast<std::size_t>(A_.rows()); }
  const Matrix& constraint_matrix() const { return A_; }
  const Vector& constraint_bounds() const { return b_; }
  const Vector& interior_point() const { return interior_; }

  Vector slacks(const Vector& x) const {
    check_dimension(x);
    return b_ - A_ * x;
  }

  bool is_strictly_interior(const Vector& x) const {
    if (x.size() != A_.cols() || !x.allFinite()) return false;
    const Vector s = b_ - A_ * x;
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      if (!(s(i) > tolerance::strict_interior * (1.0 + std::abs(b_(i))))) return false;
    }
    return true;
  }

  /// Closed-set membership: every slack >= -tol.
  bool contains(const Vector& x, double tol = tolerance::closed_body) const {
    if (x.size() != A_.cols() || !x.allFinite()) return false;
    return ((b_ - A_ * x).array() >= -tol).all();
  }

  /// Largest t >= 0 with x + t d still in the closed body (infinity if none binds).
  double max_step(const Vector& x, const Vector& d) const {
    const Vector s = slacks(x);
    const Vector rate = A_ * d;
    double t = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      if (rate(i) > 0.0) t = std::min(t, s(i) / rate(i));
    }
    return t;
  }

  void check_dimension(const Vector& x) const {
    if (x.size() != A_.cols()) {
      throw ArgumentError("ConvexPolytope: point has dimension " + std::to_string(x.size()) +
                          ", expected " + std::to_string(A_.cols()));
    }
  }

private:
  void check_bounded() const {
    const Eigen::Index n = A_.cols();
    auto bounded_along = [&](const Vector& d) {
      const Vector rate = A_ * d;
      for (Eigen::Index i = 0; i < rate.size(); ++i) {
        if (rate(i) > 1e-12 * A_.row(i).norm() * d.norm()) return true;
      }
      return false;
    };
    for (Eigen::Index j = 0; j < n; ++j) {
      Vector e = Vector::Unit(n, j);
      if (!bounded_along(e) || !bounded_along(-e)) {
        throw ArgumentError("ConvexPolytope: body is unbounded along coordinate axis " +
                            std::to_string(j));
      }
    }
    RandomStream rng(0xB0DEDULL, 0, stream_tag::geometry);
    for (Eigen::Index k = 0; k < 2 * n; ++k) {
      Vector d(n);
      for (Eigen::Index j = 0; j < n; ++j) d(j) = rng.normal();
      if (!bounded_along(d)) throw ArgumentError("ConvexPolytope: body is unbounded");
    }
  }

  Matrix A_;
  Vector b_;
  Vector interior_;
};

inline std::vector<Vector> enumerate_vertices(const ConvexPolytope& body) {
  return enumerate_vertices(body.constraint_matrix(), body.constraint_bounds());
}

/// Value, gradient and Hessian of a barrier at one point.
struct BarrierEval {
  double value = 0.0;
  Vector gradient;
  Matrix hessian;
};

/// Logarithmic barrier R(x) = -sum_i log(b_i - a_i^T x) of a polytope.
/// This is a theta-self-concordant barrier with theta = m (constraint count).
/// Immutable; copies share the underlying body.
class LogBarrier {
public:
  explicit LogBarrier(ConvexPolytope body)
      : body_(std::make_shared<const ConvexPolytope>(std::move(body))) {}

  double theta() const { return static_cast<double>(body_->constraint_count()); }
  const ConvexPolytope& domain() const { return *body_; }
  std::size_t dimension() const { return body_->dimension(); }

  BarrierEval evaluate(const Vector& x) const {
    const Vector s = checked_slacks(x);
    const Matrix& A = body_->constraint_matrix();
    const Vector inv = s.cwiseInverse();
    BarrierEval out;
    out.value = -s.array().log().sum();
    out.gradient = A.transpose() * inv;
    out.hessian = A.transpose() * inv.cwiseAbs2().asDiagonal() * A;
    return out;
  }

  double value(const Vector& x) const { return -checked_slacks(x).array().log().sum(); }

  Vector gradient(const Vector& x) const {
    return body_->constraint_matrix().transpose() * checked_slacks(x).cwiseInverse();
  }

  Matrix hessian(const Vector& x) const {
    const Matrix& A = body_->constraint_matrix();
    return A.transpose() * checked_slacks(x).cwiseInverse().cwiseAbs2().asDiagonal() * A;
  }

  /// h^T Hessian(x) h without forming the Hessian.
  double hessian_form(const Vector& x, const Vector& h) const {
    const Vector s = checked_slacks(x);
    return (body_->constraint_matrix() * h).cwiseQuotient(s).squaredNorm();
  }

private:
  Vector checked_slacks(const Vector& x) const {
    body_->check_dimension(x);
    if (!body_->is_strictly_interior(x)) {
      throw DomainError("LogBarrier: point is not strictly interior");
    }
    return body_->slacks(x);
  }

  std::shared_ptr<const ConvexPolytope> body_;
};

inline LogBarrier make_log_barrier(ConvexPolytope body) { return LogBarrier(std::move(body)); }

/// ||v||_x = sqrt(v^T Hess R(x) v).
inline double local_norm(const LogBarrier& barrier, const Vector& x, const Vector& v) {
  return std::sqrt(barrier.hessian_form(x, v));
}

/// ||v||_x^* = sqrt(v^T Hess R(x)^{-1} v), via a Cholesky solve.
inline double dual_local_norm(const LogBarrier& barrier, const Vector& x, const Vector& v) {
  const Matrix H = barrier.hessian(x);
  if (v.isZero(0.0)) return 0.0;
  const Vector z = spd_solve(H, v);
  return std::sqrt(std::max(0.0, v.dot(z)));
}

/// Open unit Dikin ellipsoid membership: ||y - x||_x < 1.
inline bool dikin_membership(const LogBarrier& barrier, const Vector& x, const Vector& y) {
  return local_norm(barrier, x, y - x) < 1.0;
}

/// Numerically checks |D^3 R(x)[h,h,h]| <= 2 (D^2 R(x)[h,h])^{3/2}.
///
/// The third derivative is a central difference of h^T Hess R(.) h along h.
/// The stencil half-width is fd_step times the distance from x to the boundary
/// along +-h, so fd_step must be below 1. Relative slack 1e-3.
inline bool verify_self_concordance(const LogBarrier& barrier, const Vector& x, const Vector& h,
                                    double fd_step) {
  const ConvexPolytope& body = barrier.domain();
  if (!body.is_strictly_interior(x)) {
    throw DomainError("verify_self_concordance: point is not strictly interior");
  }
  if (!(fd_step > 0.0)) throw ArgumentError("verify_self_concordance: fd_step must be positive");
  if (h.isZero(0.0)) return true;

  const double reach = std::min(body.max_step(x, h), body.max_step(x, -h));
  const double tau = fd_step * reach;
  const Vector forward = x + tau * h;
  const Vector backward = x - tau * h;
  if (!body.is_strictly_interior(forward) || !body.is_strictly_interior(backward)) {
    throw DomainError("verify_self_concordance: finite-difference stencil leaves the domain");
  }
  const double second = barrier.hessian_form(x, h);
  const double third =
      (barrier.hessian_form(forward, h) - barrier.hessian_form(backward, h)) / (2.0 * tau);
  return std::abs(third) <= 2.0 * std::pow(second, 1.5) * (1.0 + 1e-3);
}

/// Checks |DR(x)[h]| <= sqrt(theta D^2 R(x)[h,h]) from exact derivatives, relative slack 1e-9.
inline bool verify_barrier_parameter(const LogBarrier& barrier, const Vector& x, const Vector& h) {
  const double first = std::abs(barrier.gradient(x).dot(h));
  const double second = barrier.hessian_form(x, h);
  return first <= std::sqrt(barrier.theta() * second) * (1.0 + 1e-9);
}

/// Random strictly interior point: a ray from the body's interior point in a
/// Gaussian direction, stopped at a uniform fraction (at most max_fraction)
/// of the distance to the boundary.
inline Vector sample_interior_point(const ConvexPolytope& body, RandomStream& rng,
                                    double max_fraction = 0.99) {
  const Vector& anchor = body.interior_point();
  const auto n = static_cast<Eigen::Index>(body.dimension());
  Vector d(n);
  for (Eigen::Index j = 0; j < n; ++j) d(j) = rng.normal();
  const double reach = body.max_step(anchor, d);
  return anchor + rng.uniform(0.0, max_fraction) * reach * d;
}

/// Worst finite-difference mismatch of the barrier derivatives at x, each
/// relative to the cancellation-free magnitude of the summed terms.
struct DerivativeCheck {
  double gradient_error = 0.0;
  double hessian_error = 0.0;
};

/// Central differences with step rel_step times the distance from x to the
/// boundary: the gradient from values, the Hessian from exact gradients.
inline DerivativeCheck finite_difference_check(const LogBarrier& barrier, const Vector& x, double rel_step = 1e-5) {
  const ConvexPolytope& body = barrier.domain();
  const Matrix& A = body.constraint_matrix();
  const Vector s = body.slacks(x);
  const BarrierEval exact = barrier.evaluate(x);

  double distance = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < s.size(); ++i) distance = std::min(distance, s(i) / A.row(i).norm());
  const double h = rel_step * distance;

  const Vector inv = s.cwiseInverse();
  const double gradient_scale = (A.cwiseAbs().transpose() * inv).cwiseAbs().maxCoeff();
  const double hessian_scale = (A.cwiseAbs().transpose() * inv.cwiseAbs2().asDiagonal() * A.cwiseAbs()).maxCoeff();

  const auto n = static_cast<Eigen::Index>(barrier.dimension());
  DerivativeCheck out;
  for (Eigen::Index j = 0; j < n; ++j) {
    const Vector e = Vector::Unit(n, j);
    const double dg = (barrier.value(x + h * e) - barrier.value(x - h * e)) / (2.0 * h);
    out.gradient_error = std::max(out.gradient_error, std::abs(dg - exact.gradient(j)) / gradient_scale);
    const Vector dh = (barrier.gradient(x + h * e) - barrier.gradient(x - h * e)) / (2.0 * h);
    out.hessian_error =
        std::max(out.hessian_error, (dh - exact.hessian.col(j)).cwiseAbs().maxCoeff() / hessian_scale);
  }
  return out;
}

}  // namespace scrible
