#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "scrible/errors.hpp"
#include "scrible/linalg.hpp"

namespace scrible {

/// Spectral decomposition of a symmetric positive definite matrix.
/// values(k) pairs with column k of vectors; values are in descending order.
struct EigenBasis {
  Vector values;
  Matrix vectors;

  std::size_t size() const { return static_cast<std::size_t>(values.size()); }
  Vector vector(std::size_t k) const { return vectors.col(static_cast<Eigen::Index>(k)); }

  Matrix reconstruct() const { return vectors * values.asDiagonal() * vectors.transpose(); }
};

namespace jacobi {
inline constexpr double off_diagonal_tolerance = 1e-12;
inline constexpr int max_sweeps = 100;
inline constexpr double symmetry_tolerance = 1e-12;
}  // namespace jacobi

/// Cyclic Jacobi eigendecomposition.
///
/// Rotations are applied in fixed row-major (p, q) order and the sweep stops
/// once the off-diagonal Frobenius norm falls below 1e-12 times the matrix
/// Frobenius norm. Output is deterministic: eigenvalues are sorted in
/// descending order (stable for ties) and every eigenvector is signed so its
/// first non-negligible component is positive.
inline EigenBasis symmetric_eigendecomposition(const Matrix& H) {
  const Eigen::Index n = H.rows();
  if (n == 0 || H.cols() != n) {
    throw ArgumentError("symmetric_eigendecomposition: matrix must be square and non-empty");
  }
  if (!H.allFinite()) throw ArgumentError("symmetric_eigendecomposition: non-finite entry");

  const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (std::abs(H(i, j) - H(j, i)) > jacobi::symmetry_tolerance * scale) {
        throw ArgumentError("symmetric_eigendecomposition: matrix is not symmetric");
      }
    }
  }

  Matrix a = 0.5 * (H + H.transpose());
  Matrix v = Matrix::Identity(n, n);
  const double threshold = jacobi::off_diagonal_tolerance * a.norm();

  auto off_norm = [&] {
    double s = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) s += 2.0 * a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  int sweep = 0;
  while (off_norm() > threshold) {
    if (++sweep > jacobi::max_sweeps) {
      throw NumericError("symmetric_eigendecomposition: Jacobi sweeps did not converge");
    }
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::hypot(theta, 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;

        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index l, Eigen::Index r) { return a(l, l) > a(r, r); });

  EigenBasis basis{Vector(n), Matrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    const double lambda = a(src, src);
    if (!(lambda > 0.0)) {
      throw NumericError("symmetric_eigendecomposition: matrix is not positive definite");
    }
    Vector col = v.col(src);
    const double cutoff = 1e-10 * col.cwiseAbs().maxCoeff();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (std::abs(col(j)) > cutoff) {
        if (col(j) < 0.0) col = -col;
        break;
      }
    }
    basis.values(k) = lambda;
    basis.vectors.col(k) = col;
  }
  return basis;
}

}  // namespace scrible
