#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "scrible/errors.hpp"

namespace scrible {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Solves H z = rhs for symmetric positive definite H via Cholesky.
inline Vector spd_solve(const Matrix& H, const Vector& rhs) {
  Eigen::LLT<Matrix> llt(H);
  if (llt.info() != Eigen::Success) {
    throw NumericError("spd_solve: matrix is not positive definite");
  }
  return llt.solve(rhs);
}

}  // namespace scrible
