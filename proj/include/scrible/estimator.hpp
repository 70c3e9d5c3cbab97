#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>

#include "scrible/eigen.hpp"
#include "scrible/errors.hpp"
#include "scrible/geometry.hpp"
#include "scrible/random.hpp"

namespace scrible {

/// One draw from the Dikin boundary sampler. index is zero-based.
struct SampleOutcome {
  std::size_t index = 0;
  int sign = 1;
  Vector prediction;
  double offset_eigenvalue = 0.0;
  double radius = 1.0;
};

/// y = x + sign * radius * lambda_i^{-1/2} e_i for a fixed (i, sign).
inline SampleOutcome make_outcome(const Vector& x, const EigenBasis& basis, std::size_t index, int sign,
                                  double radius = 1.0) {
  if (index >= basis.size()) throw ArgumentError("make_outcome: index out of range");
  if (sign != 1 && sign != -1) throw ArgumentError("make_outcome: sign must be +1 or -1");
  const double lambda = basis.values(static_cast<Eigen::Index>(index));
  SampleOutcome out;
  out.index = index;
  out.sign = sign;
  out.offset_eigenvalue = lambda;
  out.radius = radius;
  out.prediction = x + (static_cast<double>(sign) * radius / std::sqrt(lambda)) * basis.vector(index);
  return out;
}

/// Recovers the center from a prediction (inverse of make_outcome).
inline Vector reconstruct_center(const SampleOutcome& outcome, const EigenBasis& basis) {
  return outcome.prediction -
         (static_cast<double>(outcome.sign) * outcome.radius / std::sqrt(outcome.offset_eigenvalue)) *
             basis.vector(outcome.index);
}

/// The per-round sampling stream: keyed by (run seed, round index).
inline RandomStream dikin_stream(std::uint64_t run_seed, std::uint64_t round) {
  return RandomStream(run_seed, round, stream_tag::dikin_sample);
}

/// Draws i uniformly, then the sign, and places the prediction on the boundary
/// of the Dikin ellipsoid at x along eigenvector i. The prediction is checked
/// against the closed body.
///
/// radius shrinks the ellipsoid; it is 1 except as a numerical safety valve.
inline SampleOutcome sample_dikin_boundary(const Vector& x, const EigenBasis& basis, RandomStream& rng,
                                           const ConvexPolytope& body, double radius = 1.0) {
  if (!body.is_strictly_interior(x)) throw DomainError("sample_dikin_boundary: center is not strictly interior");
  if (!(radius > 0.0 && radius <= 1.0)) throw ArgumentError("sample_dikin_boundary: radius must lie in (0, 1]");
  const std::size_t i = rng.uniform_index(basis.size());
  const int eps = rng.sign();
  SampleOutcome out = make_outcome(x, basis, i, eps, radius);
  if (!body.contains(out.prediction)) {
    throw GeometryError("sample_dikin_boundary: prediction left the closed body");
  }
  return out;
}

/// One-point estimate n * loss * sign * lambda_i^{1/2} e_i (divided by the
/// sampling radius when it is below 1). Averaged over the 2n equiprobable
/// outcomes this is exactly the loss vector.
inline Vector estimate_loss_vector(double observed_loss, const SampleOutcome& outcome, const EigenBasis& basis,
                                   std::size_t n) {
  return (static_cast<double>(n) * observed_loss * static_cast<double>(outcome.sign) *
          std::sqrt(outcome.offset_eigenvalue) / outcome.radius) *
         basis.vector(outcome.index);
}

}  // namespace scrible
