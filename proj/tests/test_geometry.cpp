#include <gtest/gtest.h>

#include <cmath>

#include "scrible/geometry.hpp"
#include "scrible/newton.hpp"
#include "test_support.hpp"

using namespace scrible;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

}  // namespace

TEST(LogBarrier, UnitIntervalAtOrigin) {
  const LogBarrier r = make_log_barrier(ConvexPolytope::cube(1));
  const BarrierEval e = r.evaluate(vec({0.0}));
  EXPECT_DOUBLE_EQ(e.value, 0.0);
  EXPECT_DOUBLE_EQ(e.gradient(0), 0.0);
  EXPECT_DOUBLE_EQ(e.hessian(0, 0), 2.0);
  EXPECT_EQ(r.theta(), 2.0);
}

TEST(LogBarrier, SquareGradientVanishesAtCenter) {
  const LogBarrier r = make_log_barrier(ConvexPolytope::cube(2));
  EXPECT_TRUE(r.gradient(Vector::Zero(2)).isZero(0.0));
  EXPECT_EQ(r.theta(), 4.0);
}

TEST(LogBarrier, NearBoundaryValue) {
  const LogBarrier r = make_log_barrier(ConvexPolytope::cube(1));
  const double v = r.value(vec({0.999}));
  EXPECT_GT(v, 6.2);
  EXPECT_NEAR(v, -std::log(0.001) - std::log(1.999), 1e-12);
}

TEST(LogBarrier, ClosedFormAtInteriorPoint) {
  const LogBarrier r = make_log_barrier(ConvexPolytope::cube(1));
  const BarrierEval e = r.evaluate(vec({0.5}));
  EXPECT_NEAR(e.gradient(0), 1.0 / 0.5 - 1.0 / 1.5, 1e-14);
  EXPECT_NEAR(e.hessian(0, 0), 1.0 / 0.25 + 1.0 / 2.25, 1e-14);
}

TEST(LogBarrier, RejectsNonInteriorPoints) {
  const LogBarrier r = make_log_barrier(ConvexPolytope::cube(2));
  EXPECT_THROW(r.value(vec({1.0, 0.0})), DomainError);
  EXPECT_THROW(r.gradient(vec({2.0, 0.0})), DomainError);
  EXPECT_THROW(r.hessian(vec({0.0, -1.0})), DomainError);
  EXPECT_THROW(r.value(vec({0.0})), ArgumentError);
}

TEST(LogBarrier, BlowsUpTowardsTheBoundary) {
  const LogBarrier r = make_log_barrier(scrible::testing::triangle());
  const Vector x = vec({1.0 / 3, 1.0 / 3});
  const Vector d = vec({1.0, 0.3});
  const double reach = r.domain().max_step(x, d);
  double previous = -1e300;
  for (double frac : {0.5, 0.9, 0.99, 0.999, 0.9999, 0.99999, 0.999999}) {
    const double v = r.value(x + frac * reach * d);
    EXPECT_GT(v, previous);
    previous = v;
  }
  EXPECT_GT(previous, 10.0);
}

TEST(LogBarrier, HessianIsSymmetricPositiveDefinite) {
  RandomStream rng(11, 0, 99);
  for (int k = 0; k < 20; ++k) {
    const ConvexPolytope body = scrible::testing::random_polytope(3, 4, rng);
    const LogBarrier r = make_log_barrier(body);
    const Vector x = sample_interior_point(body, rng);
    const Matrix H = r.hessian(x);
    EXPECT_LE((H - H.transpose()).norm(), 1e-12 * H.norm());
    EXPECT_EQ(Eigen::LLT<Matrix>(H).info(), Eigen::Success);
  }
}

TEST(LocalNorm, Examples) {
  const LogBarrier square = make_log_barrier(ConvexPolytope::cube(2));
  EXPECT_NEAR(local_norm(square, Vector::Zero(2), vec({1.0, 0.0})), std::sqrt(2.0), 1e-15);
  EXPECT_EQ(local_norm(square, vec({0.3, -0.2}), Vector::Zero(2)), 0.0);
  EXPECT_EQ(dual_local_norm(square, vec({0.3, -0.2}), Vector::Zero(2)), 0.0);

  const LogBarrier line = make_log_barrier(ConvexPolytope::cube(1));
  EXPECT_NEAR(dual_local_norm(line, vec({0.0}), vec({1.0})), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_THROW(local_norm(line, vec({1.5}), vec({1.0})), DomainError);
}

TEST(LocalNorm, DualPairing) {
  RandomStream rng(5, 0, 99);
  for (int k = 0; k < 20; ++k) {
    const ConvexPolytope body = scrible::testing::random_polytope(3, 3, rng);
    const LogBarrier r = make_log_barrier(body);
    const Vector x = sample_interior_point(body, rng);
    const Vector v = scrible::testing::random_vector(3, rng);
    // ||H v||_x^* = ||v||_x
    EXPECT_NEAR(dual_local_norm(r, x, r.hessian(x) * v), local_norm(r, x, v), 1e-9 * local_norm(r, x, v));
  }
}

TEST(Dikin, MembershipExamples) {
  const LogBarrier square = make_log_barrier(ConvexPolytope::cube(2));
  const Vector origin = Vector::Zero(2);
  EXPECT_FALSE(dikin_membership(square, origin, vec({0.5, 0.5})));
  EXPECT_TRUE(dikin_membership(square, origin, origin));
  EXPECT_TRUE(dikin_membership(square, origin, vec({0.5, 0.0})));
}

TEST(Dikin, UnitEllipsoidStaysInClosedBody) {
  RandomStream rng(17, 0, 99);
  for (int k = 0; k < 50; ++k) {
    const ConvexPolytope body = scrible::testing::random_polytope(2, 3, rng);
    const LogBarrier r = make_log_barrier(body);
    const Vector x = sample_interior_point(body, rng);
    const Vector h = scrible::testing::random_vector(2, rng);
    const Vector y = x + h / local_norm(r, x, h);
    EXPECT_GE(body.slacks(y).minCoeff(), -1e-9);
    EXPECT_TRUE(body.is_strictly_interior(x + 0.999 * h / local_norm(r, x, h)));
  }
}

TEST(Dikin, FlattensNearTheBoundary) {
  const LogBarrier line = make_log_barrier(ConvexPolytope::cube(1));
  for (double x : {0.0, 0.5, 0.9, 0.99}) {
    const double lambda = line.hessian(vec({x}))(0, 0);
    EXPECT_LE(1.0 / std::sqrt(lambda), 1.0 - std::abs(x)) << "x = " << x;
  }
}

TEST(SelfConcordance, Examples) {
  const LogBarrier square = make_log_barrier(ConvexPolytope::cube(2));
  EXPECT_TRUE(verify_self_concordance(square, Vector::Zero(2), vec({1.0, 0.0}), 1e-4));
  EXPECT_TRUE(verify_self_concordance(square, vec({0.2, 0.1}), Vector::Zero(2), 1e-4));
  const LogBarrier line = make_log_barrier(ConvexPolytope::cube(1));
  EXPECT_TRUE(verify_self_concordance(line, vec({0.5}), vec({1.0}), 1e-4));
}

TEST(SelfConcordance, OversizedStencilIsADomainError) {
  const LogBarrier line = make_log_barrier(ConvexPolytope::cube(1));
  EXPECT_THROW(verify_self_concordance(line, vec({0.5}), vec({1.0}), 1.0), DomainError);
  EXPECT_THROW(verify_self_concordance(line, vec({1.5}), vec({1.0}), 1e-4), DomainError);
}

TEST(BarrierParameter, Examples) {
  const LogBarrier line = make_log_barrier(ConvexPolytope::cube(1));
  EXPECT_TRUE(verify_barrier_parameter(line, vec({0.0}), vec({1.0})));
  EXPECT_TRUE(verify_barrier_parameter(line, vec({0.9}), vec({1.0})));
  const LogBarrier tri = make_log_barrier(scrible::testing::triangle());
  EXPECT_EQ(tri.theta(), 3.0);
  EXPECT_TRUE(verify_barrier_parameter(tri, vec({1.0 / 3, 1.0 / 3}), vec({1.0, -1.0})));
}

TEST(Verifiers, RandomInstances) {
  RandomStream rng(23, 0, 99);
  for (int k = 0; k < 100; ++k) {
    const std::size_t n = 1 + static_cast<std::size_t>(k % 4);
    const ConvexPolytope body = scrible::testing::random_polytope(n, 1 + k % 5, rng);
    const LogBarrier r = make_log_barrier(body);
    const Vector x = sample_interior_point(body, rng);
    const Vector h = scrible::testing::random_vector(n, rng);
    EXPECT_TRUE(verify_self_concordance(r, x, h, 1e-4));
    EXPECT_TRUE(verify_barrier_parameter(r, x, h));
    const DerivativeCheck fd = finite_difference_check(r, x);
    EXPECT_LE(fd.gradient_error, 1e-5);
    EXPECT_LE(fd.hessian_error, 1e-5);
  }
}

TEST(Polytope, RejectsUnboundedBodies) {
  Matrix A(2, 2);
  A << 1, 0, 0, 1;
  EXPECT_THROW(ConvexPolytope(A, vec({1.0, 1.0})), ArgumentError);
  Matrix half(3, 2);
  half << 1, 0, -1, 0, 0, 1;  // strip unbounded below in y
  EXPECT_THROW(ConvexPolytope(half, vec({1.0, 1.0, 1.0})), ArgumentError);
}

TEST(Polytope, RejectsEmptyInterior) {
  Matrix A(2, 1);
  A << 1, -1;
  EXPECT_THROW(ConvexPolytope(A, vec({0.0, 0.0})), ArgumentError);  // the single point {0}
  EXPECT_THROW(ConvexPolytope(A, vec({-1.0, -1.0})), ArgumentError);  // empty
  EXPECT_THROW(ConvexPolytope(A, vec({1.0, 1.0}), vec({2.0})), ArgumentError);  // bad hint
}

TEST(Polytope, RejectsMalformedInput) {
  EXPECT_THROW(ConvexPolytope(Matrix(0, 2), Vector(0)), ArgumentError);
  Matrix A(2, 1);
  A << 1, -1;
  EXPECT_THROW(ConvexPolytope(A, vec({1.0})), ArgumentError);
  EXPECT_THROW(ConvexPolytope(A, vec({1.0, NAN})), ArgumentError);
}

TEST(Polytope, VertexCentroidIsInterior) {
  Matrix A(3, 2);
  A << -1, 0, 0, -1, 1, 1;
  const ConvexPolytope tri(A, vec({0.0, 0.0, 1.0}));
  EXPECT_NEAR(tri.interior_point()(0), 1.0 / 3, 1e-12);
  EXPECT_NEAR(tri.interior_point()(1), 1.0 / 3, 1e-12);
}

TEST(Polytope, StrictInteriorToleranceAndContainment) {
  const ConvexPolytope square = ConvexPolytope::cube(2);
  EXPECT_TRUE(square.is_strictly_interior(vec({0.5, -0.5})));
  EXPECT_FALSE(square.is_strictly_interior(vec({1.0, 0.0})));
  EXPECT_FALSE(square.is_strictly_interior(vec({1.0 - 1e-13, 0.0})));
  EXPECT_TRUE(square.contains(vec({1.0, 1.0})));
  EXPECT_TRUE(square.contains(vec({1.0 + 1e-10, 0.0})));
  EXPECT_FALSE(square.contains(vec({1.0 + 1e-6, 0.0})));
}

TEST(Polytope, VertexEnumeration) {
  const auto square = enumerate_vertices(ConvexPolytope::cube(2));
  ASSERT_EQ(square.size(), 4u);
  EXPECT_EQ(square.front(), vec({-1.0, -1.0}));
  EXPECT_EQ(square.back(), vec({1.0, 1.0}));
  const auto tri = enumerate_vertices(scrible::testing::triangle());
  ASSERT_EQ(tri.size(), 3u);
  EXPECT_EQ(tri[0], vec({0.0, 0.0}));
  EXPECT_EQ(tri[1], vec({0.0, 1.0}));
  EXPECT_EQ(tri[2], vec({1.0, 0.0}));
}

TEST(Polytope, VertexGuard) {
  // C(200, 4) > 1e6
  const std::size_t m = 200;
  Matrix A(static_cast<Eigen::Index>(m), 4);
  RandomStream rng(3);
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < 4; ++j) A(i, j) = rng.normal();
  }
  EXPECT_THROW(enumerate_vertices(A, Vector::Ones(static_cast<Eigen::Index>(m))), SizeError);
}

TEST(Polytope, SampledPointsAreInterior) {
  RandomStream rng(29, 0, 99);
  for (int k = 0; k < 20; ++k) {
    const ConvexPolytope body = scrible::testing::random_polytope(4, 4, rng);
    for (int j = 0; j < 10; ++j) EXPECT_TRUE(body.is_strictly_interior(sample_interior_point(body, rng)));
  }
}
