#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "scrible/algorithms.hpp"
#include "scrible/environments.hpp"
#include "test_support.hpp"

using namespace scrible;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

GraphSpec parallel_edges() { return GraphSpec{2, {{0, 1}, {0, 1}}, 0, 1}; }

/// s->a, a->t, s->t
GraphSpec detour() { return GraphSpec{3, {{0, 1}, {1, 2}, {0, 2}}, 0, 2}; }

Vector random_reduced_point(std::size_t dim, RandomStream& rng) {
  // uniform mixture weights via normalized exponentials, dropping the last
  Vector w(static_cast<Eigen::Index>(dim + 1));
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = -std::log(1.0 - rng.uniform());
  w /= w.sum();
  return w.head(static_cast<Eigen::Index>(dim));
}

}  // namespace

TEST(Sequences, Constant) {
  const LossSequence s =
      make_oblivious_sequence(SequenceKind::constant, ConvexPolytope::cube(1), 3, 0, {vec({0.5})});
  ASSERT_EQ(s.size(), 3u);
  for (const auto& f : s.vectors) EXPECT_EQ(f, vec({0.5}));
  EXPECT_EQ(s.declared_bound, 0.5);
}

TEST(Sequences, Rotating) {
  const LossSequence s = make_oblivious_sequence(SequenceKind::rotating, ConvexPolytope::cube(2), 4, 0);
  ASSERT_EQ(s.size(), 4u);
  EXPECT_EQ(s.vectors[0], vec({1.0, 0.0}));
  EXPECT_EQ(s.vectors[1], vec({0.0, 1.0}));
  EXPECT_EQ(s.vectors[2], vec({1.0, 0.0}));
  EXPECT_EQ(s.vectors[3], vec({0.0, 1.0}));
  EXPECT_EQ(s.declared_bound, 1.0);
}

TEST(Sequences, RandomSignedIsNormalizedAndSeeded) {
  const ConvexPolytope body = ConvexPolytope::cube(3);
  const LossSequence a = make_oblivious_sequence(SequenceKind::random_signed, body, 100, 7);
  const LossSequence b = make_oblivious_sequence(SequenceKind::random_signed, body, 100, 7);
  const LossSequence c = make_oblivious_sequence(SequenceKind::random_signed, body, 100, 8);
  EXPECT_NEAR(max_vertex_loss(a, enumerate_vertices(body)), 1.0, 1e-15);
  EXPECT_EQ(a.vectors, b.vectors);
  EXPECT_NE(a.vectors, c.vectors);
}

TEST(Sequences, DeclaredBoundIsChecked) {
  const ConvexPolytope square = ConvexPolytope::cube(2);
  EXPECT_NO_THROW(make_loss_sequence({vec({0.5, 0.5})}, 1.0, square));
  EXPECT_THROW(make_loss_sequence({vec({0.6, 0.5})}, 1.0, square), ContractError);
  EXPECT_THROW(make_loss_sequence({vec({0.1, 0.1})}, 1.0, square, {0.9}), ContractError);
  EXPECT_THROW(make_loss_sequence({vec({0.1})}, 1.0, square), ArgumentError);
  EXPECT_THROW(make_loss_sequence({vec({0.1, 0.1})}, 1.0, square, {0.1, 0.2}), ArgumentError);
}

TEST(Graph, Validation) {
  EXPECT_NO_THROW(validate_graph(diamond_graph()));
  EXPECT_THROW(validate_graph(GraphSpec{3, {{0, 1}, {1, 0}, {1, 2}}, 0, 2}), InputError);  // cycle
  EXPECT_THROW(validate_graph(GraphSpec{4, {{0, 1}, {1, 3}, {2, 1}}, 0, 3}), InputError);  // edge off every path
  EXPECT_THROW(validate_graph(GraphSpec{2, {{0, 5}}, 0, 1}), InputError);
  EXPECT_THROW(validate_graph(GraphSpec{2, {{0, 1}}, 0, 0}), InputError);
}

TEST(FlowPolytope, ParallelEdges) {
  const FlowPolytope f = build_flow_polytope(parallel_edges());
  EXPECT_EQ(f.body.dimension(), 1u);
  EXPECT_EQ(f.coordinates.path_count(), 2u);
  EXPECT_EQ(f.coordinates.to_edge(vec({0.3})), vec({0.3, 0.7}));
  const auto verts = enumerate_vertices(f.body);
  ASSERT_EQ(verts.size(), 2u);
  EXPECT_EQ(verts[0], vec({0.0}));
  EXPECT_EQ(verts[1], vec({1.0}));
}

TEST(FlowPolytope, DetourHasTwoPaths) {
  const FlowPolytope f = build_flow_polytope(detour());
  EXPECT_EQ(f.coordinates.path_count(), 2u);
  EXPECT_EQ(f.body.dimension(), 1u);
}

TEST(FlowPolytope, DiamondHasThreePaths) {
  const FlowPolytope f = build_flow_polytope(diamond_graph());
  EXPECT_EQ(f.coordinates.path_count(), 3u);
  EXPECT_EQ(f.body.dimension(), 2u);
  EXPECT_EQ(f.body.constraint_count(), 3u);
}

TEST(FlowPolytope, SinglePathIsRejected) {
  EXPECT_THROW(build_flow_polytope(GraphSpec{2, {{0, 1}}, 0, 1}), ArgumentError);
}

TEST(FlowPolytope, PathCountGuard) {
  // 15 stages of 2 parallel edges: 2^15 paths
  GraphSpec g{16, {}, 0, 15};
  for (std::size_t v = 0; v < 15; ++v) {
    g.edges.emplace_back(v, v + 1);
    g.edges.emplace_back(v, v + 1);
  }
  EXPECT_THROW(build_flow_polytope(g), SizeError);
}

TEST(DelaysToLoss, ParallelEdges) {
  const FlowPolytope f = build_flow_polytope(parallel_edges());
  const AffineLoss loss = delays_to_loss(f.coordinates, vec({0.3, 0.7}));
  EXPECT_NEAR(loss.linear(0), -0.4, 1e-15);
  EXPECT_NEAR(loss.offset, 0.7, 1e-15);
  const Comparator best = best_in_hindsight(f.body, loss.linear);
  EXPECT_EQ(best.point, vec({1.0}));
  EXPECT_NEAR(loss(best.point), 0.3, 1e-15);
}

TEST(DelaysToLoss, ZeroAndBalancedDelays) {
  const FlowPolytope f = build_flow_polytope(parallel_edges());
  const AffineLoss zero = delays_to_loss(f.coordinates, vec({0.0, 0.0}));
  EXPECT_TRUE(zero.linear.isZero(0.0));
  EXPECT_EQ(zero.offset, 0.0);
  EXPECT_TRUE(delays_to_loss(f.coordinates, vec({0.5, 0.5})).linear.isZero(0.0));
}

TEST(DelaysToLoss, Errors) {
  const FlowPolytope f = build_flow_polytope(diamond_graph());
  EXPECT_THROW(delays_to_loss(f.coordinates, vec({0.6, 0.1, 0.1, 0.5, 0.1})), ContractError);  // s-a-t = 1.1
  EXPECT_THROW(delays_to_loss(f.coordinates, vec({-0.1, 0.1, 0.1, 0.1, 0.1})), InputError);
  EXPECT_THROW(delays_to_loss(f.coordinates, vec({0.1, 0.1})), InputError);
}

TEST(DecomposeFlow, Examples) {
  const GraphSpec p = parallel_edges();
  const auto single = decompose_flow(p, vec({1.0, 0.0}));
  ASSERT_EQ(single.size(), 1u);
  EXPECT_EQ(single[0].path, Path{0});
  EXPECT_EQ(single[0].weight, 1.0);

  auto mixed = decompose_flow(p, vec({0.25, 0.75}));
  ASSERT_EQ(mixed.size(), 2u);
  std::sort(mixed.begin(), mixed.end(), [](const auto& a, const auto& b) { return a.path < b.path; });
  EXPECT_EQ(mixed[0].path, Path{0});
  EXPECT_NEAR(mixed[0].weight, 0.25, 1e-15);
  EXPECT_EQ(mixed[1].path, Path{1});
  EXPECT_NEAR(mixed[1].weight, 0.75, 1e-15);
}

TEST(DecomposeFlow, DiamondRecomposes) {
  const GraphSpec g = diamond_graph();
  const FlowCoordinates coords = build_flow_polytope(g).coordinates;
  RandomStream rng(61, 0, 99);
  for (int k = 0; k < 50; ++k) {
    const Vector edge = coords.to_edge(random_reduced_point(2, rng));
    Vector recomposed = Vector::Zero(edge.size());
    double total = 0.0;
    for (const auto& piece : decompose_flow(g, edge)) {
      EXPECT_GT(piece.weight, 0.0);
      total += piece.weight;
      for (std::size_t e : piece.path) recomposed(static_cast<Eigen::Index>(e)) += piece.weight;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_LE((recomposed - edge).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(DecomposeFlow, ConservationViolated) {
  EXPECT_THROW(decompose_flow(diamond_graph(), vec({0.5, 0.5, 0.0, 0.5, 0.2})), InputError);
  EXPECT_THROW(decompose_flow(parallel_edges(), vec({0.5, 0.2})), InputError);
  EXPECT_THROW(decompose_flow(parallel_edges(), vec({1.5, -0.5})), InputError);
}

TEST(FlowCoordinates, RoundTrip) {
  const FlowCoordinates coords = build_flow_polytope(diamond_graph()).coordinates;
  RandomStream rng(67, 0, 99);
  for (int k = 0; k < 200; ++k) {
    const Vector w = random_reduced_point(2, rng);
    EXPECT_LE((coords.to_reduced(coords.to_edge(w)) - w).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(FlowCoordinates, LossConsistency) {
  const GraphSpec g = diamond_graph();
  const FlowCoordinates coords = build_flow_polytope(g).coordinates;
  const auto delays = make_delay_sequence(g, 50, 3);
  RandomStream rng(71, 0, 99);
  for (const auto& d : delays) {
    const AffineLoss loss = delays_to_loss(coords, d);
    const Vector w = random_reduced_point(2, rng);
    EXPECT_NEAR(loss(w), d.dot(coords.to_edge(w)), 1e-12);
  }
}

TEST(FlowCoordinates, DelaySequenceRespectsTheBound) {
  const GraphSpec g = diamond_graph();
  const FlowCoordinates coords = build_flow_polytope(g).coordinates;
  for (const auto& d : make_delay_sequence(g, 500, 9)) {
    EXPECT_GE(d.minCoeff(), 0.0);
    EXPECT_LE((coords.incidence().transpose() * d).maxCoeff(), 1.0 + 1e-12);
  }
}

TEST(ShortestPath, RegretIsOffsetInvariant) {
  // the same run scored in reduced space (with offsets) and in edge space
  const GraphSpec g = diamond_graph();
  const FlowPolytope flow = build_flow_polytope(g);
  const std::size_t T = 600;
  const auto delays = make_delay_sequence(g, T, 5);
  const LossSequence seq = make_shortest_path_sequence(flow.coordinates, delays);
  SequenceEnvironment env(seq);
  RunConfig c;
  c.horizon = T;
  c.seed = 17;
  const RunTrace trace = run_scrible(env, c, make_log_barrier(flow.body));

  double edge_loss = 0.0, best = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < T; ++t) edge_loss += delays[t].dot(flow.coordinates.to_edge(trace.rounds[t].played));
  for (const auto& path : flow.coordinates.paths()) {
    double total = 0.0;
    for (const auto& d : delays) {
      for (std::size_t e : path) total += d(static_cast<Eigen::Index>(e));
    }
    best = std::min(best, total);
  }
  EXPECT_NEAR(trace.regret, edge_loss - best, 1e-9);

}
