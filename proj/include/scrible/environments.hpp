#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "scrible/errors.hpp"
#include "scrible/geometry.hpp"
#include "scrible/random.hpp"

namespace scrible {

/// Source of per-round losses. Rounds are zero-based.
///
/// A bandit learner may call observe() only. loss_vector()/loss_offset()
/// reveal the full loss and exist for full-information learners and for
/// regret accounting after play.
class Environment {
public:
  virtual ~Environment() = default;

  virtual std::size_t dimension() const = 0;
  virtual std::size_t horizon() const = 0;
  /// Declared bound L on |loss(x)| over the body.
  virtual double loss_bound() const = 0;

  /// Scalar loss f_t^T y + offset_t of playing y in round t.
  virtual double observe(std::size_t t, const Vector& y) = 0;

  virtual Vector loss_vector(std::size_t t) const = 0;
  virtual double loss_offset(std::size_t /*t*/) const { return 0.0; }
};

/// A fixed (oblivious) sequence of affine losses f_t^T x + offset_t.
struct LossSequence {
  std::vector<Vector> vectors;
  std::vector<double> offsets;  // empty means all zero
  double declared_bound = 1.0;

  std::size_t size() const { return vectors.size(); }
  double offset(std::size_t t) const { return offsets.empty() ? 0.0 : offsets[t]; }
};

/// max over t and vertices v of |f_t^T v + offset_t|.
inline double max_vertex_loss(const LossSequence& seq, const std::vector<Vector>& vertices) {
  double worst = 0.0;
  for (std::size_t t = 0; t < seq.size(); ++t) {
    for (const auto& v : vertices) worst = std::max(worst, std::abs(seq.vectors[t].dot(v) + seq.offset(t)));
  }
  return worst;
}

/// Checks dimensions and the loss bound over the body's vertices.
inline LossSequence make_loss_sequence(std::vector<Vector> vectors, double declared_bound, const ConvexPolytope& body,
                                       std::vector<double> offsets = {}) {
  if (!(declared_bound > 0.0)) throw ArgumentError("LossSequence: declared bound must be positive");
  if (!offsets.empty() && offsets.size() != vectors.size()) {
    throw ArgumentError("LossSequence: offsets length does not match the horizon");
  }
  for (const auto& f : vectors) {
    if (static_cast<std::size_t>(f.size()) != body.dimension() || !f.allFinite()) {
      throw ArgumentError("LossSequence: loss vector has wrong dimension or non-finite entries");
    }
  }
  LossSequence seq{std::move(vectors), std::move(offsets), declared_bound};
  const double worst = max_vertex_loss(seq, enumerate_vertices(body));
  if (worst > declared_bound * (1.0 + 1e-12)) {
    throw ContractError("LossSequence: |f^T v| reaches " + std::to_string(worst) + " above the declared bound " +
                        std::to_string(declared_bound));
  }
  return seq;
}

class SequenceEnvironment : public Environment {
public:
  explicit SequenceEnvironment(LossSequence seq) : seq_(std::move(seq)) {
    if (seq_.vectors.empty()) throw ArgumentError("SequenceEnvironment: empty sequence has no dimension");
  }

  /// Zero-length sequence with a known dimension.
  SequenceEnvironment(LossSequence seq, std::size_t dimension) : seq_(std::move(seq)), dim_(dimension) {}

  std::size_t dimension() const override {
    return seq_.vectors.empty() ? dim_ : static_cast<std::size_t>(seq_.vectors.front().size());
  }
  std::size_t horizon() const override { return seq_.size(); }
  double loss_bound() const override { return seq_.declared_bound; }

  double observe(std::size_t t, const Vector& y) override { return seq_.vectors.at(t).dot(y) + seq_.offset(t); }
  Vector loss_vector(std::size_t t) const override { return seq_.vectors.at(t); }
  double loss_offset(std::size_t t) const override { return seq_.offset(t); }

  const LossSequence& sequence() const { return seq_; }

private:
  LossSequence seq_;
  std::size_t dim_ = 0;
};

enum class SequenceKind { constant, rotating, random_signed };

/// Oblivious loss sequences.
///
/// constant repeats pattern[0]; rotating cycles through pattern (default: the
/// standard basis); random_signed draws i.i.d. uniform[-1, 1] coordinates and
/// rescales the whole sequence so the worst vertex loss is exactly 1. The
/// declared bound of constant/rotating sequences is their worst vertex loss.
inline LossSequence make_oblivious_sequence(SequenceKind kind, const ConvexPolytope& body, std::size_t horizon,
                                            std::uint64_t seed, std::vector<Vector> pattern = {}) {
  const auto n = static_cast<Eigen::Index>(body.dimension());
  const auto vertices = enumerate_vertices(body);
  std::vector<Vector> out;
  out.reserve(horizon);

  switch (kind) {
    case SequenceKind::constant:
      if (pattern.empty()) pattern.push_back(Vector::Unit(n, 0));
      out.assign(horizon, pattern.front());
      break;
    case SequenceKind::rotating:
      if (pattern.empty()) {
        for (Eigen::Index j = 0; j < n; ++j) pattern.push_back(Vector::Unit(n, j));
      }
      for (std::size_t t = 0; t < horizon; ++t) out.push_back(pattern[t % pattern.size()]);
      break;
    case SequenceKind::random_signed: {
      for (std::size_t t = 0; t < horizon; ++t) {
        RandomStream rng(seed, t, stream_tag::environment);
        Vector f(n);
        for (Eigen::Index j = 0; j < n; ++j) f(j) = rng.uniform(-1.0, 1.0);
        out.push_back(std::move(f));
      }
      LossSequence raw{out, {}, 1.0};
      const double worst = max_vertex_loss(raw, vertices);
      if (worst > 0.0) {
        for (auto& f : out) f /= worst;
      }
      return LossSequence{std::move(out), {}, 1.0};
    }
  }
  for (const auto& f : out) {
    if (f.size() != n) throw ArgumentError("make_oblivious_sequence: pattern vector has wrong dimension");
  }
  LossSequence seq{std::move(out), {}, 1.0};
  const double worst = max_vertex_loss(seq, vertices);
  seq.declared_bound = worst > 0.0 ? worst : 1.0;
  return seq;
}

// ---------------------------------------------------------------------------
// Online shortest path

using Path = std::vector<std::size_t>;  // edge indices, source to sink

/// Directed acyclic graph with a source and a sink.
struct GraphSpec {
  std::size_t node_count = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::size_t source = 0;
  std::size_t sink = 0;
};

inline constexpr std::size_t max_paths = 10000;

/// Throws InputError unless the graph is a DAG in which every edge lies on a
/// source-to-sink path.
inline void validate_graph(const GraphSpec& g) {
  const std::size_t V = g.node_count;
  if (V < 2) throw InputError("GraphSpec: need at least two nodes");
  if (g.source >= V || g.sink >= V || g.source == g.sink) throw InputError("GraphSpec: bad source/sink");
  if (g.edges.empty()) throw InputError("GraphSpec: no edges");
  std::vector<std::vector<std::size_t>> out(V), in(V);
  std::vector<std::size_t> indeg(V, 0);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto [u, v] = g.edges[e];
    if (u >= V || v >= V) throw InputError("GraphSpec: edge endpoint out of range");
    if (u == v) throw InputError("GraphSpec: self loop");
    out[u].push_back(v);
    in[v].push_back(u);
    ++indeg[v];
  }
  std::vector<std::size_t> queue;
  for (std::size_t v = 0; v < V; ++v)
    if (indeg[v] == 0) queue.push_back(v);
  std::size_t seen = 0;
  while (seen < queue.size()) {
    const std::size_t u = queue[seen++];
    for (std::size_t v : out[u])
      if (--indeg[v] == 0) queue.push_back(v);
  }
  if (seen != V) throw InputError("GraphSpec: graph has a cycle");

  auto reach = [&](std::size_t start, const std::vector<std::vector<std::size_t>>& adj) {
    std::vector<bool> mark(V, false);
    std::vector<std::size_t> stack{start};
    mark[start] = true;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v : adj[u]) {
        if (!mark[v]) {
          mark[v] = true;
          stack.push_back(v);
        }
      }
    }
    return mark;
  };
  const auto from_source = reach(g.source, out);
  const auto to_sink = reach(g.sink, in);
  for (std::size_t e = 0; e < g.edges.size(); ++e) {
    const auto [u, v] = g.edges[e];
    if (!from_source[u] || !to_sink[v]) {
      throw InputError("GraphSpec: edge " + std::to_string(e) + " is not on any source-sink path");
    }
  }
}

/// Every source-to-sink path, in depth-first order over edge indices.
inline std::vector<Path> enumerate_paths(const GraphSpec& g) {
  std::vector<std::vector<std::size_t>> out_edges(g.node_count);
  for (std::size_t e = 0; e < g.edges.size(); ++e) out_edges[g.edges[e].first].push_back(e);

  std::vector<Path> paths;
  Path current;
  auto dfs = [&](auto&& self, std::size_t node) -> void {
    if (node == g.sink) {
      if (paths.size() >= max_paths) throw SizeError("enumerate_paths: more than 10^4 source-sink paths");
      paths.push_back(current);
      return;
    }
    for (std::size_t e : out_edges[node]) {
      current.push_back(e);
      self(self, g.edges[e].second);
      current.pop_back();
    }
  };
  dfs(dfs, g.source);
  return paths;
}

/// One path of a flow decomposition.
struct WeightedPath {
  Path path;
  double weight = 0.0;
};

/// Greedy path peeling of a unit source-sink flow.
///
/// Repeatedly takes the edge with the smallest positive residual flow, routes
/// a positive-residual path through it, and subtracts that residual along the
/// path. Weights sum to one and recompose the input edge vector.
inline std::vector<WeightedPath> decompose_flow(const GraphSpec& g, const Vector& edge_flow) {
  constexpr double tol = 1e-9;
  const std::size_t E = g.edges.size();
  if (static_cast<std::size_t>(edge_flow.size()) != E) throw InputError("decompose_flow: wrong edge count");
  std::vector<double> net(g.node_count, 0.0);
  for (std::size_t e = 0; e < E; ++e) {
    if (edge_flow(static_cast<Eigen::Index>(e)) < -tol) throw InputError("decompose_flow: negative edge flow");
    net[g.edges[e].first] += edge_flow(static_cast<Eigen::Index>(e));
    net[g.edges[e].second] -= edge_flow(static_cast<Eigen::Index>(e));
  }
  for (std::size_t v = 0; v < g.node_count; ++v) {
    const double want = v == g.source ? 1.0 : (v == g.sink ? -1.0 : 0.0);
    if (std::abs(net[v] - want) > tol) throw InputError("decompose_flow: flow conservation violated");
  }

  std::vector<double> residual(E);
  for (std::size_t e = 0; e < E; ++e) residual[e] = std::max(0.0, edge_flow(static_cast<Eigen::Index>(e)));
  constexpr double zero = 1e-12;

  // first positive edge leaving / entering each node, in edge order
  auto next_out = [&](std::size_t node) {
    for (std::size_t e = 0; e < E; ++e)
      if (g.edges[e].first == node && residual[e] > zero) return e;
    return E;
  };
  auto next_in = [&](std::size_t node) {
    for (std::size_t e = 0; e < E; ++e)
      if (g.edges[e].second == node && residual[e] > zero) return e;
    return E;
  };

  std::vector<WeightedPath> result;
  for (std::size_t guard = 0; guard <= E; ++guard) {
    std::size_t pivot = E;
    for (std::size_t e = 0; e < E; ++e) {
      if (residual[e] > zero && (pivot == E || residual[e] < residual[pivot])) pivot = e;
    }
    if (pivot == E) break;

    Path head;
    for (std::size_t node = g.edges[pivot].first; node != g.source;) {
      const std::size_t e = next_in(node);
      if (e == E) break;
      head.push_back(e);
      node = g.edges[e].first;
    }
    Path path(head.rbegin(), head.rend());
    path.push_back(pivot);
    for (std::size_t node = g.edges[pivot].second; node != g.sink;) {
      const std::size_t e = next_out(node);
      if (e == E) break;
      path.push_back(e);
      node = g.edges[e].second;
    }
    if (g.edges[path.front()].first != g.source || g.edges[path.back()].second != g.sink) {
      break;  // only numerical dust remains
    }

    double weight = residual[pivot];
    for (std::size_t e : path) weight = std::min(weight, residual[e]);
    for (std::size_t e : path) residual[e] -= weight;
    result.push_back({std::move(path), weight});
  }
  return result;
}

/// Maps between reduced path-mixture coordinates and edge space.
///
/// With p paths, a reduced point w in R^{p-1} is the mixture with weight w_k
/// on path k < p-1 and 1 - sum(w) on the last path. The edge vector of w is
/// P [w; 1 - sum w] where column k of P is the indicator of path k.
class FlowCoordinates {
public:
  FlowCoordinates(GraphSpec graph, std::vector<Path> paths) : graph_(std::move(graph)), paths_(std::move(paths)) {
    const auto E = static_cast<Eigen::Index>(graph_.edges.size());
    const auto p = static_cast<Eigen::Index>(paths_.size());
    incidence_ = Matrix::Zero(E, p);
    for (Eigen::Index k = 0; k < p; ++k) {
      for (std::size_t e : paths_[static_cast<std::size_t>(k)]) incidence_(static_cast<Eigen::Index>(e), k) = 1.0;
      index_.emplace(paths_[static_cast<std::size_t>(k)], static_cast<std::size_t>(k));
    }
  }

  std::size_t path_count() const { return paths_.size(); }
  std::size_t reduced_dimension() const { return paths_.size() - 1; }
  const std::vector<Path>& paths() const { return paths_; }
  const GraphSpec& graph() const { return graph_; }
  /// Edge-by-path incidence matrix.
  const Matrix& incidence() const { return incidence_; }

  Vector mixture(const Vector& reduced) const {
    const auto p = static_cast<Eigen::Index>(paths_.size());
    if (reduced.size() != p - 1) throw ArgumentError("FlowCoordinates: reduced point has wrong dimension");
    Vector w(p);
    w.head(p - 1) = reduced;
    w(p - 1) = 1.0 - reduced.sum();
    return w;
  }

  Vector to_edge(const Vector& reduced) const { return incidence_ * mixture(reduced); }

  /// Reduced coordinates of a unit flow, via decompose_flow. When the path
  /// indicators are linearly independent this inverts to_edge exactly.
  Vector to_reduced(const Vector& edge_flow) const {
    const auto p = static_cast<Eigen::Index>(paths_.size());
    Vector w = Vector::Zero(p);
    for (const auto& piece : decompose_flow(graph_, edge_flow)) {
      const auto it = index_.find(piece.path);
      if (it == index_.end()) throw InputError("FlowCoordinates: flow uses an unknown path");
      w(static_cast<Eigen::Index>(it->second)) += piece.weight;
    }
    return w.head(p - 1);
  }

private:
  GraphSpec graph_;
  std::vector<Path> paths_;
  Matrix incidence_;
  std::map<Path, std::size_t> index_;
};

struct FlowPolytope {
  ConvexPolytope body;
  FlowCoordinates coordinates;
};

/// The flow polytope as the (p-1)-dimensional simplex of path mixtures.
inline FlowPolytope build_flow_polytope(const GraphSpec& graph) {
  validate_graph(graph);
  auto paths = enumerate_paths(graph);
  if (paths.size() < 2) {
    throw ArgumentError("build_flow_polytope: graph has a single path, the decision set is a point");
  }
  const std::size_t dim = paths.size() - 1;
  return FlowPolytope{ConvexPolytope::simplex(dim), FlowCoordinates(graph, std::move(paths))};
}

/// Affine function linear^T x + offset.
struct AffineLoss {
  Vector linear;
  double offset = 0.0;

  double operator()(const Vector& x) const { return linear.dot(x) + offset; }
};

/// Reduced-space loss of the per-edge delays: the expected total delay of the
/// path mixture w. Every path must take at most one time unit.
inline AffineLoss delays_to_loss(const FlowCoordinates& coords, const Vector& edge_delays) {
  const auto E = static_cast<Eigen::Index>(coords.graph().edges.size());
  if (edge_delays.size() != E) throw InputError("delays_to_loss: wrong number of edge delays");
  for (Eigen::Index e = 0; e < E; ++e) {
    if (!(edge_delays(e) >= 0.0) || !std::isfinite(edge_delays(e))) {
      throw InputError("delays_to_loss: delays must be finite and non-negative");
    }
  }
  const Vector path_delay = coords.incidence().transpose() * edge_delays;
  if (path_delay.maxCoeff() > 1.0 + 1e-12) {
    throw ContractError("delays_to_loss: a path takes " + std::to_string(path_delay.maxCoeff()) +
                        " time units, above the bound of 1");
  }
  const auto p = path_delay.size();
  const double last = path_delay(p - 1);
  return AffineLoss{path_delay.head(p - 1).array() - last, last};
}

/// Per-round delays as a loss sequence over the reduced body (declared bound 1).
inline LossSequence make_shortest_path_sequence(const FlowCoordinates& coords, const std::vector<Vector>& delays) {
  LossSequence seq;
  seq.declared_bound = 1.0;
  for (const auto& d : delays) {
    AffineLoss loss = delays_to_loss(coords, d);
    seq.vectors.push_back(std::move(loss.linear));
    seq.offsets.push_back(loss.offset);
  }
  return seq;
}

/// s -> a, s -> b, a -> b, a -> t, b -> t: three paths, a 2-D reduced body.
inline GraphSpec diamond_graph() {
  return GraphSpec{4, {{0, 1}, {0, 2}, {1, 2}, {1, 3}, {2, 3}}, 0, 3};
}

/// Longest source-sink path, in edges.
inline std::size_t longest_path_edges(const GraphSpec& g) {
  std::size_t longest = 0;
  for (const auto& p : enumerate_paths(g)) longest = std::max(longest, p.size());
  return longest;
}

/// Oblivious random delays: each edge has a fixed preference in [0.2, 0.8]
/// perturbed by uniform noise of +-0.2 per round, clipped to [0, 1] and
/// scaled by 1/(longest path length) so no path exceeds one time unit.
inline std::vector<Vector> make_delay_sequence(const GraphSpec& g, std::size_t horizon, std::uint64_t seed) {
  const auto E = static_cast<Eigen::Index>(g.edges.size());
  const double scale = 1.0 / static_cast<double>(longest_path_edges(g));
  RandomStream base_rng(seed, 0, stream_tag::environment);
  Vector base(E);
  for (Eigen::Index e = 0; e < E; ++e) base(e) = base_rng.uniform(0.2, 0.8);
  std::vector<Vector> delays;
  delays.reserve(horizon);
  for (std::size_t t = 0; t < horizon; ++t) {
    RandomStream rng(seed, t + 1, stream_tag::environment);
    Vector d(E);
    for (Eigen::Index e = 0; e < E; ++e) d(e) = scale * std::clamp(base(e) + rng.uniform(-0.2, 0.2), 0.0, 1.0);
    delays.push_back(std::move(d));
  }
  return delays;
}

}  // namespace scrible
