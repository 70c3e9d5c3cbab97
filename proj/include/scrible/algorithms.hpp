#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "scrible/eigen.hpp"
#include "scrible/environments.hpp"
#include "scrible/errors.hpp"
#include "scrible/estimator.hpp"
#include "scrible/geometry.hpp"
#include "scrible/newton.hpp"
#include "scrible/random.hpp"

namespace scrible {

enum class Algorithm { scrible, ftrl_full, bandit_pgd };
enum class UpdateMode { argmin, single_newton };

inline const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::scrible: return "scrible";
    case Algorithm::ftrl_full: return "ftrl_full";
    case Algorithm::bandit_pgd: return "bandit_pgd";
  }
  return "?";
}

inline const char* to_string(UpdateMode m) { return m == UpdateMode::argmin ? "argmin" : "single_newton"; }

struct RunConfig {
  std::size_t horizon = 0;
  std::optional<double> eta;  // nullopt: theorem step size (scrible) or the PGD default
  double loss_bound = 1.0;
  std::uint64_t seed = 0;
  Algorithm algorithm = Algorithm::scrible;
  UpdateMode update_mode = UpdateMode::argmin;
  double pgd_delta = 0.1;
  double newton_tol = default_newton_tol;
  /// Dikin sampling radius; 1 everywhere except as a numerical safety valve.
  double sampling_radius = 1.0;
  /// Run with the theorem step size even when T / log T <= 8 theta.
  bool allow_condition_violation = false;
};

struct RoundRecord {
  std::size_t round = 0;
  Vector center;                         // x_t
  std::optional<SampleOutcome> outcome;  // absent for full information
  Vector played;                         // y_t (x_t for full information)
  double observed_loss = 0.0;
  Vector estimate;  // loss estimate fed to the learner
  double estimate_dual_norm = 0.0;
  double cumulative_true_loss = 0.0;
  double cumulative_regret = 0.0;
};

struct RunTrace {
  RunConfig config;
  double eta = 0.0;
  double theta = 0.0;
  std::size_t dimension = 0;
  std::vector<RoundRecord> rounds;
  Vector comparator;
  /// sum_t loss_t(comparator), offsets included.
  double comparator_loss = 0.0;
  double regret = 0.0;

  double total_loss() const { return rounds.empty() ? 0.0 : rounds.back().cumulative_true_loss; }
};

/// A run aborted by a sub-operation; carries the rounds completed so far.
class RunError : public std::runtime_error {
public:
  RunError(const std::string& what, RunTrace partial) : std::runtime_error(what), partial_(std::move(partial)) {}
  const RunTrace& partial_trace() const { return partial_; }

private:
  RunTrace partial_;
};

struct TheoremEta {
  double value = 0.0;
  /// T / log T > 8 theta; outside it the regret guarantee does not apply.
  bool condition_holds = false;
};

/// eta = sqrt(theta log T / (2 n^2 L^2 T)), natural log.
inline TheoremEta theorem_eta(double theta, std::size_t n, double L, std::size_t T) {
  if (T < 2) throw ArgumentError("theorem_eta: horizon must be at least 2");
  if (!(theta > 0.0) || n == 0 || !(L > 0.0)) throw ArgumentError("theorem_eta: inputs must be positive");
  const double Td = static_cast<double>(T);
  const double nd = static_cast<double>(n);
  const double logT = std::log(Td);
  return {std::sqrt(theta * logT / (2.0 * nd * nd * L * L * Td)), Td / logT > 8.0 * theta};
}

/// Expected-regret bound n L sqrt(8 theta T log T) + 2 L.
inline double theorem_regret_bound(double theta, std::size_t n, double L, std::size_t T) {
  const double Td = static_cast<double>(T);
  return static_cast<double>(n) * L * std::sqrt(8.0 * theta * Td * std::log(Td)) + 2.0 * L;
}

struct Comparator {
  Vector point;
  double value = 0.0;
};

/// Lexicographically smallest vertex minimizing cumulative_loss^T v.
inline Comparator best_in_hindsight(const std::vector<Vector>& vertices, const Vector& cumulative_loss) {
  if (vertices.empty()) throw ArgumentError("best_in_hindsight: no vertices");
  double best = cumulative_loss.dot(vertices.front());
  for (const auto& v : vertices) best = std::min(best, cumulative_loss.dot(v));
  const double tie = 1e-12 * (1.0 + std::abs(best));
  for (const auto& v : vertices) {
    const double value = cumulative_loss.dot(v);
    if (value <= best + tie) return {v, value};
  }
  return {vertices.front(), best};  // unreachable
}

inline Comparator best_in_hindsight(const ConvexPolytope& body, const Vector& cumulative_loss) {
  body.check_dimension(cumulative_loss);
  return best_in_hindsight(enumerate_vertices(body), cumulative_loss);
}

namespace detail {

/// Regret against the best vertex in hindsight; fills per-round cumulative regret.
inline void settle_regret(RunTrace& trace, const Environment& env, const std::vector<Vector>& vertices) {
  Vector total = Vector::Zero(static_cast<Eigen::Index>(trace.dimension));
  for (const auto& r : trace.rounds) total += env.loss_vector(r.round);
  const Comparator best = best_in_hindsight(vertices, total);
  trace.comparator = best.point;

  double comparator_loss = 0.0;
  for (auto& r : trace.rounds) {
    comparator_loss += env.loss_vector(r.round).dot(best.point) + env.loss_offset(r.round);
    r.cumulative_regret = r.cumulative_true_loss - comparator_loss;
  }
  trace.comparator_loss = comparator_loss;
  trace.regret = trace.total_loss() - comparator_loss;
}

inline void check_loss_bound(double loss, double L, std::size_t t) {
  if (!(std::abs(loss) <= L * (1.0 + 1e-12))) {
    throw ContractError("round " + std::to_string(t) + ": observed loss " + std::to_string(loss) +
                        " exceeds the declared bound " + std::to_string(L));
  }
}

}  // namespace detail

/// Self-concordant regularization in bandit learning.
///
/// Starts at the analytic center. Every round it eigendecomposes the barrier
/// Hessian at x_t, plays a uniformly chosen endpoint of a principal axis of
/// the unit Dikin ellipsoid, sees only the scalar loss, forms the one-point
/// estimate and moves x_{t+1} to (or one damped Newton step towards) the
/// minimizer of eta * sum of estimates + R. The environment's loss vectors
/// are read only after play, to settle regret against the best vertex.
inline RunTrace run_scrible(Environment& env, const RunConfig& config, const LogBarrier& barrier) {
  const std::size_t n = barrier.dimension();
  if (env.dimension() != n) throw ArgumentError("run_scrible: environment dimension does not match the barrier");
  if (env.horizon() < config.horizon) throw ArgumentError("run_scrible: environment horizon is too short");
  if (!(config.loss_bound > 0.0)) throw ConfigError("run_scrible: loss bound must be positive");

  RunTrace trace;
  trace.config = config;
  trace.config.algorithm = Algorithm::scrible;
  trace.theta = barrier.theta();
  trace.dimension = n;
  const std::size_t T = config.horizon;

  const bool auto_eta = !config.eta.has_value();
  // with the theorem step size, eta * ||estimate||_x^* <= 1/4 must hold every round
  bool assert_precondition = false;
  if (auto_eta) {
    if (T >= 2) {
      const TheoremEta te = theorem_eta(barrier.theta(), n, config.loss_bound, T);
      if (!te.condition_holds && !config.allow_condition_violation) {
        throw ConfigError("run_scrible: T / log T <= 8 theta, the theorem step size does not apply");
      }
      trace.eta = te.value;
      assert_precondition = te.condition_holds;
    }
  } else {
    if (!(*config.eta > 0.0)) throw ConfigError("run_scrible: eta must be positive");
    trace.eta = *config.eta;
  }

  const auto vertices = enumerate_vertices(barrier.domain());
  const ConvexPolytope& body = barrier.domain();
  try {
    Vector x = analytic_center(barrier, config.newton_tol);
    Vector scaled_sum = Vector::Zero(static_cast<Eigen::Index>(n));
    double cumulative = 0.0;
    trace.rounds.reserve(T);

    for (std::size_t t = 0; t < T; ++t) {
      const EigenBasis basis = symmetric_eigendecomposition(barrier.hessian(x));
      RandomStream rng = dikin_stream(config.seed, t);
      SampleOutcome outcome = sample_dikin_boundary(x, basis, rng, body, config.sampling_radius);

      const double loss = env.observe(t, outcome.prediction);
      detail::check_loss_bound(loss, config.loss_bound, t);
      Vector estimate = estimate_loss_vector(loss, outcome, basis, n);
      const double dual = dual_local_norm(barrier, x, estimate);
      if (assert_precondition && trace.eta * dual > 0.25 * (1.0 + 1e-12)) {
        throw ContractError("round " + std::to_string(t) + ": eta * ||estimate||_x^* exceeds 1/4");
      }
      cumulative += loss;

      RoundRecord rec;
      rec.round = t;
      rec.center = x;
      rec.played = outcome.prediction;
      rec.outcome = std::move(outcome);
      rec.observed_loss = loss;
      rec.estimate_dual_norm = dual;
      rec.cumulative_true_loss = cumulative;
      scaled_sum += trace.eta * estimate;
      rec.estimate = std::move(estimate);
      trace.rounds.push_back(std::move(rec));

      const Objective objective(scaled_sum, barrier);
      if (config.update_mode == UpdateMode::argmin) {
        x = minimize(objective, x, config.newton_tol);
      } else {
        x = damped_newton_step(objective, x);
      }
    }
  } catch (const std::exception& e) {
    throw RunError(std::string("run_scrible aborted after ") + std::to_string(trace.rounds.size()) +
                       " rounds: " + e.what(),
                   trace);
  }

  detail::settle_regret(trace, env, vertices);
  return trace;
}

/// Full-information FTRL with barrier regularizer: plays x_t itself and
/// updates to argmin eta * sum_{s<=t} f_s^T x + R(x).
inline RunTrace run_ftrl_full_info(Environment& env, double eta, const LogBarrier& barrier,
                                   std::size_t horizon, double newton_tol = default_newton_tol) {
  const std::size_t n = barrier.dimension();
  if (env.dimension() != n) throw ArgumentError("run_ftrl_full_info: dimension mismatch");
  if (env.horizon() < horizon) throw ArgumentError("run_ftrl_full_info: environment horizon is too short");
  if (!(eta > 0.0)) throw ConfigError("run_ftrl_full_info: eta must be positive");

  RunTrace trace;
  trace.config.algorithm = Algorithm::ftrl_full;
  trace.config.horizon = horizon;
  trace.config.eta = eta;
  trace.config.newton_tol = newton_tol;
  trace.eta = eta;
  trace.theta = barrier.theta();
  trace.dimension = n;

  const auto vertices = enumerate_vertices(barrier.domain());
  try {
    Vector x = analytic_center(barrier, newton_tol);
    Vector scaled_sum = Vector::Zero(static_cast<Eigen::Index>(n));
    double cumulative = 0.0;
    for (std::size_t t = 0; t < horizon; ++t) {
      Vector f = env.loss_vector(t);
      if (!f.allFinite()) throw ArgumentError("run_ftrl_full_info: non-finite loss vector");
      const double loss = f.dot(x) + env.loss_offset(t);
      cumulative += loss;

      RoundRecord rec;
      rec.round = t;
      rec.center = x;
      rec.played = x;
      rec.observed_loss = loss;
      rec.estimate_dual_norm = dual_local_norm(barrier, x, f);
      rec.cumulative_true_loss = cumulative;
      scaled_sum += eta * f;
      rec.estimate = std::move(f);
      trace.rounds.push_back(std::move(rec));

      x = minimize(Objective(scaled_sum, barrier), x, newton_tol);
    }
  } catch (const std::exception& e) {
    throw RunError(std::string("run_ftrl_full_info aborted: ") + e.what(), trace);
  }
  detail::settle_regret(trace, env, vertices);
  return trace;
}

inline RunTrace run_ftrl_full_info(const std::vector<Vector>& losses, double eta, const LogBarrier& barrier,
                                   double newton_tol = default_newton_tol) {
  LossSequence seq{losses, {}, 1.0};
  SequenceEnvironment env(std::move(seq), barrier.dimension());
  return run_ftrl_full_info(env, eta, barrier, losses.size(), newton_tol);
}

/// The shrunk body K_delta of a box or a simplex, with Euclidean projection.
///
/// Box prod [lo_j, hi_j] shrinks to prod [lo_j + delta, hi_j - delta].
/// Simplex {x >= 0, sum x <= c} shrinks to {x >= delta, sum x <= c - delta sqrt(n)},
/// the set of points whose delta-ball stays inside.
class ShrunkBody {
public:
  ShrunkBody(const ConvexPolytope& body, double delta) : delta_(delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("bandit_pgd: delta must lie in (0, 1)");
    const Matrix& A = body.constraint_matrix();
    const Vector& b = body.constraint_bounds();
    const Eigen::Index n = A.cols();
    const Eigen::Index m = A.rows();

    Vector lo = Vector::Constant(n, -std::numeric_limits<double>::infinity());
    Vector hi = Vector::Constant(n, std::numeric_limits<double>::infinity());
    bool axis_aligned = true;
    for (Eigen::Index i = 0; i < m && axis_aligned; ++i) {
      Eigen::Index nonzero = 0, col = 0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (A(i, j) != 0.0) {
          ++nonzero;
          col = j;
        }
      }
      if (nonzero != 1 || std::abs(A(i, col)) != 1.0) {
        axis_aligned = false;
      } else if (A(i, col) > 0.0) {
        hi(col) = std::min(hi(col), b(i));
      } else {
        lo(col) = std::max(lo(col), -b(i));
      }
    }
    if (axis_aligned && lo.allFinite() && hi.allFinite()) {
      kind_ = Kind::box;
      lo_ = lo.array() + delta;
      hi_ = hi.array() - delta;
      if ((lo_.array() >= hi_.array()).any()) throw ConfigError("bandit_pgd: delta exceeds the box half-width");
      return;
    }

    // simplex: n rows -e_j <= 0 and one row 1^T x <= c
    if (m == n + 1) {
      std::vector<bool> seen(static_cast<std::size_t>(n), false);
      Eigen::Index cap_row = -1;
      bool ok = true;
      for (Eigen::Index i = 0; i < m && ok; ++i) {
        if ((A.row(i).array() == 1.0).all()) {
          ok = cap_row < 0 && b(i) > 0.0;
          cap_row = i;
          continue;
        }
        Eigen::Index col = -1;
        for (Eigen::Index j = 0; j < n; ++j) {
          if (A(i, j) == -1.0 && col < 0) col = j;
          else if (A(i, j) != 0.0) ok = false;
        }
        ok = ok && col >= 0 && b(i) == 0.0 && !seen[static_cast<std::size_t>(col)];
        if (ok) seen[static_cast<std::size_t>(col)] = true;
      }
      if (ok && cap_row >= 0) {
        kind_ = Kind::simplex;
        const double nd = static_cast<double>(n);
        lo_ = Vector::Constant(n, delta);
        cap_ = b(cap_row) - delta * std::sqrt(nd);
        if (!(cap_ > nd * delta)) throw ConfigError("bandit_pgd: delta too large for the simplex");
        return;
      }
    }
    throw ConfigError("bandit_pgd: projection is supported for boxes and simplices only");
  }

  double delta() const { return delta_; }

  Vector project(const Vector& x) const {
    if (kind_ == Kind::box) return x.cwiseMax(lo_).cwiseMin(hi_);

    // capped simplex {z >= 0, sum z <= budget} after shifting by delta
    const Eigen::Index n = x.size();
    const double budget = cap_ - static_cast<double>(n) * delta_;
    const Vector z = x - lo_;
    Vector clipped = z.cwiseMax(0.0);
    if (clipped.sum() <= budget) return clipped + lo_;

    std::vector<double> sorted(z.data(), z.data() + n);
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double running = 0.0, shift = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      running += sorted[static_cast<std::size_t>(k)];
      const double candidate = (running - budget) / static_cast<double>(k + 1);
      if (sorted[static_cast<std::size_t>(k)] - candidate > 0.0) shift = candidate;
    }
    return (z.array() - shift).cwiseMax(0.0).matrix() + lo_;
  }

  /// Euclidean diameter of the original body.
  double body_diameter() const {
    if (kind_ == Kind::box) return ((hi_ - lo_).array() + 2.0 * delta_).matrix().norm();
    return (cap_ + delta_ * std::sqrt(static_cast<double>(lo_.size()))) * std::sqrt(2.0);
  }

private:
  enum class Kind { box, simplex };
  Kind kind_ = Kind::box;
  double delta_;
  Vector lo_, hi_;
  double cap_ = 0.0;
};

/// Default PGD step size diam * delta / (n L sqrt(T)).
inline double default_pgd_eta(double diameter, double delta, std::size_t n, double L, std::size_t T) {
  return diameter * delta / (static_cast<double>(n) * L * std::sqrt(static_cast<double>(std::max<std::size_t>(T, 1))));
}

/// Bandit projected gradient descent baseline: plays x_t + delta s for s
/// uniform on the unit sphere, estimates (n / delta) loss s and projects the
/// gradient step back onto K_delta.
inline RunTrace run_bandit_pgd(Environment& env, const RunConfig& config, const ConvexPolytope& body) {
  const std::size_t n = body.dimension();
  if (env.dimension() != n) throw ArgumentError("run_bandit_pgd: dimension mismatch");
  if (env.horizon() < config.horizon) throw ArgumentError("run_bandit_pgd: environment horizon is too short");
  const ShrunkBody shrunk(body, config.pgd_delta);
  const double delta = config.pgd_delta;

  RunTrace trace;
  trace.config = config;
  trace.config.algorithm = Algorithm::bandit_pgd;
  trace.dimension = n;
  trace.theta = static_cast<double>(body.constraint_count());
  trace.eta = config.eta ? *config.eta
                         : default_pgd_eta(shrunk.body_diameter(), delta, n, config.loss_bound, config.horizon);
  if (!(trace.eta > 0.0)) throw ConfigError("run_bandit_pgd: eta must be positive");

  const auto vertices = enumerate_vertices(body);
  try {
    Vector x = shrunk.project(body.interior_point());
    double cumulative = 0.0;
    const auto dim = static_cast<Eigen::Index>(n);
    for (std::size_t t = 0; t < config.horizon; ++t) {
      RandomStream rng(config.seed, t, stream_tag::sphere_sample);
      Vector s(dim);
      do {
        for (Eigen::Index j = 0; j < dim; ++j) s(j) = rng.normal();
      } while (s.norm() == 0.0);
      s.normalize();

      Vector y = x + delta * s;
      const double loss = env.observe(t, y);
      detail::check_loss_bound(loss, config.loss_bound, t);
      cumulative += loss;
      Vector estimate = (static_cast<double>(n) / delta * loss) * s;

      RoundRecord rec;
      rec.round = t;
      rec.center = x;
      rec.played = std::move(y);
      rec.observed_loss = loss;
      rec.estimate_dual_norm = estimate.norm();
      rec.cumulative_true_loss = cumulative;
      x = shrunk.project(x - trace.eta * estimate);
      rec.estimate = std::move(estimate);
      trace.rounds.push_back(std::move(rec));
    }
  } catch (const std::exception& e) {
    throw RunError(std::string("run_bandit_pgd aborted: ") + e.what(), trace);
  }
  detail::settle_regret(trace, env, vertices);
  return trace;
}

}  // namespace scrible
