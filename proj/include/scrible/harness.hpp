#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "scrible/algorithms.hpp"
#include "scrible/environments.hpp"
#include "scrible/errors.hpp"
#include "scrible/geometry.hpp"
#include "scrible/io.hpp"

namespace scrible {

/// Where the losses come from: a polytope with an oblivious sequence, or a
/// shortest-path graph with per-round edge delays.
struct EnvironmentSpec {
  enum class Kind { polytope, graph };
  Kind kind = Kind::polytope;

  std::optional<ConvexPolytope> body;
  SequenceKind sequence = SequenceKind::rotating;
  std::vector<Vector> pattern;
  std::uint64_t sequence_seed = 0;

  std::optional<GraphSpec> graph;
  /// Per-round edge delays; generated from sequence_seed when empty.
  std::vector<Vector> delays;
};

struct ExperimentConfig {
  RunConfig run;
  /// Take L from the environment's declared bound.
  bool loss_bound_auto = true;
  EnvironmentSpec environment;
  std::size_t replications = 1;
  std::filesystem::path out_dir;
  bool emit_plot_data = false;
  /// 0: SCRIBLE_THREADS if set, else hardware concurrency.
  std::size_t threads = 0;
};

/// The body and loss sequence an experiment plays on.
struct PreparedEnvironment {
  ConvexPolytope body;
  LossSequence sequence;
  std::optional<FlowCoordinates> coordinates;
};

inline PreparedEnvironment prepare_environment(const EnvironmentSpec& spec, std::size_t horizon) {
  if (spec.kind == EnvironmentSpec::Kind::polytope) {
    if (!spec.body) throw ConfigError("environment: polytope body missing");
    LossSequence seq = make_oblivious_sequence(spec.sequence, *spec.body, horizon, spec.sequence_seed, spec.pattern);
    return {*spec.body, std::move(seq), std::nullopt};
  }
  if (!spec.graph) throw ConfigError("environment: graph missing");
  FlowPolytope flow = build_flow_polytope(*spec.graph);
  std::vector<Vector> delays = spec.delays;
  if (delays.empty()) delays = make_delay_sequence(*spec.graph, horizon, spec.sequence_seed);
  if (delays.size() < horizon) throw ConfigError("environment: fewer delay rows than the horizon");
  delays.resize(horizon);
  LossSequence seq = make_shortest_path_sequence(flow.coordinates, delays);
  return {flow.body, std::move(seq), flow.coordinates};
}

inline SequenceKind sequence_kind_from_string(const std::string& s) {
  if (s == "constant") return SequenceKind::constant;
  if (s == "rotating") return SequenceKind::rotating;
  if (s == "random_signed") return SequenceKind::random_signed;
  throw ConfigError("unknown sequence kind '" + s + "'");
}

inline Algorithm algorithm_from_string(const std::string& s) {
  if (s == "scrible") return Algorithm::scrible;
  if (s == "ftrl_full") return Algorithm::ftrl_full;
  if (s == "bandit_pgd") return Algorithm::bandit_pgd;
  throw ConfigError("unknown algorithm '" + s + "'");
}

inline UpdateMode update_mode_from_string(const std::string& s) {
  if (s == "argmin") return UpdateMode::argmin;
  if (s == "single_newton" || s == "single-newton") return UpdateMode::single_newton;
  throw ConfigError("unknown update mode '" + s + "'");
}

/// "auto" or a positive number.
inline std::optional<double> eta_from_string(const std::string& s) {
  if (s == "auto") return std::nullopt;
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("eta must be 'auto' or a number, got '" + s + "'");
  }
  if (used != s.size() || !(v > 0.0)) throw ConfigError("eta must be 'auto' or a positive number");
  return v;
}

/// Experiment config file. Relative file references resolve against base_dir.
///
///   {"algorithm": "scrible", "horizon": 4096, "eta": "auto", "loss_bound": "auto",
///    "seed": 1, "update_mode": "argmin", "pgd_delta": 0.1, "newton_tol": 1e-8,
///    "replications": 50, "emit_plot_data": false,
///    "environment": {"type": "polytope", "body": {"A": ..., "b": ...} | "body_file": "...",
///                    "sequence": "rotating", "pattern": [[...]...], "sequence_seed": 0}
///                 | {"type": "graph", "graph": {...} | "graph_file": "...", "sequence_seed": 0}}
inline ExperimentConfig experiment_config_from_json(const json& j, const std::filesystem::path& base_dir = {}) {
  ExperimentConfig cfg;
  try {
    RunConfig& run = cfg.run;
    run.horizon = j.value("horizon", std::size_t{0});
    if (j.contains("eta")) {
      run.eta = j["eta"].is_string() ? eta_from_string(j["eta"].get<std::string>()) : j["eta"].get<double>();
    }
    if (j.contains("loss_bound") && !(j["loss_bound"].is_string() && j["loss_bound"] == "auto")) {
      run.loss_bound = j["loss_bound"].get<double>();
      cfg.loss_bound_auto = false;
    }
    run.seed = j.value("seed", std::uint64_t{0});
    run.algorithm = algorithm_from_string(j.value("algorithm", std::string("scrible")));
    run.update_mode = update_mode_from_string(j.value("update_mode", std::string("argmin")));
    run.pgd_delta = j.value("pgd_delta", run.pgd_delta);
    run.newton_tol = j.value("newton_tol", run.newton_tol);
    run.allow_condition_violation = j.value("allow_condition_violation", false);
    cfg.replications = j.value("replications", std::size_t{1});
    cfg.emit_plot_data = j.value("emit_plot_data", false);

    const json& env = j.at("environment");
    const std::string type = env.value("type", std::string("polytope"));
    EnvironmentSpec& spec = cfg.environment;
    spec.sequence_seed = env.value("sequence_seed", std::uint64_t{0});
    if (type == "polytope") {
      spec.kind = EnvironmentSpec::Kind::polytope;
      if (env.contains("body")) {
        spec.body = polytope_from_json(env["body"]);
      } else {
        spec.body = polytope_from_json(read_json_file(base_dir / env.at("body_file").get<std::string>()));
      }
      spec.sequence = sequence_kind_from_string(env.value("sequence", std::string("rotating")));
      if (env.contains("pattern")) {
        for (const auto& row : env["pattern"]) spec.pattern.push_back(vector_from_json(row));
      }
    } else if (type == "graph") {
      spec.kind = EnvironmentSpec::Kind::graph;
      GraphFile file = env.contains("graph")
                           ? graph_from_json(env["graph"])
                           : graph_from_json(read_json_file(base_dir / env.at("graph_file").get<std::string>()));
      spec.graph = std::move(file.graph);
      spec.delays = std::move(file.delays);
    } else {
      throw ConfigError("environment type must be 'polytope' or 'graph'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (cfg.run.horizon == 0) throw ConfigError("config: horizon must be positive");
  if (cfg.replications == 0) throw ConfigError("config: replications must be positive");
  return cfg;
}

/// One replication with the config's algorithm on a prepared environment.
inline RunTrace run_once(const PreparedEnvironment& prepared, const RunConfig& run) {
  SequenceEnvironment env(prepared.sequence, prepared.body.dimension());
  switch (run.algorithm) {
    case Algorithm::scrible:
      return run_scrible(env, run, make_log_barrier(prepared.body));
    case Algorithm::ftrl_full: {
      const LogBarrier barrier = make_log_barrier(prepared.body);
      double eta = 0.0;
      if (run.eta) {
        eta = *run.eta;
      } else {
        if (run.horizon < 2) throw ConfigError("ftrl_full: auto eta needs a horizon of at least 2");
        eta = theorem_eta(barrier.theta(), barrier.dimension(), run.loss_bound, run.horizon).value;
      }
      RunTrace trace = run_ftrl_full_info(env, eta, barrier, run.horizon, run.newton_tol);
      trace.config = run;
      return trace;
    }
    case Algorithm::bandit_pgd:
      return run_bandit_pgd(env, run, prepared.body);
  }
  throw ConfigError("unknown algorithm");
}

/// Worker count: explicit request, else SCRIBLE_THREADS, else hardware concurrency; never above jobs.
inline std::size_t worker_count(std::size_t requested, std::size_t jobs) {
  std::size_t n = requested;
  if (n == 0) {
    if (const char* env = std::getenv("SCRIBLE_THREADS")) {
      try {
        n = static_cast<std::size_t>(std::stoul(env));
      } catch (const std::exception&) {
        n = 0;
      }
    }
  }
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(n, jobs));
}

/// A replication failed; carries its index and the original exception.
class ReplicationError : public std::runtime_error {
public:
  ReplicationError(std::size_t index, const std::string& what, std::exception_ptr cause)
      : std::runtime_error("replication " + std::to_string(index) + ": " + what), index_(index), cause_(cause) {}

  std::size_t index() const { return index_; }
  std::exception_ptr cause() const { return cause_; }

private:
  std::size_t index_;
  std::exception_ptr cause_;
};

/// Runs job(i) for i in [0, count) on a small pool. The failure with the
/// lowest index is rethrown as a ReplicationError after all workers stop.
inline void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& job) {
  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  std::optional<std::size_t> failed_index;
  std::string failed_what;
  std::exception_ptr failed_cause;
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        job(i);
      } catch (const std::exception& e) {
        std::lock_guard lock(failure_mutex);
        if (!failed_index || i < *failed_index) {
          failed_index = i;
          failed_what = e.what();
          failed_cause = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failed_index) throw ReplicationError(*failed_index, failed_what, failed_cause);
}

struct ExperimentSummary {
  std::string algorithm;
  std::string update_mode;
  std::size_t horizon = 0;
  std::size_t dimension = 0;
  double theta = 0.0;
  double loss_bound = 0.0;
  double eta = 0.0;
  std::size_t replications = 0;
  std::uint64_t base_seed = 0;
  std::vector<double> regrets;
  double mean_regret = 0.0;
  double std_regret = 0.0;
  double bound = 0.0;
  bool bound_satisfied = false;
  double wall_time_seconds = 0.0;
};

inline json summary_to_json(const ExperimentSummary& s) {
  return json{{"algorithm", s.algorithm},
              {"update_mode", s.update_mode},
              {"horizon", s.horizon},
              {"dimension", s.dimension},
              {"theta", s.theta},
              {"loss_bound", s.loss_bound},
              {"eta", s.eta},
              {"replications", s.replications},
              {"base_seed", s.base_seed},
              {"regrets", s.regrets},
              {"mean_regret", s.mean_regret},
              {"std_regret", s.std_regret},
              {"bound", s.bound},
              {"bound_satisfied", s.bound_satisfied},
              {"wall_time_seconds", s.wall_time_seconds}};
}

inline double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

/// Sample standard deviation (0 for fewer than two values).
inline double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

/// Runs every replication (seed_r = base_seed + r), writing trace_r<r>.csv per
/// replication, summary.json and, on request, plot_data.csv into out_dir.
/// Nothing is written when out_dir is empty.
inline ExperimentSummary run_experiment(const ExperimentConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const PreparedEnvironment prepared = prepare_environment(cfg.environment, cfg.run.horizon);
  RunConfig run = cfg.run;
  if (cfg.loss_bound_auto) run.loss_bound = prepared.sequence.declared_bound;

  const std::size_t R = cfg.replications;
  std::vector<RunTrace> traces(R);
  const bool write = !cfg.out_dir.empty();
  if (write) std::filesystem::create_directories(cfg.out_dir);

  parallel_for(R, worker_count(cfg.threads, R), [&](std::size_t r) {
    RunConfig rep = run;
    rep.seed = run.seed + r;
    traces[r] = run_once(prepared, rep);
    if (write) write_trace_csv(cfg.out_dir / ("trace_r" + std::to_string(r) + ".csv"), traces[r]);
  });

  ExperimentSummary s;
  s.algorithm = to_string(run.algorithm);
  s.update_mode = to_string(run.update_mode);
  s.horizon = run.horizon;
  s.dimension = prepared.body.dimension();
  s.theta = static_cast<double>(prepared.body.constraint_count());
  s.loss_bound = run.loss_bound;
  s.eta = traces.front().eta;
  s.replications = R;
  s.base_seed = run.seed;
  for (const auto& t : traces) s.regrets.push_back(t.regret);
  s.mean_regret = mean_of(s.regrets);
  s.std_regret = std_of(s.regrets);
  s.bound = run.horizon >= 2 ? theorem_regret_bound(s.theta, s.dimension, s.loss_bound, run.horizon)
                             : std::numeric_limits<double>::infinity();
  s.bound_satisfied = s.mean_regret <= s.bound;

  if (write && cfg.emit_plot_data) {
    std::ofstream out(cfg.out_dir / "plot_data.csv", std::ios::binary);
    out << "t,mean_regret,bound\n";
    const std::size_t T = run.horizon;
    const std::size_t stride = std::max<std::size_t>(1, T / 256);
    for (std::size_t t = 1; t <= T; ++t) {
      if (t % stride != 0 && t != T && t != 1) continue;
      double m = 0.0;
      for (const auto& tr : traces) m += tr.rounds[t - 1].cumulative_regret;
      m /= static_cast<double>(R);
      const double bound = t >= 2 ? theorem_regret_bound(s.theta, s.dimension, s.loss_bound, t)
                                  : 2.0 * s.loss_bound;
      out << t << ',' << format_number(m) << ',' << format_number(bound) << '\n';
    }
  }

  s.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (write) {
    std::ofstream out(cfg.out_dir / "summary.json", std::ios::binary);
    out << summary_to_json(s).dump(2) << '\n';
  }
  return s;
}

// ---------------------------------------------------------------------------
// SCRiBLe vs BanditPGD comparison

struct BenchRow {
  std::size_t horizon = 0;
  double scrible_mean = 0.0;
  double pgd_mean = 0.0;
  double pgd_delta = 0.0;
  double bound = 0.0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  double scrible_slope = 0.0;
  double pgd_slope = 0.0;
};

/// Least-squares slope of log(y) against log(x); NaN when some y <= 0.
inline double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t k = x.size();
  if (k < 2) return std::numeric_limits<double>::quiet_NaN();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (!(y[i] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double kd = static_cast<double>(k);
  return (kd * sxy - sx * sy) / (kd * sxx - sx * sx);
}

struct BenchOptions {
  std::vector<std::size_t> horizons{1u << 10, 1u << 11, 1u << 12, 1u << 13, 1u << 14};
  std::size_t replications = 10;
  std::uint64_t seed = 1;
  /// PGD delta candidates as multiples of T^{-1/4}; the best mean is reported.
  std::vector<double> delta_multipliers{0.25, 0.5, 1.0};
  std::size_t threads = 0;
};

/// Both learners on the box [-1,1]^2 against the rotating adversary.
inline BenchReport run_bench(const BenchOptions& opt) {
  BenchReport report;
  const ConvexPolytope body = ConvexPolytope::cube(2);
  std::vector<double> xs, scrible_means, pgd_means;
  for (std::size_t T : opt.horizons) {
    EnvironmentSpec spec;
    spec.body = body;
    spec.sequence = SequenceKind::rotating;
    const PreparedEnvironment prepared = prepare_environment(spec, T);

    auto mean_regret = [&](RunConfig run) {
      std::vector<double> regrets(opt.replications);
      parallel_for(opt.replications, worker_count(opt.threads, opt.replications), [&](std::size_t r) {
        RunConfig rep = run;
        rep.seed = run.seed + r;
        regrets[r] = run_once(prepared, rep).regret;
      });
      return mean_of(regrets);
    };

    RunConfig run;
    run.horizon = T;
    run.seed = opt.seed;
    run.loss_bound = prepared.sequence.declared_bound;
    BenchRow row;
    row.horizon = T;
    run.algorithm = Algorithm::scrible;
    row.scrible_mean = mean_regret(run);

    run.algorithm = Algorithm::bandit_pgd;
    row.pgd_mean = std::numeric_limits<double>::infinity();
    for (double mult : opt.delta_multipliers) {
      run.pgd_delta = std::min(0.9, mult * std::pow(static_cast<double>(T), -0.25));
      const double m = mean_regret(run);
      if (m < row.pgd_mean) {
        row.pgd_mean = m;
        row.pgd_delta = run.pgd_delta;
      }
    }
    row.bound = theorem_regret_bound(static_cast<double>(body.constraint_count()), 2, run.loss_bound, T);
    report.rows.push_back(row);
    xs.push_back(static_cast<double>(T));
    scrible_means.push_back(row.scrible_mean);
    pgd_means.push_back(row.pgd_mean);
  }
  report.scrible_slope = log_log_slope(xs, scrible_means);
  report.pgd_slope = log_log_slope(xs, pgd_means);
  return report;
}

}  // namespace scrible
