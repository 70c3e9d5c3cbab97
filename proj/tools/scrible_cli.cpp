// Command-line harness: experiments, barrier verification, the reduction
// oracle and the SCRiBLe vs BanditPGD comparison.

#include <cmath>
#include <exception>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "scrible/scrible.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_usage = 1;
constexpr int exit_check_failed = 2;

int cmd_run(const std::string& config_path, const std::string& out_dir, const std::optional<std::uint64_t>& seed,
            const std::optional<std::size_t>& replications, const std::optional<std::string>& eta,
            const std::optional<std::string>& update_mode, bool emit_plot_data) {
  const std::filesystem::path path(config_path);
  scrible::ExperimentConfig cfg =
      scrible::experiment_config_from_json(scrible::read_json_file(path), path.parent_path());
  if (seed) cfg.run.seed = *seed;
  if (replications) {
    if (*replications == 0) throw scrible::ConfigError("--replications must be positive");
    cfg.replications = *replications;
  }
  if (eta) cfg.run.eta = scrible::eta_from_string(*eta);
  if (update_mode) cfg.run.update_mode = scrible::update_mode_from_string(*update_mode);
  if (emit_plot_data) cfg.emit_plot_data = true;
  cfg.out_dir = out_dir;

  const scrible::ExperimentSummary s = scrible::run_experiment(cfg);
  std::cout << scrible::summary_to_json(s).dump(2) << '\n';
  if (cfg.run.algorithm == scrible::Algorithm::scrible && !s.bound_satisfied) {
    std::cerr << "mean regret " << s.mean_regret << " exceeds the bound " << s.bound << '\n';
    return exit_check_failed;
  }
  return exit_ok;
}

int cmd_check_reduction(std::size_t n, std::size_t T, double eta, std::uint64_t seed) {
  const scrible::ConvexPolytope body = scrible::ConvexPolytope::cube(n);
  const scrible::LossSequence seq =
      scrible::make_oblivious_sequence(scrible::SequenceKind::random_signed, body, T, seed);
  const scrible::ReductionCheck check =
      scrible::enumerate_reduction_check(seq.vectors, scrible::make_log_barrier(body), eta);
  std::cout << "branches " << check.branches << '\n'
            << "lhs " << scrible::format_number(check.lhs) << '\n'
            << "rhs " << scrible::format_number(check.rhs) << '\n'
            << "difference " << scrible::format_number(std::abs(check.lhs - check.rhs)) << '\n'
            << (check.equal ? "EQUAL" : "NOT EQUAL") << '\n';
  return check.equal ? exit_ok : exit_check_failed;
}

int cmd_verify_barrier(const std::string& body_path, std::size_t samples, std::uint64_t seed) {
  using scrible::Vector;
  const scrible::ConvexPolytope body = scrible::polytope_from_json(scrible::read_json_file(body_path));
  const scrible::LogBarrier barrier = scrible::make_log_barrier(body);
  const auto n = static_cast<Eigen::Index>(body.dimension());

  std::size_t concordance_fail = 0, parameter_fail = 0, derivative_fail = 0, dikin_fail = 0;
  double worst_gradient = 0.0, worst_hessian = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    scrible::RandomStream rng(seed, k, scrible::stream_tag::geometry);
    const Vector x = scrible::sample_interior_point(body, rng);
    Vector h(n);
    for (Eigen::Index j = 0; j < n; ++j) h(j) = rng.normal();

    if (!scrible::verify_self_concordance(barrier, x, h, 1e-4)) ++concordance_fail;
    if (!scrible::verify_barrier_parameter(barrier, x, h)) ++parameter_fail;
    const scrible::DerivativeCheck fd = scrible::finite_difference_check(barrier, x);
    worst_gradient = std::max(worst_gradient, fd.gradient_error);
    worst_hessian = std::max(worst_hessian, fd.hessian_error);
    if (fd.gradient_error > 1e-5 || fd.hessian_error > 1e-5) ++derivative_fail;
    const Vector v = 0.999 * h / scrible::local_norm(barrier, x, h);
    if (!body.is_strictly_interior(x + v)) ++dikin_fail;
  }

  std::cout << "dimension " << n << ", constraints " << body.constraint_count() << ", theta "
            << barrier.theta() << ", samples " << samples << '\n'
            << "self-concordance failures   " << concordance_fail << '\n'
            << "barrier-parameter failures  " << parameter_fail << '\n'
            << "finite-difference failures  " << derivative_fail << " (worst gradient "
            << scrible::format_number(worst_gradient) << ", worst Hessian " << scrible::format_number(worst_hessian)
            << ")\n"
            << "Dikin containment failures  " << dikin_fail << '\n';
  const bool ok = concordance_fail + parameter_fail + derivative_fail + dikin_fail == 0;
  std::cout << (ok ? "PASS" : "FAIL") << '\n';
  return ok ? exit_ok : exit_check_failed;
}

int cmd_bench(std::size_t replications, std::uint64_t seed, unsigned min_log2, unsigned max_log2,
              const std::string& out_path) {
  if (min_log2 < 2 || min_log2 > max_log2 || max_log2 > 20) {
    throw scrible::ConfigError("bench: need 2 <= --min-log2 <= --max-log2 <= 20");
  }
  scrible::BenchOptions opt;
  opt.replications = replications;
  opt.seed = seed;
  opt.horizons.clear();
  for (unsigned k = min_log2; k <= max_log2; ++k) opt.horizons.push_back(std::size_t{1} << k);
  const scrible::BenchReport report = scrible::run_bench(opt);

  std::printf("%8s %16s %16s %10s %16s\n", "T", "scrible_regret", "pgd_regret", "pgd_delta", "scrible_bound");
  for (const auto& r : report.rows) {
    std::printf("%8zu %16.4f %16.4f %10.4f %16.4f\n", r.horizon, r.scrible_mean, r.pgd_mean, r.pgd_delta, r.bound);
  }
  std::printf("log-log slope: scrible %.3f, bandit_pgd %.3f\n", report.scrible_slope, report.pgd_slope);

  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    out << "T,scrible_mean_regret,pgd_mean_regret,pgd_delta,scrible_bound\n";
    for (const auto& r : report.rows) {
      out << r.horizon << ',' << scrible::format_number(r.scrible_mean) << ',' << scrible::format_number(r.pgd_mean)
          << ',' << scrible::format_number(r.pgd_delta) << ',' << scrible::format_number(r.bound) << '\n';
    }
  }
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bandit linear optimization with self-concordant regularization"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run an experiment from a JSON config");
  std::string config_path, out_dir;
  std::optional<std::uint64_t> run_seed;
  std::optional<std::size_t> run_replications;
  std::optional<std::string> run_eta, run_update_mode;
  bool emit_plot_data = false;
  run->add_option("--config", config_path, "Experiment config (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory")->required();
  run->add_option("--seed", run_seed, "Base seed (replication r uses seed + r)");
  run->add_option("--replications", run_replications, "Number of replications");
  run->add_option("--eta", run_eta, "Learning rate: auto or a positive number");
  run->add_option("--update-mode", run_update_mode, "argmin or single-newton")
      ->check(CLI::IsMember({"argmin", "single-newton", "single_newton"}));
  run->add_flag("--emit-plot-data", emit_plot_data, "Also write plot_data.csv (t, mean regret, bound)");

  auto* reduction = app.add_subcommand("check-reduction", "Exact expectation check of the bandit reduction");
  std::size_t red_n = 1, red_T = 2;
  double red_eta = 0.05;
  std::uint64_t red_seed = 1;
  reduction->add_option("--n", red_n, "Dimension")->required()->check(CLI::Range(1, 2));
  reduction->add_option("--T", red_T, "Horizon")->required()->check(CLI::Range(1, 16));
  reduction->add_option("--eta", red_eta, "Learning rate")->required()->check(CLI::PositiveNumber);
  reduction->add_option("--seed", red_seed, "Loss sequence seed");

  auto* verify = app.add_subcommand("verify-barrier", "Check log-barrier properties on a polytope file");
  std::string body_path;
  std::size_t samples = 100;
  std::uint64_t verify_seed = 1;
  verify->add_option("--body", body_path, "Polytope JSON {\"A\": ..., \"b\": ...}")
      ->required()
      ->check(CLI::ExistingFile);
  verify->add_option("--samples", samples, "Random interior points to test")->required();
  verify->add_option("--seed", verify_seed, "Sampling seed");

  auto* bench = app.add_subcommand("bench", "SCRiBLe vs BanditPGD regret over T = 2^min..2^max");
  std::size_t bench_replications = 10;
  std::uint64_t bench_seed = 1;
  unsigned min_log2 = 10, max_log2 = 14;
  std::string bench_out;
  bench->add_option("--replications", bench_replications, "Seeds per horizon")->check(CLI::PositiveNumber);
  bench->add_option("--seed", bench_seed, "Base seed");
  bench->add_option("--min-log2", min_log2, "Smallest horizon exponent");
  bench->add_option("--max-log2", max_log2, "Largest horizon exponent");
  bench->add_option("--out", bench_out, "Also write the table as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_usage;
  }

  try {
    try {
      if (*run) return cmd_run(config_path, out_dir, run_seed, run_replications, run_eta, run_update_mode, emit_plot_data);
      if (*reduction) return cmd_check_reduction(red_n, red_T, red_eta, red_seed);
      if (*verify) return cmd_verify_barrier(body_path, samples, verify_seed);
      if (*bench) return cmd_bench(bench_replications, bench_seed, min_log2, max_log2, bench_out);
    } catch (const scrible::ReplicationError& e) {
      std::cerr << e.what() << '\n';
      std::rethrow_exception(e.cause());
    }
  } catch (const scrible::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const scrible::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const scrible::ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::exception& e) {
    std::cerr << "check failed: " << e.what() << '\n';
    return exit_check_failed;
  }
  return exit_usage;
}
