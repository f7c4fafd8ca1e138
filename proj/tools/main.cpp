// Command-line front end for the experiment drivers. Every subcommand reads
// a JSON config, runs one experiment and writes its tables under --out.
// Exit codes: 0 success, 2 bad configuration, 3 numerical failure.

#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "experiments.hpp"
#include "mixred/common.hpp"
#include "mixred/parallel.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

namespace ex = mixred::experiments;

// Options shared by every subcommand. The sentinel values mean "not given";
// the config file supplies the field unless the flag overrides it.
struct CommonOpts {
  std::string config_path;
  std::string out_dir = ".";
  std::int64_t seed = -1;
  int threads = 0;
  double accuracy = 0.0;
  std::string algorithm;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw mixred::InvalidRange("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "JSON config file")
      ->required();
  cmd->add_option("--seed", opts.seed, "Override the config seed");
  cmd->add_option("--out", opts.out_dir, "Output directory (created if absent)");
  cmd->add_option("--threads", opts.threads,
                  "Worker thread count (results do not depend on it)");
  cmd->add_option("--accuracy", opts.accuracy,
                  "Override the config accuracy (see the subcommand help)");
  cmd->add_option("--algorithm", opts.algorithm,
                  "Reduction algorithm: cholesky, mgs or frequency "
                  "(reduce only)");
}

void check_accuracy(const CommonOpts& opts) {
  if (opts.accuracy != 0.0 && !(opts.accuracy > 0.0 && opts.accuracy < 1.0))
    throw mixred::InvalidRange("--accuracy must lie in (0, 1)");
}

void note_ignored_algorithm(const CommonOpts& opts, const char* subcommand) {
  if (!opts.algorithm.empty() && mixred::log_enabled(mixred::LogLevel::Info))
    mixred::log_message(mixred::LogLevel::Info,
                        std::string(subcommand) + ": --algorithm is ignored");
}

void note_ignored_accuracy(const CommonOpts& opts, const char* subcommand) {
  if (opts.accuracy != 0.0 && mixred::log_enabled(mixred::LogLevel::Info))
    mixred::log_message(mixred::LogLevel::Info,
                        std::string(subcommand) + ": --accuracy is ignored");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app(
      "Gaussian mixture reduction experiments.\n"
      "Each subcommand reads a JSON config (all keys optional) and writes\n"
      "CSV tables plus a JSON report into --out. Runs with the same config\n"
      "and seed produce byte-identical tables, except the seconds column\n"
      "of timing.csv. Set MIXRED_LOG=info or debug for progress output.");
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show the help of every subcommand");

  CommonOpts opts;
  // The selected subcommand installs a prepare step that reads the config
  // and returns the runner; errors in the former exit with kExitConfig,
  // errors in the latter with kExitNumerical.
  std::function<std::function<void()>()> prepare;

  auto* reduce = app.add_subcommand(
      "reduce",
      "Reduce a random univariate mixture at several accuracies.\n"
      "--accuracy A replaces the accuracy list; --algorithm picks one\n"
      "algorithm. Gram-based algorithms use the squared accuracy as their\n"
      "pivot threshold, the frequency algorithm uses it directly.\n"
      "Writes reduce_summary.csv (requested, algorithm, r, actual_error)\n"
      "and reduce_grid_<algorithm>_<i>.csv (x, f, F, rel_err) per accuracy\n"
      "index i, errors relative to max |f| on the grid.");
  add_common(reduce, opts);
  reduce->callback([&] {
    prepare = [&]() -> std::function<void()> {
      auto cfg = ex::parse_reduce_config(read_file(opts.config_path));
      if (opts.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opts.seed);
      check_accuracy(opts);
      if (opts.accuracy > 0.0) cfg.accuracies = {opts.accuracy};
      if (!opts.algorithm.empty()) {
        if (opts.algorithm != "cholesky" && opts.algorithm != "mgs" &&
            opts.algorithm != "frequency")
          throw mixred::InvalidRange("--algorithm must be cholesky, mgs or "
                                     "frequency");
        cfg.algorithms = {opts.algorithm};
      }
      return [cfg, &opts] { ex::run_reduce(cfg, opts.out_dir); };
    };
  });

  auto* timing = app.add_subcommand(
      "timing",
      "Time the pivoted Gram reduction over N and r sweeps.\n"
      "Writes timing.csv (d, N, r, seconds); the seconds column is the\n"
      "only output that varies between reruns. --accuracy and --algorithm\n"
      "are ignored.");
  add_common(timing, opts);
  timing->callback([&] {
    prepare = [&]() -> std::function<void()> {
      auto cfg = ex::parse_timing_config(read_file(opts.config_path));
      if (opts.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opts.seed);
      note_ignored_accuracy(opts, "timing");
      note_ignored_algorithm(opts, "timing");
      return [cfg, &opts] { ex::run_timing(cfg, opts.out_dir); };
    };
  });

  auto* poisson = app.add_subcommand(
      "poisson",
      "Solve the free-space Poisson problem for a random Gaussian forcing\n"
      "term. --accuracy A overrides red_accuracy (the reduction uses A^2 as\n"
      "its pivot threshold). Writes poisson_residuals.csv (point_id,\n"
      "direction, s, h_eps, h_tilde, h) over principal-direction samples:\n"
      "h_eps and h_tilde are the equation residuals of the dense and the\n"
      "reduced solution, h their pointwise difference. poisson_report.json\n"
      "carries term counts and sup-norm ratios.");
  add_common(poisson, opts);
  poisson->callback([&] {
    prepare = [&]() -> std::function<void()> {
      auto cfg = ex::parse_poisson_config(read_file(opts.config_path));
      if (opts.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opts.seed);
      check_accuracy(opts);
      if (opts.accuracy > 0.0) cfg.red_accuracy = opts.accuracy;
      note_ignored_algorithm(opts, "poisson");
      return [cfg, &opts] { ex::run_poisson(cfg, opts.out_dir); };
    };
  });

  auto* elliptic = app.add_subcommand(
      "elliptic",
      "Solve a screened problem with a Gaussian contrast bump through an\n"
      "adapted Gaussian basis. --accuracy A overrides basis_accuracy (the\n"
      "basis selection uses A^2 as its pivot threshold). Writes\n"
      "elliptic_summary.csv (d, k, n_expansion, n_first_pass, n_candidates,\n"
      "n_basis, residual_ratio) and elliptic_report.json.");
  add_common(elliptic, opts);
  elliptic->callback([&] {
    prepare = [&]() -> std::function<void()> {
      auto cfg = ex::parse_elliptic_config(read_file(opts.config_path));
      if (opts.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opts.seed);
      check_accuracy(opts);
      if (opts.accuracy > 0.0) cfg.basis_accuracy = opts.accuracy;
      note_ignored_algorithm(opts, "elliptic");
      return [cfg, &opts] { ex::run_elliptic(cfg, opts.out_dir); };
    };
  });

  auto* kde = app.add_subcommand(
      "kde",
      "Compress a kernel density estimate. d = 1 samples a bimodal line\n"
      "density, d >= 2 a plane mixture embedded in d dimensions (or load\n"
      "points_csv, evaluated on the first two coordinate axes). --accuracy\n"
      "A overrides red_accuracy; unless eps_is_raw is set the reduction\n"
      "uses A^2 as its pivot threshold. Writes kde_grid.csv (x, y, f, F,\n"
      "abs_err) with y = 0 on line grids, and kde_report.json.");
  add_common(kde, opts);
  kde->callback([&] {
    prepare = [&]() -> std::function<void()> {
      auto cfg = ex::parse_kde_config(read_file(opts.config_path));
      if (opts.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opts.seed);
      check_accuracy(opts);
      if (opts.accuracy > 0.0) cfg.red_accuracy = opts.accuracy;
      note_ignored_algorithm(opts, "kde");
      return [cfg, &opts] { ex::run_kde(cfg, opts.out_dir); };
    };
  });

  auto* farfield = app.add_subcommand(
      "farfield",
      "Select skeleton sources reproducing the far field of a source cloud\n"
      "over a separated target ball. --accuracy A overrides red_eps with\n"
      "A^2. Writes farfield_sums.csv (target_id, g_direct, g_skeleton,\n"
      "rel_err) normalized by max |g_direct|, and farfield_report.json.");
  add_common(farfield, opts);
  farfield->callback([&] {
    prepare = [&]() -> std::function<void()> {
      auto cfg = ex::parse_farfield_config(read_file(opts.config_path));
      if (opts.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opts.seed);
      check_accuracy(opts);
      if (opts.accuracy > 0.0) cfg.red_eps = opts.accuracy * opts.accuracy;
      note_ignored_algorithm(opts, "farfield");
      return [cfg, &opts] { ex::run_farfield(cfg, opts.out_dir); };
    };
  });

  auto* equiv = app.add_subcommand(
      "equiv",
      "Replace a source cloud by equivalent sources on an enclosing sphere\n"
      "(candidates are pivoted before the sources). --accuracy A overrides\n"
      "red_eps with A^2. Writes equiv_sums.csv (target_id, g_direct,\n"
      "g_skeleton, rel_err), equiv_selected.csv (coordinates, strength,\n"
      "is_candidate) and equiv_report.json.");
  add_common(equiv, opts);
  equiv->callback([&] {
    prepare = [&]() -> std::function<void()> {
      auto cfg = ex::parse_equiv_config(read_file(opts.config_path));
      if (opts.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opts.seed);
      check_accuracy(opts);
      if (opts.accuracy > 0.0) cfg.red_eps = opts.accuracy * opts.accuracy;
      note_ignored_algorithm(opts, "equiv");
      return [cfg, &opts] { ex::run_equiv(cfg, opts.out_dir); };
    };
  });

  auto* seeds = app.add_subcommand(
      "seeds",
      "Pick representative points of a plane point set (or points_csv) and\n"
      "label every point by its nearest representative. Writes\n"
      "seeds_points.csv (headerless coordinates) and partition_<i>.csv\n"
      "(point_id, label, is_seed) per configured bandwidth. --accuracy and\n"
      "--algorithm are ignored.");
  add_common(seeds, opts);
  seeds->callback([&] {
    prepare = [&]() -> std::function<void()> {
      auto cfg = ex::parse_seeds_config(read_file(opts.config_path));
      if (opts.seed >= 0) cfg.seed = static_cast<std::uint64_t>(opts.seed);
      note_ignored_accuracy(opts, "seeds");
      note_ignored_algorithm(opts, "seeds");
      return [cfg, &opts] { ex::run_seeds(cfg, opts.out_dir); };
    };
  });

  (void)reduce;
  (void)timing;
  (void)poisson;
  (void)elliptic;
  (void)kde;
  (void)farfield;
  (void)equiv;
  (void)seeds;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  if (opts.threads > 0)
    mixred::set_num_threads(static_cast<std::size_t>(opts.threads));

  std::function<void()> run;
  try {
    run = prepare();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  }
  try {
    run();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  }
  return 0;
}
