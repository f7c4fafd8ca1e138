#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mixred/gaussian.hpp"
#include "mixred/matrix.hpp"

// Experiment drivers behind the mixred subcommands. Every driver consumes a
// plain config struct, draws all randomness from a splitmix64 stream seeded
// by cfg.seed in a documented order, writes its tables under out_dir and
// returns a summary. Reruns with the same config produce identical files,
// except for the seconds column of the timing table.
namespace mixred::experiments {

// Univariate mixture with coefficients U(-1,1), widths sigma U(0,0.5) and
// centers U(-5,5); per-atom draw order c, sigma, mu.
Mixture line_mixture(std::uint64_t seed, std::size_t n_terms);

// ---------------------------------------------------------------------------
// reduce: skeleton counts and grid errors of the three reduction algorithms
// on the random univariate mixture.

struct ReduceConfig {
  std::uint64_t seed = 12345;
  std::size_t n_terms = 10000;
  // Requested accuracies; the pivot threshold of the Gram algorithms is the
  // square of each value, the frequency algorithm takes it as given.
  std::vector<double> accuracies = {1e-3, 1e-5, 1e-7};
  std::vector<std::string> algorithms = {"cholesky", "mgs", "frequency"};
  std::size_t grid_n = 2048;
  double grid_halfwidth = 6.5;
  bool write_grids = true;
};

struct ReduceRow {
  double requested = 0.0;
  std::string algorithm;
  std::size_t r = 0;
  double actual_error = 0.0;          // max grid error over max |f|
  std::vector<std::size_t> skeleton;  // selected indices, sorted
};

struct ReduceReport {
  std::vector<ReduceRow> rows;
};

// Writes reduce_summary.csv (requested, algorithm, r, actual_error) and, when
// write_grids is set, reduce_grid_<algorithm>_<i>.csv (x, f, F, rel_err) per
// accuracy index i.
ReduceReport run_reduce(const ReduceConfig& cfg, const std::string& out_dir);

// ---------------------------------------------------------------------------
// timing: wall time of the pivoted Gram reduction over N and r sweeps.

struct TimingConfig {
  std::uint64_t seed = 2024;
  std::vector<std::size_t> dims = {1, 5};
  std::size_t fixed_r = 100;
  std::vector<std::size_t> n_values = {10000, 20000, 40000, 80000, 160000};
  std::size_t fixed_n = 10000;
  std::vector<std::size_t> r_values = {100, 200, 400, 800, 1600};
  std::size_t repeats = 1;  // reported time is the fastest of this many runs
};

struct TimingRow {
  std::size_t d = 0;
  std::size_t n = 0;
  std::size_t r = 0;
  double seconds = 0.0;
};

struct TimingReport {
  std::vector<TimingRow> rows;
};

// Writes timing.csv (d, N, r, seconds). Coefficients are U(-1,1), centers
// U(-25,25)^d and covariances U D U^T with D uniform in (0, 0.01); the
// reduction runs with a rank cap and no accuracy threshold.
TimingReport run_timing(const TimingConfig& cfg, const std::string& out_dir);

// ---------------------------------------------------------------------------
// poisson: free-space solve with a random Gaussian forcing term.

struct PoissonConfig {
  std::uint64_t seed = 3;
  std::size_t d = 3;
  std::size_t n_rhs = 1;
  double exp_eps = 1e-14;
  double exp_delta = 1e-10;
  double exp_r_max = 1e10;
  double coeff_trunc = 1e-10;
  double red_accuracy = 1e-7;  // pivot threshold is the square
  std::size_t n_s = 10;        // samples per principal direction
  double decay = 1e-10;        // atom level defining the sampling radius
};

struct PoissonReport {
  std::size_t n_expansion = 0;  // kernel terms
  std::size_t n_total = 0;      // solution terms after the coefficient cut
  std::size_t n_reduced = 0;
  double h_eps_ratio = 0.0;     // |laplacian residual|_inf / |f|_inf, dense
  double h_tilde_ratio = 0.0;   // same for the reduced solution
  double u_diff_ratio = 0.0;    // |u_dense - u_reduced|_inf / |u_dense|_inf
};

// Writes poisson_residuals.csv (point_id, direction, s, h_eps, h_tilde, h)
// over the principal-direction samples and poisson_report.json. The forcing
// atoms have unit-peak normalization with c ~ N(0,1), mu ~ N(0, I) and
// Sigma = U^T U + I/10 for a standard normal d x d matrix U; per-atom draw
// order c, mu, U (row by row).
PoissonReport run_poisson(const PoissonConfig& cfg, const std::string& out_dir);

// ---------------------------------------------------------------------------
// elliptic: variable-coefficient screened solve via a one-step basis.

struct EllipticConfig {
  std::uint64_t seed = 5;
  std::size_t d = 3;
  double k = 1.0;
  bool aligned = true;   // bump and forcing share principal directions
  double eig_lo = 0.1;   // smallest fixed eigenvalue of both covariances
  double eig_hi = 20.0;  // largest; the rest are U(eig_lo, eig_hi)
  double exp_eps = 1e-10;
  double exp_delta = 1e-7;
  double exp_r_max = 1e2;
  double coeff_trunc = 1e-10;
  double basis_accuracy = 2e-7;     // basis selection, threshold squared
  std::size_t n_s = 10;             // frequency samples per principal axis
};

struct EllipticReport {
  std::size_t n_expansion = 0;
  std::size_t n_first_pass = 0;  // atoms representing the constant-coefficient solve
  std::size_t n_candidates = 0;
  std::size_t n_basis = 0;
  double residual_ratio = 0.0;  // max |transformed residual| / max |transformed f|
};

// Writes elliptic_summary.csv (d, k, n_expansion, n_first_pass, n_candidates,
// n_basis, residual_ratio) and elliptic_report.json. Covariances are
// U D U^T with the first two eigenvalues pinned to eig_lo and eig_hi, the
// rest U(eig_lo, eig_hi), and the diagonal randomly permuted; draw order
// U (and a second frame when not aligned), D_bump extras, its permutation,
// D_f extras, its permutation.
EllipticReport run_elliptic(const EllipticConfig& cfg, const std::string& out_dir);

// ---------------------------------------------------------------------------
// kde: density estimate compression; d = 1 is the bimodal line experiment,
// d >= 2 the rotated-plane one.

struct KdeConfig {
  std::uint64_t seed = 17;
  std::size_t d = 1;
  std::size_t n_points = 100000;
  double bandwidth = 0.0;        // 0: Silverman rule at the effective dimension
  std::size_t d_eff = 0;         // 0: ambient dimension
  double red_accuracy = 1e-7;    // pivot threshold is the square
  bool eps_is_raw = false;       // take red_accuracy as the threshold itself
  std::size_t grid_n = 0;        // 0: 2048 on a line, 64 per side on a plane
  double grid_halfwidth = 8.0;   // plane grid half extent (line: data +- 5h)
  std::string points_csv;        // optional input points, headerless CSV
};

struct KdeReport {
  std::size_t d = 0;
  std::size_t n_points = 0;
  double bandwidth = 0.0;
  std::size_t n_reduced = 0;
  double max_abs_err = 0.0;    // max |f - F| over the grid
  double plane_scale = 1.0;    // (2 pi h^2)^{(d-2)/2} for plane grids, else 1
};

// Writes kde_grid.csv (x, y, f, F, abs_err) over the evaluation grid (y = 0
// on line grids) and kde_report.json. Samples come from the two-component
// normal mixtures of the line and plane experiments; per-point draw order
// pick, n1, n2 (after the rotation frame for d >= 2).
KdeReport run_kde(const KdeConfig& cfg, const std::string& out_dir);

// ---------------------------------------------------------------------------
// farfield: skeleton sources for well-separated sum evaluation.

struct FarfieldConfig {
  std::uint64_t seed = 23;
  std::size_t d = 3;
  std::size_t n_sources = 10000;
  std::size_t n_targets = 1000;
  double exp_eps = 1e-12;
  double red_eps = 1e-12;  // pivot threshold on the normalized ball Gram
  double shift = 2.0;      // ball centers at +- shift * e_1
};

struct FarfieldReport {
  std::size_t d = 0;
  std::size_t n_selected = 0;
  double dist_near = 0.0;
  double dist_far = 0.0;
  double max_rel_err = 0.0;  // max |g - g_skel| / max |g|
};

// Writes farfield_sums.csv (target_id, g_direct, g_skeleton, rel_err) with
// rel_err normalized by max |g_direct|, and farfield_report.json. Sources
// are planar normals rotated into d dimensions, rescaled to the unit ball
// and shifted by +shift e_1; targets are full-dimensional normals rescaled
// and shifted by -shift e_1; strengths are U(0,1). Draw order: source pairs,
// rotation frame, targets, strengths. The summed kernel is r^(2-d) for
// d <= 5 and 1/r above; selection always uses the three-dimensional ball
// inner product.
FarfieldReport run_farfield(const FarfieldConfig& cfg, const std::string& out_dir);

// ---------------------------------------------------------------------------
// equiv: equivalent sources on a sphere enclosing the true sources.

struct EquivConfig {
  std::uint64_t seed = 29;
  std::size_t d = 2;  // 2 or 3
  std::size_t n_sources = 1000;
  std::size_t n_targets = 1000;
  std::size_t k_theta = 30;  // ring size (d = 2) or azimuthal count (d = 3)
  std::size_t l_phi = 10;    // polar count (d = 3 only)
  double exp_eps = 1e-12;
  double red_eps = 1e-11;
  double shift = 2.0;
  double source_radius = 0.9;
  double target_radius = 1.0;
};

struct EquivReport {
  std::size_t d = 0;
  std::size_t n_candidates = 0;
  std::size_t n_selected = 0;   // combined skeleton size
  std::size_t n_from_ring = 0;  // selected candidates among them
  double max_rel_err = 0.0;
};

// Writes equiv_sums.csv (target_id, g_direct, g_skeleton, rel_err),
// equiv_selected.csv (coords..., strength, is_candidate) and
// equiv_report.json. Sources/targets are rescaled normal clouds in balls of
// source_radius/target_radius around +- shift e_1; candidates sit on the
// unit sphere around the source center (equispaced angles; in d = 3 the
// polar angles are Gauss-Legendre nodes). Draw order: sources, targets,
// strengths.
EquivReport run_equiv(const EquivConfig& cfg, const std::string& out_dir);

// ---------------------------------------------------------------------------
// seeds: pivot-selected representatives partitioning a plane point set.

struct SeedsConfig {
  std::uint64_t seed = 31;
  std::size_t n_points = 2000;
  // Paired sweeps: bandwidths[i] with n_seeds[i] requested seeds.
  std::vector<double> bandwidths = {200.0, 16.0};
  std::vector<std::size_t> n_seeds = {4, 10};
  std::string points_csv;  // optional input points, headerless CSV
};

struct SeedsRun {
  double bandwidth = 0.0;
  std::vector<std::size_t> seeds;   // indices into the point set
  std::vector<std::size_t> labels;  // per point, index into seeds
};

struct SeedsReport {
  std::vector<SeedsRun> runs;
};

// Writes seeds_points.csv (headerless coordinates) and, per sweep i,
// partition_<i>.csv (point_id, label, is_seed). Points are drawn from the
// plane mixture of the kde experiment without the embedding rotation;
// per-point draw order pick, n1, n2.
SeedsReport run_seeds(const SeedsConfig& cfg, const std::string& out_dir);

// ---------------------------------------------------------------------------
// JSON config parsing. Each accepts an object with keys named after the
// struct fields (all optional) and throws mixred::InvalidRange with the
// offending key on a value of the wrong type or out of range.

ReduceConfig parse_reduce_config(const std::string& json_text);
TimingConfig parse_timing_config(const std::string& json_text);
PoissonConfig parse_poisson_config(const std::string& json_text);
EllipticConfig parse_elliptic_config(const std::string& json_text);
KdeConfig parse_kde_config(const std::string& json_text);
FarfieldConfig parse_farfield_config(const std::string& json_text);
EquivConfig parse_equiv_config(const std::string& json_text);
SeedsConfig parse_seeds_config(const std::string& json_text);

}  // namespace mixred::experiments
