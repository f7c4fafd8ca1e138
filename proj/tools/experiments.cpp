#include "experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <set>
#include <utility>

#include <json.hpp>

#include "mixred/common.hpp"
#include "mixred/elliptic.hpp"
#include "mixred/farfield.hpp"
#include "mixred/io.hpp"
#include "mixred/kde.hpp"
#include "mixred/kernel_expansion.hpp"
#include "mixred/linalg.hpp"
#include "mixred/poisson.hpp"
#include "mixred/quadrature.hpp"
#include "mixred/reduction.hpp"
#include "mixred/rng.hpp"

namespace mixred::experiments {

namespace {

using nlohmann::json;

void require(bool ok, const std::string& msg) {
  if (!ok) throw InvalidRange("config: " + msg);
}

// Pulls typed fields out of a config object and rejects keys it never saw,
// so a misspelled option fails instead of silently using the default.
class Fields {
 public:
  explicit Fields(const json& j) : j_(j) {
    require(j.is_object(), "expected a JSON object");
  }

  void take(const char* key, double& out) {
    if (const json* v = find(key)) {
      require(v->is_number(), std::string(key) + " must be a number");
      out = v->get<double>();
    }
  }

  void take(const char* key, std::size_t& out) {
    if (const json* v = find(key)) {
      require(v->is_number_integer() && v->get<std::int64_t>() >= 0,
              std::string(key) + " must be a non-negative integer");
      out = static_cast<std::size_t>(v->get<std::int64_t>());
    }
  }

  void take(const char* key, bool& out) {
    if (const json* v = find(key)) {
      require(v->is_boolean(), std::string(key) + " must be a boolean");
      out = v->get<bool>();
    }
  }

  void take(const char* key, std::string& out) {
    if (const json* v = find(key)) {
      require(v->is_string(), std::string(key) + " must be a string");
      out = v->get<std::string>();
    }
  }

  void take(const char* key, std::vector<double>& out) {
    if (const json* v = find(key)) {
      require(v->is_array(), std::string(key) + " must be an array");
      out.clear();
      for (const auto& e : *v) {
        require(e.is_number(), std::string(key) + " entries must be numbers");
        out.push_back(e.get<double>());
      }
    }
  }

  void take(const char* key, std::vector<std::size_t>& out) {
    if (const json* v = find(key)) {
      require(v->is_array(), std::string(key) + " must be an array");
      out.clear();
      for (const auto& e : *v) {
        require(e.is_number_integer() && e.get<std::int64_t>() >= 0,
                std::string(key) + " entries must be non-negative integers");
        out.push_back(static_cast<std::size_t>(e.get<std::int64_t>()));
      }
    }
  }

  void take(const char* key, std::vector<std::string>& out) {
    if (const json* v = find(key)) {
      require(v->is_array(), std::string(key) + " must be an array");
      out.clear();
      for (const auto& e : *v) {
        require(e.is_string(), std::string(key) + " entries must be strings");
        out.push_back(e.get<std::string>());
      }
    }
  }

  void finish() const {
    for (const auto& item : j_.items())
      require(seen_.count(item.key()) != 0, "unknown key '" + item.key() + "'");
  }

 private:
  const json* find(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  const json& j_;
  std::set<std::string> seen_;
};

json parse_object(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidRange(std::string("config: ") + e.what());
  }
  return j;
}

std::string join(const std::string& dir, const std::string& name) {
  if (dir.empty() || dir == ".") return name;
  return (std::filesystem::path(dir) / name).string();
}

void ensure_dir(const std::string& dir) {
  if (!dir.empty() && dir != ".") std::filesystem::create_directories(dir);
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InvalidRange("cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
}

double max_abs(const Vec& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double sq(double x) { return x * x; }

// Symmetric product U diag(D) U^T, row-major.
Vec frame_times_diag(const Mat& u, const Vec& diag) {
  std::size_t d = diag.size();
  Vec full(d * d, 0.0);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b <= a; ++b) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += u(a, j) * diag[j] * u(b, j);
      full[a * d + b] = s;
      full[b * d + a] = s;
    }
  return full;
}

}  // namespace

Mixture line_mixture(std::uint64_t seed, std::size_t n_terms) {
  Rng rng(seed);
  Mixture m;
  m.dim = 1;
  m.coeffs.reserve(n_terms);
  m.atoms.reserve(n_terms);
  for (std::size_t i = 0; i < n_terms; ++i) {
    double c = rng.uniform(-1.0, 1.0);
    double sigma = rng.uniform(0.0, 0.5);
    double mu = rng.uniform(-5.0, 5.0);
    GaussianAtom a = make_atom(Vec{mu}, Covariance::iso(1, sigma * sigma));
    m.coeffs.push_back(c * std::exp(-a.log_norm));
    m.atoms.push_back(std::move(a));
  }
  return m;
}

// ---------------------------------------------------------------------------
// reduce

ReduceReport run_reduce(const ReduceConfig& cfg, const std::string& out_dir) {
  ensure_dir(out_dir);
  Mixture m = line_mixture(cfg.seed, cfg.n_terms);

  std::size_t gn = cfg.grid_n;
  std::vector<Vec> grid;
  grid.reserve(gn);
  for (std::size_t i = 0; i < gn; ++i) {
    double x = -cfg.grid_halfwidth + 2.0 * cfg.grid_halfwidth *
                                         static_cast<double>(i) /
                                         static_cast<double>(gn - 1);
    grid.push_back(Vec{x});
  }
  Vec f = mixture_eval(m, grid);
  double fmax = max_abs(f);

  ReduceReport rep;
  std::vector<std::vector<std::string>> summary;
  for (std::size_t ai = 0; ai < cfg.accuracies.size(); ++ai) {
    double delta = cfg.accuracies[ai];
    for (const std::string& alg : cfg.algorithms) {
      ReduceResult r;
      if (alg == "cholesky") {
        r = cholesky_reduce(m, sq(delta));
      } else if (alg == "mgs") {
        r = mgs_reduce(m, sq(delta));
      } else {
        r = frequency_reduce_1d(m, delta);
      }
      Mixture red = select_mixture(m, r);
      Vec fr = mixture_eval(red, grid);

      double emax = 0.0;
      std::vector<std::vector<std::string>> grid_rows;
      if (cfg.write_grids) grid_rows.reserve(gn);
      for (std::size_t i = 0; i < gn; ++i) {
        double rel = std::abs(f[i] - fr[i]) / fmax;
        emax = std::max(emax, rel);
        if (cfg.write_grids)
          grid_rows.push_back({fmt_g17(grid[i][0]), fmt_g17(f[i]),
                               fmt_g17(fr[i]), fmt_g17(rel)});
      }
      if (cfg.write_grids) {
        std::string name =
            "reduce_grid_" + alg + "_" + std::to_string(ai) + ".csv";
        write_csv(join(out_dir, name), {"x", "f", "F", "rel_err"}, grid_rows);
      }

      ReduceRow row;
      row.requested = delta;
      row.algorithm = alg;
      row.r = r.rank;
      row.actual_error = emax;
      row.skeleton = r.skeleton;
      std::sort(row.skeleton.begin(), row.skeleton.end());
      summary.push_back({fmt_g17(delta), alg, std::to_string(r.rank),
                         fmt_g17(emax)});
      rep.rows.push_back(std::move(row));
      if (log_enabled(LogLevel::Info))
        log_message(LogLevel::Info, "reduce: " + alg + " at " +
                                        fmt_g17(delta) + " kept " +
                                        std::to_string(r.rank) + " terms");
    }
  }
  write_csv(join(out_dir, "reduce_summary.csv"),
            {"requested", "algorithm", "r", "actual_error"}, summary);
  return rep;
}

// ---------------------------------------------------------------------------
// timing

namespace {

Mixture timing_mixture(std::uint64_t seed, std::size_t d, std::size_t n) {
  Rng rng(seed);
  Mixture m;
  m.dim = d;
  m.coeffs.reserve(n);
  m.atoms.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double c = rng.uniform(-1.0, 1.0);
    Vec mu(d);
    for (std::size_t j = 0; j < d; ++j) mu[j] = rng.uniform(-25.0, 25.0);
    GaussianAtom a;
    if (d == 1) {
      a = make_atom(std::move(mu), Covariance::iso(1, rng.uniform(0.0, 0.01)));
    } else {
      Vec diag(d);
      for (std::size_t j = 0; j < d; ++j) diag[j] = rng.uniform(0.0, 0.01);
      Mat u = random_unitary(d, rng);
      a = make_atom(std::move(mu), Covariance::full(d, frame_times_diag(u, diag)));
    }
    m.coeffs.push_back(c * std::exp(-a.log_norm));
    m.atoms.push_back(std::move(a));
  }
  return m;
}

TimingRow time_one(std::uint64_t seed, std::size_t d, std::size_t n,
                   std::size_t r, std::size_t repeats) {
  Mixture m = timing_mixture(seed, d, n);
  GramFn gram = mixture_gram(m);
  ReduceOptions opt;
  opt.eps = 0.0;
  opt.max_rank = r;
  double best = std::numeric_limits<double>::infinity();
  std::size_t rank = 0;
  for (std::size_t rep = 0; rep < std::max<std::size_t>(repeats, 1); ++rep) {
    auto t0 = std::chrono::steady_clock::now();
    ReduceResult res = pivoted_gram_reduce(n, gram, m.coeffs, opt);
    auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double>(t1 - t0).count());
    rank = res.rank;
  }
  if (log_enabled(LogLevel::Info))
    log_message(LogLevel::Info,
                "timing: d=" + std::to_string(d) + " N=" + std::to_string(n) +
                    " r=" + std::to_string(rank) + " took " + fmt_g17(best) +
                    " s");
  return {d, n, r, best};
}

}  // namespace

TimingReport run_timing(const TimingConfig& cfg, const std::string& out_dir) {
  ensure_dir(out_dir);
  TimingReport rep;
  for (std::size_t d : cfg.dims) {
    for (std::size_t n : cfg.n_values)
      rep.rows.push_back(time_one(cfg.seed, d, n, cfg.fixed_r, cfg.repeats));
    for (std::size_t r : cfg.r_values)
      rep.rows.push_back(time_one(cfg.seed, d, cfg.fixed_n, r, cfg.repeats));
  }
  std::vector<std::vector<std::string>> rows;
  rows.reserve(rep.rows.size());
  for (const auto& t : rep.rows)
    rows.push_back({std::to_string(t.d), std::to_string(t.n),
                    std::to_string(t.r), fmt_g17(t.seconds)});
  write_csv(join(out_dir, "timing.csv"), {"d", "N", "r", "seconds"}, rows);
  return rep;
}

// ---------------------------------------------------------------------------
// poisson

namespace {

Mixture poisson_forcing(std::uint64_t seed, std::size_t d, std::size_t n_rhs) {
  Rng rng(seed);
  Mixture f;
  f.dim = d;
  for (std::size_t t = 0; t < n_rhs; ++t) {
    double c = rng.normal();
    Vec mu(d);
    for (std::size_t j = 0; j < d; ++j) mu[j] = rng.normal();
    Mat u(d, d);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) u(a, b) = rng.normal();
    // Sigma = U^T U + I / 10 keeps the spectrum off zero.
    Vec full(d * d, 0.0);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b <= a; ++b) {
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j) s += u(j, a) * u(j, b);
        if (a == b) s += 0.1;
        full[a * d + b] = s;
        full[b * d + a] = s;
      }
    GaussianAtom g = make_atom(std::move(mu), Covariance::full(d, full));
    f.coeffs.push_back(c * std::exp(-g.log_norm));
    f.atoms.push_back(std::move(g));
  }
  return f;
}

}  // namespace

PoissonReport run_poisson(const PoissonConfig& cfg, const std::string& out_dir) {
  ensure_dir(out_dir);
  KernelExpansion e =
      power_kernel_expansion(cfg.d, cfg.exp_eps, cfg.exp_delta, cfg.exp_r_max);
  Mixture f = poisson_forcing(cfg.seed, cfg.d, cfg.n_rhs);

  std::vector<Vec> pts = principal_direction_samples(f, cfg.n_s, cfg.decay);
  Vec fvals = mixture_eval(f, pts);
  double fmax = max_abs(fvals);

  PoissonSolution sol =
      poisson_solve(f, e, cfg.coeff_trunc, sq(cfg.red_accuracy));
  Vec h_eps = residual_laplacian(sol.dense, f, pts);
  Vec h_tilde = residual_laplacian(sol.reduced, f, pts);
  Vec u_dense = mixture_eval(sol.dense, pts);
  Vec u_red = mixture_eval(sol.reduced, pts);

  // Rows follow the sample layout: atom-major, axis, then offset along it.
  std::vector<std::vector<std::string>> rows;
  rows.reserve(pts.size());
  std::size_t idx = 0;
  double udiff = 0.0;
  for (std::size_t i = 0; i < f.atoms.size(); ++i) {
    EigenDecomposition ed = sym_eigen(f.atoms[i].cov.dense());
    for (std::size_t j = 0; j < cfg.d; ++j) {
      double lam = std::max(ed.values[j], 0.0);
      double sj = std::sqrt(-2.0 * lam * std::log(cfg.decay));
      for (std::size_t k = 0; k < cfg.n_s; ++k) {
        double s = -sj + static_cast<double>(k) * 2.0 * sj /
                             static_cast<double>(cfg.n_s - 1);
        double diff = u_dense[idx] - u_red[idx];
        udiff = std::max(udiff, std::abs(diff));
        rows.push_back({std::to_string(idx), std::to_string(i * cfg.d + j),
                        fmt_g17(s), fmt_g17(h_eps[idx]), fmt_g17(h_tilde[idx]),
                        fmt_g17(diff)});
        ++idx;
      }
    }
  }
  write_csv(join(out_dir, "poisson_residuals.csv"),
            {"point_id", "direction", "s", "h_eps", "h_tilde", "h"}, rows);

  PoissonReport rep;
  rep.n_expansion = e.weights.size();
  rep.n_total = sol.dense.atoms.size();
  rep.n_reduced = sol.reduced.atoms.size();
  rep.h_eps_ratio = max_abs(h_eps) / fmax;
  rep.h_tilde_ratio = max_abs(h_tilde) / fmax;
  rep.u_diff_ratio = udiff / max_abs(u_dense);

  json j;
  j["d"] = cfg.d;
  j["n_expansion"] = rep.n_expansion;
  j["n_total"] = rep.n_total;
  j["n_reduced"] = rep.n_reduced;
  j["h_eps_ratio"] = rep.h_eps_ratio;
  j["h_tilde_ratio"] = rep.h_tilde_ratio;
  j["u_diff_ratio"] = rep.u_diff_ratio;
  write_json(join(out_dir, "poisson_report.json"), j);
  return rep;
}

// ---------------------------------------------------------------------------
// elliptic

namespace {

// Eigenvalues lo and hi pinned, the rest uniform between them, in a random
// arrangement along the diagonal.
Vec pinned_spectrum(std::size_t d, double lo, double hi, Rng& rng) {
  Vec diag(d, lo);
  if (d > 1) diag[1] = hi;
  for (std::size_t j = 2; j < d; ++j) diag[j] = rng.uniform(lo, hi);
  for (std::size_t i = d; i-- > 1;) {
    std::size_t j = static_cast<std::size_t>(rng.uniform() *
                                             static_cast<double>(i + 1));
    std::swap(diag[i], diag[j]);
  }
  return diag;
}

}  // namespace

EllipticReport run_elliptic(const EllipticConfig& cfg, const std::string& out_dir) {
  ensure_dir(out_dir);
  std::size_t d = cfg.d;
  Rng rng(cfg.seed);
  Mat u_bump = random_unitary(d, rng);
  Mat u_f = cfg.aligned ? u_bump : random_unitary(d, rng);
  Vec spec_bump = pinned_spectrum(d, cfg.eig_lo, cfg.eig_hi, rng);
  Vec spec_f = pinned_spectrum(d, cfg.eig_lo, cfg.eig_hi, rng);

  EllipticProblem p;
  p.k = cfg.k;
  Vec mu_bump(d, 0.0);
  mu_bump[0] = 1.0;
  GaussianAtom gb = make_atom(std::move(mu_bump),
                              Covariance::full(d, frame_times_diag(u_bump, spec_bump)));
  p.bump = {gb, std::exp(-gb.log_norm)};
  GaussianAtom gf =
      make_atom(Vec(d, 0.0), Covariance::full(d, frame_times_diag(u_f, spec_f)));
  p.f.dim = d;
  p.f.coeffs = {std::exp(-gf.log_norm)};
  p.f.atoms = {gf};

  KernelExpansion e = helmholtz_kernel_expansion(d, cfg.k, cfg.exp_eps,
                                                 cfg.exp_delta, cfg.exp_r_max);
  Mixture u0 = elliptic_initial_guess(p, e, cfg.coeff_trunc);
  if (log_enabled(LogLevel::Info))
    log_message(LogLevel::Info, "elliptic: first pass kept " +
                                    std::to_string(u0.atoms.size()) + " terms");
  std::vector<GaussianAtom> cands = elliptic_candidates(p, e, u0);
  Mixture basis = elliptic_reduce_basis(d, cands, sq(cfg.basis_accuracy));
  if (log_enabled(LogLevel::Info))
    log_message(LogLevel::Info, "elliptic: basis kept " +
                                    std::to_string(basis.atoms.size()) + " of " +
                                    std::to_string(cands.size()));
  Mixture u = elliptic_galerkin_solve(p, basis);
  double resid = elliptic_residual_fourier(p, u, cfg.n_s);

  EllipticReport rep;
  rep.n_expansion = e.weights.size();
  rep.n_first_pass = u0.atoms.size();
  rep.n_candidates = cands.size();
  rep.n_basis = basis.atoms.size();
  rep.residual_ratio = resid;

  write_csv(join(out_dir, "elliptic_summary.csv"),
            {"d", "k", "n_expansion", "n_first_pass", "n_candidates", "n_basis",
             "residual_ratio"},
            {{std::to_string(d), fmt_g17(cfg.k), std::to_string(rep.n_expansion),
              std::to_string(rep.n_first_pass), std::to_string(rep.n_candidates),
              std::to_string(rep.n_basis), fmt_g17(rep.residual_ratio)}});

  json j;
  j["d"] = d;
  j["k"] = cfg.k;
  j["aligned"] = cfg.aligned;
  j["n_expansion"] = rep.n_expansion;
  j["n_first_pass"] = rep.n_first_pass;
  j["n_candidates"] = rep.n_candidates;
  j["n_basis"] = rep.n_basis;
  j["residual_ratio"] = rep.residual_ratio;
  write_json(join(out_dir, "elliptic_report.json"), j);
  return rep;
}

// ---------------------------------------------------------------------------
// kde

KdeReport run_kde(const KdeConfig& cfg, const std::string& out_dir) {
  ensure_dir(out_dir);
  Rng rng(cfg.seed);

  std::vector<Vec> pts;
  Mat basis;
  std::size_t d = cfg.d;
  if (!cfg.points_csv.empty()) {
    pts = load_points_csv(cfg.points_csv);
    if (pts.empty()) throw EmptyPointSet("kde: no points in " + cfg.points_csv);
    d = pts[0].size();
    basis = Mat::identity(d);
  } else if (d == 1) {
    pts.reserve(cfg.n_points);
    for (std::size_t i = 0; i < cfg.n_points; ++i) {
      double pick = rng.uniform();
      double z = rng.normal();
      pts.push_back(Vec{pick < 0.5 ? z : 4.0 + z});
    }
  } else {
    pts = rotated_plane_dataset(d, cfg.n_points, rng, &basis);
  }

  std::size_t d_eff = cfg.d_eff == 0 ? d : cfg.d_eff;
  double h = cfg.bandwidth > 0.0 ? cfg.bandwidth
                                 : silverman_bandwidth(d_eff, pts.size());
  Mixture m = kde_build(pts, h);
  double eps = cfg.eps_is_raw ? cfg.red_accuracy : sq(cfg.red_accuracy);
  ReduceResult res = kde_reduce(m, eps);
  Mixture red = select_mixture(m, res);
  if (log_enabled(LogLevel::Info))
    log_message(LogLevel::Info, "kde: kept " + std::to_string(res.rank) +
                                    " of " + std::to_string(pts.size()) +
                                    " kernels at bandwidth " + fmt_g17(h));

  KdeReport rep;
  rep.d = d;
  rep.n_points = pts.size();
  rep.bandwidth = h;
  rep.n_reduced = res.rank;

  std::vector<std::vector<std::string>> rows;
  if (d == 1) {
    std::size_t gn = cfg.grid_n == 0 ? 2048 : cfg.grid_n;
    double xmin = pts[0][0], xmax = pts[0][0];
    for (const auto& x : pts) {
      xmin = std::min(xmin, x[0]);
      xmax = std::max(xmax, x[0]);
    }
    xmin -= 5.0 * h;
    xmax += 5.0 * h;
    std::vector<Vec> grid;
    grid.reserve(gn);
    for (std::size_t i = 0; i < gn; ++i)
      grid.push_back(Vec{xmin + (xmax - xmin) * static_cast<double>(i) /
                                    static_cast<double>(gn - 1)});
    Vec fv = mixture_eval(m, grid);
    Vec fr = mixture_eval(red, grid);
    rows.reserve(gn);
    for (std::size_t i = 0; i < gn; ++i) {
      double err = std::abs(fv[i] - fr[i]);
      rep.max_abs_err = std::max(rep.max_abs_err, err);
      rows.push_back({fmt_g17(grid[i][0]), fmt_g17(0.0), fmt_g17(fv[i]),
                      fmt_g17(fr[i]), fmt_g17(err)});
    }
  } else {
    std::size_t gn = cfg.grid_n == 0 ? 64 : cfg.grid_n;
    double hw = cfg.grid_halfwidth;
    std::vector<Vec> grid;
    std::vector<std::pair<double, double>> plane;
    grid.reserve(gn * gn);
    plane.reserve(gn * gn);
    for (std::size_t ix = 0; ix < gn; ++ix) {
      double t1 = -hw + 2.0 * hw * static_cast<double>(ix) /
                            static_cast<double>(gn - 1);
      for (std::size_t iy = 0; iy < gn; ++iy) {
        double t2 = -hw + 2.0 * hw * static_cast<double>(iy) /
                              static_cast<double>(gn - 1);
        Vec y(d, 0.0);
        for (std::size_t j = 0; j < d; ++j)
          y[j] = t1 * basis(j, 0) + t2 * basis(j, 1);
        grid.push_back(std::move(y));
        plane.emplace_back(t1, t2);
      }
    }
    Vec fv = mixture_eval(m, grid);
    Vec fr = mixture_eval(red, grid);
    rows.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      double err = std::abs(fv[i] - fr[i]);
      rep.max_abs_err = std::max(rep.max_abs_err, err);
      rows.push_back({fmt_g17(plane[i].first), fmt_g17(plane[i].second),
                      fmt_g17(fv[i]), fmt_g17(fr[i]), fmt_g17(err)});
    }
    rep.plane_scale =
        std::pow(2.0 * std::numbers::pi * h * h, 0.5 * static_cast<double>(d - 2));
  }
  write_csv(join(out_dir, "kde_grid.csv"), {"x", "y", "f", "F", "abs_err"}, rows);

  json j;
  j["d"] = rep.d;
  j["n_points"] = rep.n_points;
  j["bandwidth"] = rep.bandwidth;
  j["n_reduced"] = rep.n_reduced;
  j["max_abs_err"] = rep.max_abs_err;
  j["plane_scale"] = rep.plane_scale;
  write_json(join(out_dir, "kde_report.json"), j);
  return rep;
}

// ---------------------------------------------------------------------------
// farfield

namespace {

// Largest norm in the cloud; used to rescale it into the unit ball.
double max_norm(const std::vector<Vec>& pts) {
  double m = 0.0;
  for (const auto& x : pts) m = std::max(m, norm2(x));
  return m;
}

}  // namespace

FarfieldReport run_farfield(const FarfieldConfig& cfg, const std::string& out_dir) {
  ensure_dir(out_dir);
  std::size_t d = cfg.d;
  Rng rng(cfg.seed);

  std::vector<std::pair<double, double>> plane(cfg.n_sources);
  for (auto& pr : plane) {
    pr.first = rng.normal();
    pr.second = rng.normal();
  }
  Mat q = random_unitary(d, rng);
  std::vector<Vec> sources(cfg.n_sources, Vec(d, 0.0));
  for (std::size_t i = 0; i < cfg.n_sources; ++i)
    for (std::size_t j = 0; j < d; ++j)
      sources[i][j] = plane[i].first * q(j, 0) + plane[i].second * q(j, 1);

  std::vector<Vec> targets(cfg.n_targets, Vec(d));
  for (auto& x : targets)
    for (std::size_t j = 0; j < d; ++j) x[j] = rng.normal();

  Vec strengths(cfg.n_sources);
  for (double& w : strengths) w = rng.uniform(0.0, 1.0);

  double snorm = max_norm(sources);
  for (auto& y : sources) {
    for (double& v : y) v /= snorm;
    y[0] += cfg.shift;
  }
  double tnorm = max_norm(targets);
  for (auto& x : targets) {
    for (double& v : x) v /= tnorm;
    x[0] -= cfg.shift;
  }

  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& x : targets)
    for (const auto& y : sources) {
      double s = 0.0;
      for (std::size_t j = 0; j < d; ++j) s += sq(x[j] - y[j]);
      s = std::sqrt(s);
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }

  KernelExpansion e = power_kernel_expansion(3, cfg.exp_eps, 0.9 * lo, 1.1 * hi);
  Vec target_center(d, 0.0);
  target_center[0] = -cfg.shift;
  SkeletonSources skel =
      skeleton_sources(sources, strengths, e, target_center, 1.0, cfg.red_eps);
  if (log_enabled(LogLevel::Info))
    log_message(LogLevel::Info, "farfield: kept " +
                                    std::to_string(skel.selected.size()) +
                                    " of " + std::to_string(cfg.n_sources) +
                                    " sources");

  double r_exp = d <= 5 ? 2.0 - static_cast<double>(d) : -1.0;
  Vec g_direct = direct_sums(sources, strengths, targets, r_exp);
  std::vector<Vec> sel;
  sel.reserve(skel.selected.size());
  for (std::size_t idx : skel.selected) sel.push_back(sources[idx]);
  Vec g_skel = direct_sums(sel, skel.strengths, targets, r_exp);

  double gmax = max_abs(g_direct);
  FarfieldReport rep;
  rep.d = d;
  rep.n_selected = skel.selected.size();
  rep.dist_near = lo;
  rep.dist_far = hi;
  std::vector<std::vector<std::string>> rows;
  rows.reserve(cfg.n_targets);
  for (std::size_t i = 0; i < cfg.n_targets; ++i) {
    double rel = std::abs(g_direct[i] - g_skel[i]) / gmax;
    rep.max_rel_err = std::max(rep.max_rel_err, rel);
    rows.push_back({std::to_string(i), fmt_g17(g_direct[i]), fmt_g17(g_skel[i]),
                    fmt_g17(rel)});
  }
  write_csv(join(out_dir, "farfield_sums.csv"),
            {"target_id", "g_direct", "g_skeleton", "rel_err"}, rows);

  json j;
  j["d"] = rep.d;
  j["n_selected"] = rep.n_selected;
  j["dist_near"] = rep.dist_near;
  j["dist_far"] = rep.dist_far;
  j["max_rel_err"] = rep.max_rel_err;
  write_json(join(out_dir, "farfield_report.json"), j);
  return rep;
}

// ---------------------------------------------------------------------------
// equiv

EquivReport run_equiv(const EquivConfig& cfg, const std::string& out_dir) {
  ensure_dir(out_dir);
  std::size_t d = cfg.d;
  Rng rng(cfg.seed);

  std::vector<Vec> sources(cfg.n_sources, Vec(d));
  for (auto& y : sources)
    for (std::size_t j = 0; j < d; ++j) y[j] = rng.normal();
  std::vector<Vec> targets(cfg.n_targets, Vec(d));
  for (auto& x : targets)
    for (std::size_t j = 0; j < d; ++j) x[j] = rng.normal();
  Vec strengths(cfg.n_sources);
  for (double& w : strengths) w = rng.uniform(0.0, 1.0);

  double snorm = max_norm(sources);
  for (auto& y : sources) {
    for (double& v : y) v *= cfg.source_radius / snorm;
    y[0] += cfg.shift;
  }
  double tnorm = max_norm(targets);
  for (auto& x : targets) {
    for (double& v : x) v *= cfg.target_radius / tnorm;
    x[0] -= cfg.shift;
  }

  std::vector<Vec> candidates;
  if (d == 2) {
    candidates.reserve(cfg.k_theta);
    for (std::size_t k = 0; k < cfg.k_theta; ++k) {
      double th = 2.0 * std::numbers::pi * static_cast<double>(k) /
                  static_cast<double>(cfg.k_theta);
      candidates.push_back(Vec{cfg.shift + std::cos(th), std::sin(th)});
    }
  } else {
    auto [phi, wts] = gauss_legendre(cfg.l_phi, 0.0, std::numbers::pi);
    candidates.reserve(cfg.k_theta * cfg.l_phi);
    for (std::size_t l = 0; l < cfg.l_phi; ++l)
      for (std::size_t k = 0; k < cfg.k_theta; ++k) {
        double th = 2.0 * std::numbers::pi * static_cast<double>(k) /
                    static_cast<double>(cfg.k_theta);
        candidates.push_back(Vec{cfg.shift + std::cos(th) * std::sin(phi[l]),
                                 std::sin(th) * std::sin(phi[l]),
                                 std::cos(phi[l])});
      }
  }

  Vec target_center(d, 0.0);
  target_center[0] = -cfg.shift;
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  auto family_range = [&](const std::vector<Vec>& pts) {
    for (const auto& z : pts) {
      Vec diff(d);
      for (std::size_t j = 0; j < d; ++j) diff[j] = z[j] - target_center[j];
      double dist = norm2(diff);
      lo = std::min(lo, dist - cfg.target_radius);
      hi = std::max(hi, dist + cfg.target_radius);
    }
  };
  family_range(candidates);
  family_range(sources);

  KernelExpansion e = power_kernel_expansion(3, cfg.exp_eps, 0.9 * lo, 1.1 * hi);
  SkeletonSources res =
      equivalent_sources(candidates, sources, strengths, e, target_center,
                         cfg.target_radius, cfg.red_eps);

  EquivReport rep;
  rep.d = d;
  rep.n_candidates = candidates.size();
  rep.n_selected = res.selected.size();
  std::vector<Vec> sel;
  sel.reserve(res.selected.size());
  std::vector<std::vector<std::string>> sel_rows;
  for (std::size_t j = 0; j < res.selected.size(); ++j) {
    std::size_t idx = res.selected[j];
    bool is_cand = idx < candidates.size();
    if (is_cand) ++rep.n_from_ring;
    const Vec& z = is_cand ? candidates[idx] : sources[idx - candidates.size()];
    sel.push_back(z);
    std::vector<std::string> row;
    for (double v : z) row.push_back(fmt_g17(v));
    row.push_back(fmt_g17(res.strengths[j]));
    row.push_back(is_cand ? "1" : "0");
    sel_rows.push_back(std::move(row));
  }
  if (log_enabled(LogLevel::Info))
    log_message(LogLevel::Info, "equiv: kept " +
                                    std::to_string(rep.n_selected) + " points, " +
                                    std::to_string(rep.n_from_ring) +
                                    " from the candidate sphere");

  Vec g_direct = direct_sums(sources, strengths, targets, -1.0);
  Vec g_skel = direct_sums(sel, res.strengths, targets, -1.0);
  double gmax = max_abs(g_direct);
  std::vector<std::vector<std::string>> rows;
  rows.reserve(cfg.n_targets);
  for (std::size_t i = 0; i < cfg.n_targets; ++i) {
    double rel = std::abs(g_direct[i] - g_skel[i]) / gmax;
    rep.max_rel_err = std::max(rep.max_rel_err, rel);
    rows.push_back({std::to_string(i), fmt_g17(g_direct[i]), fmt_g17(g_skel[i]),
                    fmt_g17(rel)});
  }
  write_csv(join(out_dir, "equiv_sums.csv"),
            {"target_id", "g_direct", "g_skeleton", "rel_err"}, rows);

  std::vector<std::string> sel_header;
  for (std::size_t j = 0; j < d; ++j) sel_header.push_back("x" + std::to_string(j));
  sel_header.push_back("strength");
  sel_header.push_back("is_candidate");
  write_csv(join(out_dir, "equiv_selected.csv"), sel_header, sel_rows);

  json j;
  j["d"] = rep.d;
  j["n_candidates"] = rep.n_candidates;
  j["n_selected"] = rep.n_selected;
  j["n_from_ring"] = rep.n_from_ring;
  j["max_rel_err"] = rep.max_rel_err;
  write_json(join(out_dir, "equiv_report.json"), j);
  return rep;
}

// ---------------------------------------------------------------------------
// seeds

SeedsReport run_seeds(const SeedsConfig& cfg, const std::string& out_dir) {
  ensure_dir(out_dir);
  std::vector<Vec> points;
  if (!cfg.points_csv.empty()) {
    points = load_points_csv(cfg.points_csv);
  } else {
    Rng rng(cfg.seed);
    points.reserve(cfg.n_points);
    for (std::size_t i = 0; i < cfg.n_points; ++i) {
      double pick = rng.uniform();
      double n1 = rng.normal();
      double n2 = rng.normal();
      if (pick < 0.5)
        points.push_back(Vec{std::sqrt(2.0) * n1, std::sqrt(0.5) * n2});
      else
        points.push_back(Vec{3.0 + n1, 3.0 + n2});
    }
  }
  save_points_csv(points, join(out_dir, "seeds_points.csv"));

  SeedsReport rep;
  for (std::size_t i = 0; i < cfg.bandwidths.size(); ++i) {
    SeedsRun run;
    run.bandwidth = cfg.bandwidths[i];
    run.seeds = select_seeds(points, cfg.bandwidths[i], 0.0, cfg.n_seeds[i]);
    run.labels = assign_groups(points, run.seeds);
    std::vector<bool> is_seed(points.size(), false);
    for (std::size_t s : run.seeds) is_seed[s] = true;
    std::vector<std::vector<std::string>> rows;
    rows.reserve(points.size());
    for (std::size_t p = 0; p < points.size(); ++p)
      rows.push_back({std::to_string(p), std::to_string(run.labels[p]),
                      is_seed[p] ? "1" : "0"});
    write_csv(join(out_dir, "partition_" + std::to_string(i) + ".csv"),
              {"point_id", "label", "is_seed"}, rows);
    rep.runs.push_back(std::move(run));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// config parsing

ReduceConfig parse_reduce_config(const std::string& json_text) {
  json j = parse_object(json_text);
  ReduceConfig cfg;
  Fields f(j);
  f.take("seed", cfg.seed);
  f.take("n_terms", cfg.n_terms);
  f.take("accuracies", cfg.accuracies);
  f.take("algorithms", cfg.algorithms);
  f.take("grid_n", cfg.grid_n);
  f.take("grid_halfwidth", cfg.grid_halfwidth);
  f.take("write_grids", cfg.write_grids);
  f.finish();
  require(cfg.n_terms > 0, "n_terms must be positive");
  require(!cfg.accuracies.empty(), "accuracies must be non-empty");
  for (double a : cfg.accuracies)
    require(a > 0.0 && a < 1.0, "accuracies must lie in (0, 1)");
  require(!cfg.algorithms.empty(), "algorithms must be non-empty");
  for (const auto& alg : cfg.algorithms)
    require(alg == "cholesky" || alg == "mgs" || alg == "frequency",
            "unknown algorithm '" + alg + "'");
  require(cfg.grid_n >= 2, "grid_n must be at least 2");
  require(cfg.grid_halfwidth > 0.0, "grid_halfwidth must be positive");
  return cfg;
}

TimingConfig parse_timing_config(const std::string& json_text) {
  json j = parse_object(json_text);
  TimingConfig cfg;
  Fields f(j);
  f.take("seed", cfg.seed);
  f.take("dims", cfg.dims);
  f.take("fixed_r", cfg.fixed_r);
  f.take("n_values", cfg.n_values);
  f.take("fixed_n", cfg.fixed_n);
  f.take("r_values", cfg.r_values);
  f.take("repeats", cfg.repeats);
  f.finish();
  require(!cfg.dims.empty(), "dims must be non-empty");
  for (std::size_t d : cfg.dims) require(d >= 1, "dims entries must be positive");
  require(cfg.fixed_r > 0, "fixed_r must be positive");
  require(cfg.fixed_n > 0, "fixed_n must be positive");
  for (std::size_t n : cfg.n_values)
    require(n > 0, "n_values entries must be positive");
  for (std::size_t r : cfg.r_values)
    require(r > 0, "r_values entries must be positive");
  return cfg;
}

PoissonConfig parse_poisson_config(const std::string& json_text) {
  json j = parse_object(json_text);
  PoissonConfig cfg;
  Fields f(j);
  f.take("seed", cfg.seed);
  f.take("d", cfg.d);
  f.take("n_rhs", cfg.n_rhs);
  f.take("exp_eps", cfg.exp_eps);
  f.take("exp_delta", cfg.exp_delta);
  f.take("exp_r_max", cfg.exp_r_max);
  f.take("coeff_trunc", cfg.coeff_trunc);
  f.take("red_accuracy", cfg.red_accuracy);
  f.take("n_s", cfg.n_s);
  f.take("decay", cfg.decay);
  f.finish();
  require(cfg.d >= 3, "d must be at least 3");
  require(cfg.n_rhs > 0, "n_rhs must be positive");
  require(cfg.exp_eps > 0.0 && cfg.exp_eps < 1.0, "exp_eps must lie in (0, 1)");
  require(cfg.exp_delta > 0.0 && cfg.exp_delta < cfg.exp_r_max,
          "exp_delta must lie in (0, exp_r_max)");
  require(cfg.coeff_trunc >= 0.0 && cfg.coeff_trunc < 1.0,
          "coeff_trunc must lie in [0, 1)");
  require(cfg.red_accuracy > 0.0 && cfg.red_accuracy < 1.0,
          "red_accuracy must lie in (0, 1)");
  require(cfg.n_s >= 2, "n_s must be at least 2");
  require(cfg.decay > 0.0 && cfg.decay < 1.0, "decay must lie in (0, 1)");
  return cfg;
}

EllipticConfig parse_elliptic_config(const std::string& json_text) {
  json j = parse_object(json_text);
  EllipticConfig cfg;
  Fields f(j);
  f.take("seed", cfg.seed);
  f.take("d", cfg.d);
  f.take("k", cfg.k);
  f.take("aligned", cfg.aligned);
  f.take("eig_lo", cfg.eig_lo);
  f.take("eig_hi", cfg.eig_hi);
  f.take("exp_eps", cfg.exp_eps);
  f.take("exp_delta", cfg.exp_delta);
  f.take("exp_r_max", cfg.exp_r_max);
  f.take("coeff_trunc", cfg.coeff_trunc);
  f.take("basis_accuracy", cfg.basis_accuracy);
  f.take("n_s", cfg.n_s);
  f.finish();
  require(cfg.d >= 3, "d must be at least 3");
  require(cfg.k > 0.0, "k must be positive");
  require(cfg.eig_lo > 0.0 && cfg.eig_lo < cfg.eig_hi,
          "eig_lo must lie in (0, eig_hi)");
  require(cfg.exp_eps > 0.0 && cfg.exp_eps < 1.0, "exp_eps must lie in (0, 1)");
  require(cfg.exp_delta > 0.0 && cfg.exp_delta < cfg.exp_r_max,
          "exp_delta must lie in (0, exp_r_max)");
  require(cfg.coeff_trunc >= 0.0 && cfg.coeff_trunc < 1.0,
          "coeff_trunc must lie in [0, 1)");
  require(cfg.basis_accuracy > 0.0 && cfg.basis_accuracy < 1.0,
          "basis_accuracy must lie in (0, 1)");
  require(cfg.n_s >= 2, "n_s must be at least 2");
  return cfg;
}

KdeConfig parse_kde_config(const std::string& json_text) {
  json j = parse_object(json_text);
  KdeConfig cfg;
  Fields f(j);
  f.take("seed", cfg.seed);
  f.take("d", cfg.d);
  f.take("n_points", cfg.n_points);
  f.take("bandwidth", cfg.bandwidth);
  f.take("d_eff", cfg.d_eff);
  f.take("red_accuracy", cfg.red_accuracy);
  f.take("eps_is_raw", cfg.eps_is_raw);
  f.take("grid_n", cfg.grid_n);
  f.take("grid_halfwidth", cfg.grid_halfwidth);
  f.take("points_csv", cfg.points_csv);
  f.finish();
  require(cfg.d >= 1, "d must be positive");
  require(cfg.n_points > 0 || !cfg.points_csv.empty(),
          "n_points must be positive");
  require(cfg.bandwidth >= 0.0, "bandwidth must be non-negative");
  require(cfg.red_accuracy > 0.0 && cfg.red_accuracy < 1.0,
          "red_accuracy must lie in (0, 1)");
  require(cfg.grid_n == 0 || cfg.grid_n >= 2, "grid_n must be 0 or at least 2");
  require(cfg.grid_halfwidth > 0.0, "grid_halfwidth must be positive");
  return cfg;
}

FarfieldConfig parse_farfield_config(const std::string& json_text) {
  json j = parse_object(json_text);
  FarfieldConfig cfg;
  Fields f(j);
  f.take("seed", cfg.seed);
  f.take("d", cfg.d);
  f.take("n_sources", cfg.n_sources);
  f.take("n_targets", cfg.n_targets);
  f.take("exp_eps", cfg.exp_eps);
  f.take("red_eps", cfg.red_eps);
  f.take("shift", cfg.shift);
  f.finish();
  require(cfg.d >= 3, "d must be at least 3");
  require(cfg.n_sources > 0, "n_sources must be positive");
  require(cfg.n_targets > 0, "n_targets must be positive");
  require(cfg.exp_eps > 0.0 && cfg.exp_eps < 1.0, "exp_eps must lie in (0, 1)");
  require(cfg.red_eps > 0.0 && cfg.red_eps < 1.0, "red_eps must lie in (0, 1)");
  require(cfg.shift > 1.0, "shift must exceed the unit ball radius");
  return cfg;
}

EquivConfig parse_equiv_config(const std::string& json_text) {
  json j = parse_object(json_text);
  EquivConfig cfg;
  Fields f(j);
  f.take("seed", cfg.seed);
  f.take("d", cfg.d);
  f.take("n_sources", cfg.n_sources);
  f.take("n_targets", cfg.n_targets);
  f.take("k_theta", cfg.k_theta);
  f.take("l_phi", cfg.l_phi);
  f.take("exp_eps", cfg.exp_eps);
  f.take("red_eps", cfg.red_eps);
  f.take("shift", cfg.shift);
  f.take("source_radius", cfg.source_radius);
  f.take("target_radius", cfg.target_radius);
  f.finish();
  require(cfg.d == 2 || cfg.d == 3, "d must be 2 or 3");
  require(cfg.n_sources > 0, "n_sources must be positive");
  require(cfg.n_targets > 0, "n_targets must be positive");
  require(cfg.k_theta >= 2, "k_theta must be at least 2");
  require(cfg.d == 2 || cfg.l_phi >= 1, "l_phi must be positive");
  require(cfg.exp_eps > 0.0 && cfg.exp_eps < 1.0, "exp_eps must lie in (0, 1)");
  require(cfg.red_eps > 0.0 && cfg.red_eps < 1.0, "red_eps must lie in (0, 1)");
  require(cfg.source_radius > 0.0 && cfg.source_radius < 1.0,
          "source_radius must lie in (0, 1) inside the candidate sphere");
  require(cfg.target_radius > 0.0, "target_radius must be positive");
  require(cfg.shift > std::max(1.0, cfg.target_radius),
          "shift must separate the balls");
  return cfg;
}

SeedsConfig parse_seeds_config(const std::string& json_text) {
  json j = parse_object(json_text);
  SeedsConfig cfg;
  Fields f(j);
  f.take("seed", cfg.seed);
  f.take("n_points", cfg.n_points);
  f.take("bandwidths", cfg.bandwidths);
  f.take("n_seeds", cfg.n_seeds);
  f.take("points_csv", cfg.points_csv);
  f.finish();
  require(cfg.n_points > 0 || !cfg.points_csv.empty(),
          "n_points must be positive");
  require(!cfg.bandwidths.empty(), "bandwidths must be non-empty");
  require(cfg.bandwidths.size() == cfg.n_seeds.size(),
          "bandwidths and n_seeds must pair up");
  for (double h : cfg.bandwidths)
    require(h > 0.0, "bandwidths entries must be positive");
  for (std::size_t n : cfg.n_seeds)
    require(n > 0, "n_seeds entries must be positive");
  return cfg;
}

}  // namespace mixred::experiments
