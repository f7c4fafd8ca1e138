#include "mixred/farfield.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numbers>

#include "mixred/common.hpp"
#include "mixred/parallel.hpp"
#include "mixred/quadrature.hpp"
#include "mixred/special.hpp"

namespace mixred {

namespace {

double dist2(const Vec& a, const Vec& b) {
  double q = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double t = a[i] - b[i];
    q += t * t;
  }
  return q;
}

// Shared machinery of the two skeleton builders: the Gram matrix of the
// fields induced over the target ball, normalized per source.
struct BallGram {
  std::vector<Vec> pos;   // family positions
  Vec center_d2;          // |c - y_n|^2
  Vec tau, w;             // expansion terms
  Vec sqrt_diag;
  double radius = 0.0;

  BallGram(std::vector<Vec> family, const KernelExpansion& e, const Vec& center,
           double ball_radius)
      : pos(std::move(family)), tau(e.exponents), w(e.weights), radius(ball_radius) {
    if (pos.empty()) throw EmptyPointSet("ball gram: no sources");
    if (!(ball_radius > 0.0)) throw InvalidRange("ball gram: radius");
    if (tau.empty()) throw InvalidRange("ball gram: empty expansion");
    for (const auto& y : pos)
      if (y.size() != center.size()) throw DimMismatch("ball gram: point dimension");
    center_d2.resize(pos.size());
    for (std::size_t i = 0; i < pos.size(); ++i)
      center_d2[i] = dist2(pos[i], center);
    sqrt_diag.resize(pos.size());
    for (std::size_t i = 0; i < pos.size(); ++i) {
      double dn = raw(i, i);
      if (!(dn > 0.0))
        throw NumericalBreakdown("ball gram: vanishing induced norm");
      sqrt_diag[i] = std::sqrt(dn);
    }
  }

  double raw(std::size_t i, std::size_t j) const {
    double a1 = center_d2[i];
    double a2 = center_d2[j];
    double a12 = i == j ? 0.0 : dist2(pos[i], pos[j]);
    double cross = a1 + a12 - a2;
    std::size_t nt = tau.size();
    // Compensated sum: the pivoting downstream resolves residuals many
    // orders below the entry size, so plain accumulation over the term
    // pairs would set the usable floor.
    double sum = 0.0, comp = 0.0;
    for (std::size_t l = 0; l < nt; ++l) {
      for (std::size_t lp = 0; lp < nt; ++lp) {
        double ts = tau[l] + tau[lp];
        double t = tau[lp] / ts;
        double b2 = a1 - t * cross + t * t * a12;
        if (b2 < 0.0) b2 = 0.0;
        double wt = w[l] * w[lp] * std::exp(-(tau[l] * tau[lp] / ts) * a12);
        double term = wt * gaussian_ball_integral(ts, std::sqrt(b2), radius);
        double y = term - comp;
        double tval = sum + y;
        comp = (tval - sum) - y;
        sum = tval;
      }
    }
    return sum;
  }

  GramFn fn() const {
    const BallGram* self = this;
    return [self](std::size_t i, std::size_t j) {
      return self->raw(i, j) / (self->sqrt_diag[i] * self->sqrt_diag[j]);
    };
  }
};

}  // namespace

double gaussian_ball_integral(double tau, double b, double radius) {
  if (!(tau > 0.0) || !(radius > 0.0) || b < 0.0)
    throw InvalidRange("gaussian_ball_integral: bad arguments");
  double pi = std::numbers::pi;
  if (tau * b * b < 1e-8) {
    // Concentric form pi^{3/2} tau^{-3/2} P(3/2, tau R^2); the equivalent
    // erf-minus-exponential expression cancels catastrophically as tau -> 0.
    return std::pow(pi / tau, 1.5) * gamma_p(1.5, tau * radius * radius);
  }
  // a_term -> -2bR and b_term -> +2bR as tau -> 0, so their sum loses
  // roughly tau * R^2 of its digits; extended precision and expm1 keep the
  // result accurate through the crossover into the concentric branch.
  long double tl = tau, bl = b, rl = radius;
  long double pil = std::numbers::pi_v<long double>;
  long double sl = std::sqrt(tl);
  long double a_term = std::exp(-tl * (bl - rl) * (bl - rl)) *
                       std::expm1(-4.0L * tl * bl * rl) / (2.0L * tl);
  long double b_term = 0.5L * bl * std::sqrt(pil / tl) *
                       (std::erfc(sl * (bl - rl)) - std::erfc(sl * (bl + rl)));
  return static_cast<double>(pil / (tl * bl) * (a_term + b_term));
}

double gaussian_ball_integral_nd(std::size_t d, double tau, double b,
                                 double radius) {
  if (d == 0) throw InvalidRange("gaussian_ball_integral_nd: zero dimension");
  if (!(tau > 0.0) || !(radius > 0.0) || b < 0.0)
    throw InvalidRange("gaussian_ball_integral_nd: bad arguments");
  double dd = static_cast<double>(d);
  double nu = 0.5 * dd - 1.0;
  if (2.0 * tau * b * radius < 1e-8) {
    // Concentric limit: surface area times the radial integral.
    return std::exp(0.5 * dd * std::log(std::numbers::pi) -
                    0.5 * dd * std::log(tau)) *
           gamma_p(0.5 * dd, tau * radius * radius);
  }
  double front = std::exp(0.5 * dd * std::log(2.0 * std::numbers::pi) -
                          nu * std::log(2.0 * tau * b));
  auto integrand = [&](double r) {
    return std::pow(r, 0.5 * dd) * std::exp(-tau * (r - b) * (r - b)) *
           bessel_i_scaled(nu, 2.0 * tau * b * r);
  };
  double prev = 0.0;
  for (std::size_t order = 32; order <= 1024; order *= 2) {
    auto [nodes, weights] = gauss_legendre(order, 0.0, radius);
    double val = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      val += weights[i] * integrand(nodes[i]);
    if (order > 32 && std::abs(val - prev) <= 1e-11 * std::abs(val))
      return front * val;
    prev = val;
  }
  throw QuadratureNotConverged("gaussian_ball_integral_nd");
}

Vec direct_sums(const std::vector<Vec>& sources, const Vec& strengths,
                const std::vector<Vec>& targets, double r_exponent) {
  if (sources.empty() || targets.empty())
    throw EmptyPointSet("direct_sums: empty point set");
  if (strengths.size() != sources.size())
    throw DimMismatch("direct_sums: strength count");
  std::size_t d = sources[0].size();
  for (const auto& y : sources)
    if (y.size() != d) throw DimMismatch("direct_sums: source dimension");
  for (const auto& x : targets)
    if (x.size() != d) throw DimMismatch("direct_sums: target dimension");

  Vec out(targets.size(), 0.0);
  std::atomic<bool> coincident{false};
  bool inverse = r_exponent == -1.0;
  parallel_for(targets.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t m = begin; m < end; ++m) {
      double sum = 0.0;
      for (std::size_t n = 0; n < sources.size(); ++n) {
        double q = dist2(targets[m], sources[n]);
        if (q == 0.0) {
          coincident.store(true);
          return;
        }
        sum += inverse ? strengths[n] / std::sqrt(q)
                       : strengths[n] * std::pow(q, 0.5 * r_exponent);
      }
      out[m] = sum;
    }
  });
  if (coincident.load())
    throw CoincidentSourceTarget("direct_sums: zero distance pair");
  return out;
}

SkeletonSources skeleton_sources(const std::vector<Vec>& sources,
                                 const Vec& strengths, const KernelExpansion& e,
                                 const Vec& ball_center, double ball_radius,
                                 double red_eps) {
  if (strengths.size() != sources.size())
    throw DimMismatch("skeleton_sources: strength count");
  BallGram bg(sources, e, ball_center, ball_radius);
  Vec coeffs(sources.size());
  for (std::size_t i = 0; i < sources.size(); ++i)
    coeffs[i] = strengths[i] * bg.sqrt_diag[i];
  ReduceOptions opt;
  opt.eps = red_eps;
  ReduceResult red = pivoted_gram_reduce(sources.size(), bg.fn(), coeffs, opt);
  SkeletonSources out;
  out.selected = red.skeleton;
  out.strengths.resize(red.rank);
  for (std::size_t j = 0; j < red.rank; ++j)
    out.strengths[j] = red.coeffs[j] / bg.sqrt_diag[red.skeleton[j]];
  return out;
}

SkeletonSources equivalent_sources(const std::vector<Vec>& candidates,
                                   const std::vector<Vec>& sources,
                                   const Vec& strengths, const KernelExpansion& e,
                                   const Vec& ball_center, double ball_radius,
                                   double red_eps) {
  if (candidates.empty()) throw EmptyPointSet("equivalent_sources: no candidates");
  if (strengths.size() != sources.size())
    throw DimMismatch("equivalent_sources: strength count");
  std::vector<Vec> family = candidates;
  family.insert(family.end(), sources.begin(), sources.end());
  BallGram bg(std::move(family), e, ball_center, ball_radius);
  Vec coeffs(bg.pos.size(), 0.0);
  for (std::size_t i = 0; i < sources.size(); ++i)
    coeffs[candidates.size() + i] = strengths[i] * bg.sqrt_diag[candidates.size() + i];
  ReduceOptions opt;
  opt.eps = red_eps;
  opt.phase_boundary = candidates.size();
  ReduceResult red = pivoted_gram_reduce(bg.pos.size(), bg.fn(), coeffs, opt);
  SkeletonSources out;
  out.selected = red.skeleton;
  out.strengths.resize(red.rank);
  for (std::size_t j = 0; j < red.rank; ++j)
    out.strengths[j] = red.coeffs[j] / bg.sqrt_diag[red.skeleton[j]];
  return out;
}

std::vector<std::size_t> select_seeds(const std::vector<Vec>& points,
                                      double bandwidth, double eps,
                                      std::size_t n_seeds) {
  if (points.empty()) throw EmptyPointSet("select_seeds: no points");
  if (!(bandwidth > 0.0)) throw InvalidRange("select_seeds: bandwidth");
  std::size_t d = points[0].size();
  std::vector<Vec> family(points.size() + 1);
  Vec mean(d, 0.0);
  for (const auto& x : points) {
    if (x.size() != d) throw DimMismatch("select_seeds: point dimension");
    for (std::size_t i = 0; i < d; ++i) mean[i] += x[i];
  }
  for (std::size_t i = 0; i < d; ++i) mean[i] /= static_cast<double>(points.size());
  family[0] = std::move(mean);
  for (std::size_t i = 0; i < points.size(); ++i) family[i + 1] = points[i];

  double inv4h2 = 1.0 / (4.0 * bandwidth * bandwidth);
  const std::vector<Vec>* fam = &family;
  GramFn gram = [fam, inv4h2](std::size_t i, std::size_t j) {
    return std::exp(-dist2((*fam)[i], (*fam)[j]) * inv4h2);
  };
  ReduceOptions opt;
  opt.eps = eps;
  opt.forced_first = true;
  if (n_seeds > 0) opt.max_rank = n_seeds + 1;  // the mean occupies one slot
  ReduceResult red =
      pivoted_gram_reduce(family.size(), gram, Vec(family.size(), 1.0), opt);
  std::vector<std::size_t> seeds;
  for (std::size_t idx : red.skeleton)
    if (idx > 0) seeds.push_back(idx - 1);
  return seeds;
}

std::vector<std::size_t> assign_groups(const std::vector<Vec>& points,
                                       const std::vector<std::size_t>& seeds) {
  if (seeds.empty()) throw EmptyPointSet("assign_groups: no seeds");
  std::vector<std::size_t> labels(points.size(), 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      double q = dist2(points[i], points[seeds[s]]);
      if (q < best) {
        best = q;
        labels[i] = s;
      }
    }
  }
  return labels;
}

}  // namespace mixred
