#include "mixred/kernel_expansion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "mixred/common.hpp"
#include "mixred/io.hpp"
#include "mixred/linalg.hpp"
#include "mixred/parallel.hpp"
#include "mixred/quadrature.hpp"
#include "mixred/special.hpp"

namespace mixred {

namespace {

constexpr double kAliasShare = 1.5;   // aliasing share of the error budget
constexpr double kRightShare = 0.25;  // large-exponent truncation share
constexpr double kTailShare = 0.05;   // quadrature share for the small-exponent tail
constexpr double kTailCut = 10.0;     // exponent*r^2 bound handled by the tail rule

// Step size of the exponential lattice. The discretization error of the
// trapezoid sum is governed by the Gamma function along a vertical line, so
// pick h = 2*pi/y where 2|Gamma(nu + i y)|/Gamma(nu) equals its budget share.
double solve_lattice_step(double nu, double eps) {
  double target = std::log(kAliasShare * eps);
  auto f = [nu](double y) { return std::numbers::ln2 + log_gamma_ratio_imag(nu, y); };
  double lo = 1e-3;
  if (f(lo) <= target) throw ThresholdOutOfRange("kernel expansion: eps too large");
  double hi = 8.0;
  int guard = 0;
  while (f(hi) > target) {
    hi *= 2.0;
    if (++guard > 60) throw NoConvergence("kernel expansion: step bisection bracket");
  }
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (f(mid) > target ? lo : hi) = mid;
  }
  return 2.0 * std::numbers::pi / (0.5 * (lo + hi));
}

// Solve Q(a, x) = target for x (Q is decreasing).
double invert_gamma_q(double a, double target) {
  double lo = 0.0;
  double hi = a + 10.0;
  int guard = 0;
  while (gamma_q(a, hi) > target) {
    hi *= 2.0;
    if (++guard > 200) throw NoConvergence("kernel expansion: tail cutoff bracket");
  }
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    (gamma_q(a, mid) > target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Gauss nodes/weights of the discrete measure sum_l om[l] * delta(t[l]),
// computed with the three-term recurrence in extended precision and a
// symmetric tridiagonal eigensolve.
std::vector<std::pair<double, double>> discrete_gauss(
    const std::vector<long double>& t, const std::vector<long double>& om,
    std::size_t n) {
  std::size_t m = t.size();
  std::vector<long double> pprev(m, 0.0L), pcur(m, 1.0L);
  long double m0 = 0.0L;
  for (std::size_t i = 0; i < m; ++i) m0 += om[i];
  Vec a(n, 0.0), boff(n, 0.0);
  long double norm2 = m0;
  for (std::size_t kk = 0; kk < n; ++kk) {
    long double num = 0.0L;
    for (std::size_t i = 0; i < m; ++i) num += om[i] * t[i] * pcur[i] * pcur[i];
    a[kk] = static_cast<double>(num / norm2);
    if (kk + 1 == n) break;
    long double bk = 0.0L;
    for (std::size_t i = 0; i < m; ++i) {
      long double next = (t[i] - static_cast<long double>(a[kk])) * pcur[i] -
                         (kk > 0 ? static_cast<long double>(boff[kk]) : 0.0L) * pprev[i];
      pprev[i] = pcur[i];
      pcur[i] = next;
      bk += om[i] * next * next;
    }
    long double ratio = bk / norm2;
    if (!(ratio > 0.0L))
      throw NumericalBreakdown("kernel expansion: tail measure lost rank");
    boff[kk + 1] = static_cast<double>(ratio);
    norm2 = bk;
  }
  Mat jac(n, n, 0.0);
  for (std::size_t kk = 0; kk < n; ++kk) {
    jac(kk, kk) = a[kk];
    if (kk + 1 < n) {
      double e = std::sqrt(boff[kk + 1]);
      jac(kk, kk + 1) = e;
      jac(kk + 1, kk) = e;
    }
  }
  EigenDecomposition ed = sym_eigen(jac);
  std::vector<std::pair<double, double>> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    double q0 = ed.vectors(0, j);
    out[j] = {ed.values[j], static_cast<double>(m0) * q0 * q0};
  }
  std::sort(out.begin(), out.end());
  for (auto& nw : out)
    if (!(nw.first > 0.0))
      throw NumericalBreakdown("kernel expansion: nonpositive tail node");
  return out;
}

void check_expansion_args(std::size_t d, double delta, double r_max, double eps) {
  if (d < 3) throw InvalidRange("kernel expansion: dimension must be at least 3");
  if (!(delta > 0.0) || !(r_max > delta))
    throw InvalidRange("kernel expansion: need 0 < delta < r_max");
  if (!(eps > 0.0) || eps > 0.1)
    throw ThresholdOutOfRange("kernel expansion: eps must lie in (0, 0.1]");
}

}  // namespace

double expansion_eval(const KernelExpansion& e, double r) {
  double r2 = r * r;
  double sum = 0.0, comp = 0.0;
  for (std::size_t i = 0; i < e.weights.size(); ++i) {
    double term = e.weights[i] * std::exp(-e.exponents[i] * r2);
    double y = term - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

double exact_kernel(const KernelExpansion& e, double r) {
  if (!(r > 0.0)) throw InvalidRange("exact_kernel: r must be positive");
  double d = static_cast<double>(e.d);
  double nu = 0.5 * d - 1.0;
  if (e.kind == ExpansionKind::Power) {
    double ln_cd = std::lgamma(0.5 * d + 1.0) - std::log(d) - std::log(d - 2.0) -
                   0.5 * d * std::log(std::numbers::pi);
    // pow keeps full precision over the wide dynamic range of r^{2-d};
    // exp(log) would lose ~|2-d| log(r) ulps in the exponent.
    return std::exp(ln_cd) * std::pow(r, 2.0 - d);
  }
  if (e.d % 2 == 1) {
    double val = bessel_k_half(static_cast<int>(e.d) - 2, e.k * r);
    return std::exp(-0.5 * d * std::log(2.0 * std::numbers::pi) +
                    nu * std::log(e.k / r)) *
           val;
  }
  // Even dimension: integrate the exponential representation directly.
  double kr = e.k * r;
  double sstar = std::log(2.0 * e.k / r);
  double w = std::log1p(1600.0 / kr) + 20.0 + 3.0 * nu;
  double ln_front = -0.5 * d * std::log(4.0 * std::numbers::pi);
  auto f = [&](double s) {
    double expo = nu * s - e.k * e.k * std::exp(-s) - std::exp(s) * r * r / 4.0;
    return expo < -745.0 ? 0.0 : std::exp(ln_front + expo);
  };
  double peak = std::exp(ln_front + nu * sstar - kr);
  return adaptive_quad_1d(f, sstar - w, sstar + w, std::max(peak, 1e-300) * 1e-12);
}

ValidationReport expansion_validate(const KernelExpansion& e, std::size_t n_points) {
  if (n_points < 2) throw InvalidRange("expansion_validate: need at least 2 points");
  double ratio = std::log(e.r_max / e.delta);
  Vec errs(n_points, 0.0);
  parallel_for(n_points, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double r = e.delta * std::exp(ratio * static_cast<double>(i) /
                                    static_cast<double>(n_points - 1));
      double exact = exact_kernel(e, r);
      errs[i] = std::abs(expansion_eval(e, r) - exact) / exact;
    }
  });
  ValidationReport rep{0.0, e.delta};
  for (std::size_t i = 0; i < n_points; ++i)
    if (errs[i] > rep.max_rel_err) {
      rep.max_rel_err = errs[i];
      rep.worst_r = e.delta * std::exp(ratio * static_cast<double>(i) /
                                       static_cast<double>(n_points - 1));
    }
  return rep;
}

KernelExpansion power_kernel_expansion(std::size_t d, double eps, double delta,
                                       double r_max) {
  check_expansion_args(d, delta, r_max, eps);
  double dd = static_cast<double>(d);
  double nu = 0.5 * dd - 1.0;
  double ln_cd = std::lgamma(0.5 * dd + 1.0) - std::log(dd) - std::log(dd - 2.0) -
                 0.5 * dd * std::log(std::numbers::pi);
  double h0 = solve_lattice_step(nu, eps);
  double x_cut = invert_gamma_q(nu, kRightShare * eps);

  // How many Gauss terms the flat tail needs: the degree-2n coefficient of
  // the exponential on the tail interval times the tail mass must stay under
  // its share of eps.
  double mass = std::exp(nu * std::log(kTailCut) - std::lgamma(nu + 1.0));
  std::size_t n_tail = 0;
  for (std::size_t nq = 1; nq <= 60; ++nq) {
    double coef = 2.0 * bessel_i_scaled(2.0 * static_cast<double>(nq), 0.5 * kTailCut);
    if (coef * mass <= kTailShare * eps) {
      n_tail = nq;
      break;
    }
  }
  if (n_tail == 0) throw NoConvergence("power_kernel_expansion: tail rule");

  KernelExpansion e;
  e.d = d;
  e.kind = ExpansionKind::Power;
  e.k = 0.0;
  e.delta = delta;
  e.r_max = r_max;
  e.eps = eps;

  for (int attempt = 0; attempt <= 8; ++attempt) {
    double h = h0 * std::pow(0.95, attempt);
    long n_idx = static_cast<long>(std::ceil(std::log(x_cut / (delta * delta)) / h));
    long m_idx = static_cast<long>(std::floor(std::log(kTailCut / (r_max * r_max)) / h)) + 1;
    if (m_idx > n_idx) m_idx = n_idx;

    // Lattice terms below l_bot contribute less than their error share even
    // at r = r_max, where the kernel is smallest.
    double ln_bot = std::log(0.01 * eps) - 2.0 * nu * std::log(r_max) +
                    std::lgamma(nu) + std::log1p(-std::exp(-nu * h)) - std::log(h);
    long l_bot = static_cast<long>(std::floor(ln_bot / (nu * h)));
    if (l_bot > m_idx) l_bot = m_idx;

    e.weights.clear();
    e.exponents.clear();
    // Exponent arguments reach magnitude ~nu*h*n_idx; forming them and the
    // exp in extended precision keeps each stored term correct to one ulp
    // instead of ~arg*ulp, which matters once eps approaches 1e-14.
    long double h_ld = h;
    long double nu_ld = nu;
    long double ln_w0 = static_cast<long double>(ln_cd) + std::log(h_ld) -
                        std::lgamma(nu_ld);

    std::size_t tail_count = static_cast<std::size_t>(m_idx - l_bot);
    if (tail_count > 0 && tail_count > n_tail) {
      std::vector<long double> t(tail_count), om(tail_count);
      for (std::size_t i = 0; i < tail_count; ++i) {
        long l = l_bot + static_cast<long>(i);
        long double rel = static_cast<long double>(l - (m_idx - 1)) * h_ld;
        t[i] = std::exp(rel);
        om[i] = std::exp(nu_ld * rel);
      }
      long double tau_top = std::exp(h_ld * static_cast<long double>(m_idx - 1));
      long double base =
          std::exp(ln_w0 + nu_ld * h_ld * static_cast<long double>(m_idx - 1));
      for (const auto& nw : discrete_gauss(t, om, n_tail)) {
        e.exponents.push_back(static_cast<double>(nw.first * tau_top));
        e.weights.push_back(static_cast<double>(nw.second * base));
      }
    } else {
      for (long l = l_bot; l < m_idx; ++l) {
        e.exponents.push_back(
            static_cast<double>(std::exp(h_ld * static_cast<long double>(l))));
        e.weights.push_back(static_cast<double>(
            std::exp(ln_w0 + nu_ld * h_ld * static_cast<long double>(l))));
      }
    }
    for (long l = m_idx; l <= n_idx; ++l) {
      e.exponents.push_back(
          static_cast<double>(std::exp(h_ld * static_cast<long double>(l))));
      e.weights.push_back(static_cast<double>(
          std::exp(ln_w0 + nu_ld * h_ld * static_cast<long double>(l))));
    }
    e.h = h;

    ValidationReport rep = expansion_validate(e, 1000);
    if (rep.max_rel_err <= 2.0 * eps) {
      if (log_enabled(LogLevel::Info))
        log_message(LogLevel::Info,
                    "power expansion d=" + std::to_string(d) + " terms=" +
                        std::to_string(e.weights.size()) + " max_rel=" +
                        fmt_g17(rep.max_rel_err));
      return e;
    }
    if (log_enabled(LogLevel::Info))
      log_message(LogLevel::Info, "power expansion retry, max_rel=" +
                                      fmt_g17(rep.max_rel_err) +
                                      " worst_r=" + fmt_g17(rep.worst_r));
  }
  throw NoConvergence("power_kernel_expansion: validation failed");
}

KernelExpansion helmholtz_kernel_expansion(std::size_t d, double k, double eps,
                                           double delta, double r_max) {
  check_expansion_args(d, delta, r_max, eps);
  if (!(k > 0.0)) throw InvalidRange("helmholtz_kernel_expansion: k must be positive");
  double dd = static_cast<double>(d);
  double nu = 0.5 * dd - 1.0;
  double h0 = solve_lattice_step(nu, eps);
  double x_cut = invert_gamma_q(nu, kRightShare * eps);

  KernelExpansion e;
  e.d = d;
  e.kind = ExpansionKind::Helmholtz;
  e.k = k;
  e.delta = delta;
  e.r_max = r_max;
  e.eps = eps;

  double g_far = exact_kernel(e, r_max);
  if (!(g_far > 0.0))
    throw InvalidRange("helmholtz_kernel_expansion: kernel underflows at r_max");

  // No validation-and-retry pass here, unlike the power family: the step
  // size controls aliasing of the screened kernel only while k*r stays
  // moderate, and past that point shrinking h cannot restore the relative
  // accuracy of e^{-kr}-scale values. The truncation rule is applied as-is;
  // callers that need an accuracy figure run expansion_validate themselves.
  double h = h0;
  long n_idx =
      static_cast<long>(std::ceil(std::log(4.0 * x_cut / (delta * delta)) / h));
  double ln_front = -0.5 * dd * std::log(4.0 * std::numbers::pi) + std::log(h);
  long double h_ld = h;
  long double nu_ld = nu;
  long double k2 = static_cast<long double>(k) * static_cast<long double>(k);
  long double ln_front_ld = ln_front;
  auto ln_weight = [&](long l) -> long double {
    long double hl = h_ld * static_cast<long double>(l);
    return ln_front_ld + nu_ld * hl - k2 * std::exp(-hl);
  };

  // Walk down from the saddle of the integrand at r = r_max until the
  // lattice terms stop mattering there.
  long m_idx = static_cast<long>(std::floor(std::log(2.0 * k / r_max) / h));
  if (m_idx > n_idx) m_idx = n_idx;
  long l = m_idx;
  int guard = 0;
  while (true) {
    double term = static_cast<double>(ln_weight(l)) -
                  std::exp(h * static_cast<double>(l)) / 4.0 * r_max * r_max;
    if (term < std::log(0.01 * eps * g_far)) break;
    --l;
    if (++guard > 1000000)
      throw NoConvergence("helmholtz_kernel_expansion: lattice extension");
  }
  m_idx = l + 1;
  if (m_idx > n_idx) m_idx = n_idx;

  for (long li = m_idx; li <= n_idx; ++li) {
    e.exponents.push_back(static_cast<double>(
        std::exp(h_ld * static_cast<long double>(li)) / 4.0L));
    e.weights.push_back(static_cast<double>(std::exp(ln_weight(li))));
  }
  e.h = h;
  if (log_enabled(LogLevel::Info))
    log_message(LogLevel::Info,
                "helmholtz expansion d=" + std::to_string(d) + " terms=" +
                    std::to_string(e.weights.size()));
  return e;
}

}  // namespace mixred
