#include "mixred/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mixred/common.hpp"

namespace mixred {

static constexpr int kMaxIter = 10000;
static constexpr double kEps = 1e-16;

// Series for P(a, x), valid and fast for x < a + 1.
static double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double term = sum;
  for (int i = 0; i < kMaxIter; ++i) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kEps)
      return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  throw NoConvergence("gamma_p: series did not converge");
}

// Modified Lentz continued fraction for Q(a, x), valid for x >= a + 1.
static double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEps)
      return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
  }
  throw NoConvergence("gamma_q: continued fraction did not converge");
}

double gamma_p(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw InvalidRange("gamma_p: need a > 0, x >= 0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
  if (!(a > 0.0) || x < 0.0) throw InvalidRange("gamma_q: need a > 0, x >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double bessel_i_scaled(double nu, double z) {
  if (nu < 0.0 || z < 0.0) throw InvalidRange("bessel_i_scaled: need nu, z >= 0");
  if (z == 0.0) return nu == 0.0 ? 1.0 : 0.0;

  double mu = 4.0 * nu * nu;
  if (z >= 15.0 && z >= 2.0 * mu) {
    // Asymptotic expansion; terms are summed while they keep shrinking.
    double sum = 1.0, term = 1.0;
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 30; ++k) {
      double f = (mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * z * k);
      term *= -f;
      if (std::fabs(term) >= prev) break;
      sum += term;
      prev = std::fabs(term);
      if (std::fabs(term) < 1e-17 * std::fabs(sum)) break;
    }
    return sum / std::sqrt(2.0 * std::numbers::pi * z);
  }

  // Power series with a floating log scale so large z cannot overflow:
  // the current term equals rel * exp(scale_log).
  double scale_log = nu * std::log(z / 2.0) - std::lgamma(nu + 1.0);
  double q = z * z / 4.0;
  double rel = 1.0;
  double sum = 1.0;
  for (int k = 1; k <= kMaxIter; ++k) {
    rel *= q / (static_cast<double>(k) * (nu + static_cast<double>(k)));
    if (rel > 1e250) {
      sum /= rel;
      scale_log += std::log(rel);
      rel = 1.0;
    }
    sum += rel;
    if (rel < kEps * sum) return std::exp(scale_log - z) * sum;
  }
  throw NoConvergence("bessel_i_scaled: series did not converge");
}

double log_gamma_ratio_imag(double nu, double y) {
  if (!(nu > 0.0)) throw InvalidRange("log_gamma_ratio_imag: need nu > 0");
  double two_nu = 2.0 * nu;
  double rounded = std::round(two_nu);
  if (std::fabs(two_nu - rounded) > 1e-12)
    throw InvalidRange("log_gamma_ratio_imag: nu must be a multiple of 1/2");
  int n2 = static_cast<int>(rounded);
  y = std::fabs(y);
  if (y == 0.0) return 0.0;

  double theta;
  int m;
  double log_base2;  // log |Gamma(theta + i y)|^2
  const double pi = std::numbers::pi;
  if (n2 % 2 == 1) {
    theta = 0.5;
    m = (n2 - 1) / 2;
    // log(pi / cosh(pi y))
    log_base2 = std::log(pi) - (pi * y + std::log1p(std::exp(-2.0 * pi * y)) - std::log(2.0));
  } else {
    theta = 1.0;
    m = n2 / 2 - 1;
    if (y == 0.0)
      log_base2 = 0.0;
    else
      log_base2 = std::log(pi * y) - (pi * y + std::log1p(-std::exp(-2.0 * pi * y)) - std::log(2.0));
  }
  double log_sq = log_base2;
  for (int j = 0; j < m; ++j) {
    double s = theta + static_cast<double>(j);
    log_sq += std::log(s * s + y * y);
  }
  return 0.5 * log_sq - std::lgamma(nu);
}

double bessel_k_half(int twice_nu, double z) {
  if (twice_nu < 1 || twice_nu % 2 == 0)
    throw InvalidRange("bessel_k_half: 2*nu must be a positive odd integer");
  if (!(z > 0.0)) throw InvalidRange("bessel_k_half: need z > 0");
  double k_half = std::sqrt(std::numbers::pi / (2.0 * z)) * std::exp(-z);
  if (twice_nu == 1) return k_half;
  // K_{-1/2} = K_{1/2}; climb with K_{nu+1} = K_{nu-1} + (2 nu / z) K_nu.
  double km = k_half, k = k_half;
  double nu = 0.5;
  for (int step = 0; step < (twice_nu - 1) / 2; ++step) {
    double kp = km + (2.0 * nu / z) * k;
    km = k;
    k = kp;
    nu += 1.0;
  }
  return k;
}

}  // namespace mixred
