#include "mixred/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "mixred/common.hpp"
#include "mixred/rng.hpp"

namespace mixred {

std::pair<Vec, Vec> gauss_legendre(std::size_t order, double a, double b) {
  if (order == 0) throw InvalidRange("gauss_legendre: order must be positive");
  if (!(a < b)) throw InvalidRange("gauss_legendre: need a < b");
  std::size_t n = order;
  Vec x(n), w(n);
  std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * static_cast<double>(j) + 1.0) * z * p1 -
              static_cast<double>(j) * p2) /
             (static_cast<double>(j) + 1.0);
      }
      pp = static_cast<double>(n) * (z * p0 - p1) / (z * z - 1.0);
      double dz = p0 / pp;
      z -= dz;
      if (std::fabs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    double wi = 2.0 / ((1.0 - z * z) * pp * pp);
    w[i] = wi;
    w[n - 1 - i] = wi;
  }
  double mid = 0.5 * (a + b), len = 0.5 * (b - a);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = mid + len * x[i];
    w[i] *= len;
  }
  return {x, w};
}

static double simpson_step(const std::function<double(double)>& f, double a,
                           double fa, double b, double fb, double m, double fm,
                           double whole, double tol, int depth) {
  if (depth > 60) throw MaxDepthExceeded("adaptive_quad_1d: recursion too deep");
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double h = b - a;
  double left = h / 12.0 * (fa + 4.0 * flm + fm);
  double right = h / 12.0 * (fm + 4.0 * frm + fb);
  double delta = left + right - whole;
  if (std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_step(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth + 1) +
         simpson_step(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth + 1);
}

double adaptive_quad_1d(const std::function<double(double)>& f, double a,
                        double b, double tol) {
  if (!(a < b)) throw InvalidRange("adaptive_quad_1d: need a < b");
  if (!(tol > 0.0)) throw ThresholdOutOfRange("adaptive_quad_1d: need tol > 0");
  double m = 0.5 * (a + b);
  double fa = f(a), fb = f(b), fm = f(m);
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, fa, b, fb, m, fm, whole, tol, 0);
}

double mc_ball_integral(const std::function<double(const Vec&)>& f,
                        const Vec& center, double radius,
                        std::size_t n_samples, std::uint64_t seed) {
  if (center.empty()) throw EmptyPointSet("mc_ball_integral: empty center");
  if (!(radius > 0.0)) throw InvalidRange("mc_ball_integral: need radius > 0");
  if (n_samples == 0) throw InvalidRange("mc_ball_integral: need samples");
  std::size_t d = center.size();
  Rng rng(seed);
  Vec x(d);
  double sum = 0.0;
  for (std::size_t s = 0; s < n_samples; ++s) {
    // Uniform in the ball: normalized Gaussian direction, radius ~ R u^{1/d}.
    double nrm2v = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      x[j] = rng.normal();
      nrm2v += x[j] * x[j];
    }
    double u = rng.uniform();
    double r = radius * std::pow(u, 1.0 / static_cast<double>(d));
    double scale = nrm2v > 0.0 ? r / std::sqrt(nrm2v) : 0.0;
    for (std::size_t j = 0; j < d; ++j) x[j] = center[j] + scale * x[j];
    sum += f(x);
  }
  double log_vol = 0.5 * static_cast<double>(d) * std::log(std::numbers::pi) +
                   static_cast<double>(d) * std::log(radius) -
                   std::lgamma(0.5 * static_cast<double>(d) + 1.0);
  return sum / static_cast<double>(n_samples) * std::exp(log_vol);
}

}  // namespace mixred
