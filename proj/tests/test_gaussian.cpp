#include <cmath>
#include <complex>
#include <numbers>

#include "doctest.h"
#include "mixred/common.hpp"
#include "mixred/gaussian.hpp"
#include "mixred/quadrature.hpp"

using namespace mixred;

namespace {

// Tensor Gauss rule over a square, ample for smooth rapidly decaying
// integrands.
template <typename F>
double quad2d(F f, double lo, double hi, std::size_t order = 160) {
  auto [x, w] = gauss_legendre(order, lo, hi);
  double s = 0.0;
  for (std::size_t i = 0; i < order; ++i)
    for (std::size_t j = 0; j < order; ++j)
      s += w[i] * w[j] * f(Vec{x[i], x[j]});
  return s;
}

GaussianAtom tilted_atom() {
  return make_atom(Vec{0.4, -0.2},
                   Covariance::full(2, Vec{1.2, 0.3, 0.3, 0.7}));
}

}  // namespace

TEST_CASE("covariance: storage kinds agree with the dense view") {
  Covariance iso = Covariance::iso(3, 2.0);
  CHECK(iso.at(1, 1) == 2.0);
  CHECK(iso.at(0, 2) == 0.0);
  Covariance dia = Covariance::diagonal(Vec{1.0, 4.0});
  CHECK(dia.at(1, 1) == 4.0);
  Covariance ful = Covariance::full(2, Vec{2.0, 0.5, 0.5, 1.0});
  CHECK(ful.at(0, 1) == 0.5);
  Mat d = ful.dense();
  CHECK(d(1, 0) == 0.5);

  CHECK(cov_add(iso, iso).kind == CovKind::Iso);
  CHECK(cov_add(dia, dia).kind == CovKind::Diag);
  Covariance mixed = cov_add(dia, Covariance::iso(2, 1.0));
  CHECK(mixed.at(0, 0) == doctest::Approx(2.0));
  CHECK(mixed.at(1, 1) == doctest::Approx(5.0));

  CHECK_THROWS_AS(Covariance::iso(2, 0.0), NotSPD);
  CHECK_THROWS_AS(Covariance::diagonal(Vec{1.0, -2.0}), NotSPD);
  CHECK_THROWS_AS(cov_add(iso, dia), DimMismatch);
}

TEST_CASE("atom: peak value and unit norm") {
  GaussianAtom g = make_atom(Vec{0.0}, Covariance::iso(1, 1.0));
  CHECK(atom_eval(g, Vec{0.0}) ==
        doctest::Approx(std::pow(std::numbers::pi, -0.25)).epsilon(1e-14));
  double nrm = adaptive_quad_1d(
      [&](double x) { double v = atom_eval(g, Vec{x}); return v * v; }, -12.0,
      12.0, 1e-13);
  CHECK(nrm == doctest::Approx(1.0).epsilon(1e-11));

  GaussianAtom t = tilted_atom();
  double nrm2 = quad2d([&](const Vec& x) {
    double v = atom_eval(t, x);
    return v * v;
  }, -12.0, 12.0);
  CHECK(nrm2 == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("atom_inner: shifted pair has a closed value") {
  GaussianAtom a = make_atom(Vec{0.0}, Covariance::iso(1, 1.0));
  GaussianAtom b = make_atom(Vec{2.0}, Covariance::iso(1, 1.0));
  CHECK(atom_inner(a, b) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(atom_inner(a, a) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(log_atom_inner(a, b) == doctest::Approx(-1.0).epsilon(1e-13));
}

TEST_CASE("atom_inner: full covariances against quadrature") {
  GaussianAtom a = tilted_atom();
  GaussianAtom b = make_atom(Vec{-0.5, 0.8},
                             Covariance::full(2, Vec{0.6, -0.2, -0.2, 1.1}));
  double q = quad2d([&](const Vec& x) { return atom_eval(a, x) * atom_eval(b, x); },
                    -12.0, 12.0);
  CHECK(atom_inner(a, b) == doctest::Approx(q).epsilon(1e-10));
}

TEST_CASE("atom_product: pointwise identity and moments") {
  GaussianAtom a = make_atom(Vec{0.0}, Covariance::iso(1, 1.0));
  GaussianAtom b = make_atom(Vec{4.0}, Covariance::iso(1, 1.0));
  ScaledAtom p = atom_product(a, b);
  CHECK(p.atom.mu[0] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(p.atom.cov.at(0, 0) == doctest::Approx(0.5).epsilon(1e-14));
  for (double x : {-0.3, 1.1, 2.7})
    CHECK(atom_eval(a, Vec{x}) * atom_eval(b, Vec{x}) ==
          doctest::Approx(p.amplitude * atom_eval(p.atom, Vec{x})).epsilon(1e-12));

  GaussianAtom c = tilted_atom();
  GaussianAtom d = make_atom(Vec{-0.5, 0.8},
                             Covariance::full(2, Vec{0.6, -0.2, -0.2, 1.1}));
  ScaledAtom q = atom_product(c, d);
  for (const Vec& x : {Vec{0.0, 0.0}, Vec{0.7, -0.9}, Vec{-1.2, 0.4}})
    CHECK(atom_eval(c, x) * atom_eval(d, x) ==
          doctest::Approx(q.amplitude * atom_eval(q.atom, x)).epsilon(1e-11));
}

TEST_CASE("atom_convolve: against direct quadrature") {
  GaussianAtom a = make_atom(Vec{0.2}, Covariance::iso(1, 0.8));
  GaussianAtom b = make_atom(Vec{-0.5}, Covariance::iso(1, 1.3));
  ScaledAtom c = atom_convolve(a, b);
  CHECK(c.atom.cov.at(0, 0) == doctest::Approx(2.1).epsilon(1e-14));
  CHECK(c.atom.mu[0] == doctest::Approx(-0.3).epsilon(1e-14));
  for (double x : {0.0, 0.9}) {
    double q = adaptive_quad_1d(
        [&](double y) { return atom_eval(a, Vec{y}) * atom_eval(b, Vec{x - y}); },
        -15.0, 15.0, 1e-13);
    CHECK(c.amplitude * atom_eval(c.atom, Vec{x}) ==
          doctest::Approx(q).epsilon(1e-11));
  }
}

TEST_CASE("atom_convolve: transform of the convolution factorizes") {
  GaussianAtom a = tilted_atom();
  GaussianAtom b = make_atom(Vec{1.0, 0.3},
                             Covariance::diagonal(Vec{0.5, 0.9}));
  ScaledAtom c = atom_convolve(a, b);
  for (const Vec& xi : {Vec{0.3, -0.7}, Vec{1.1, 0.2}}) {
    std::complex<double> lhs = c.amplitude * atom_fourier(c.atom, xi);
    std::complex<double> rhs = std::pow(2.0 * std::numbers::pi, 1.0) *
                               atom_fourier(a, xi) * atom_fourier(b, xi);
    CHECK(std::abs(lhs - rhs) <= 1e-12);
  }
}

TEST_CASE("atom_fourier: against quadrature") {
  GaussianAtom g = make_atom(Vec{0.7}, Covariance::iso(1, 1.4));
  double xi = 1.3;
  double re = adaptive_quad_1d(
      [&](double x) { return atom_eval(g, Vec{x}) * std::cos(x * xi); }, -15.0,
      15.0, 1e-13);
  double im = adaptive_quad_1d(
      [&](double x) { return -atom_eval(g, Vec{x}) * std::sin(x * xi); }, -15.0,
      15.0, 1e-13);
  std::complex<double> f = atom_fourier(g, Vec{xi});
  double scale = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  CHECK(f.real() == doctest::Approx(scale * re).epsilon(1e-11));
  CHECK(f.imag() == doctest::Approx(scale * im).epsilon(1e-11));
}

TEST_CASE("atom_integral: against quadrature") {
  GaussianAtom g = tilted_atom();
  double q = quad2d([&](const Vec& x) { return atom_eval(g, x); }, -12.0, 12.0);
  CHECK(atom_integral(g) == doctest::Approx(q).epsilon(1e-10));
  CHECK(std::log(atom_integral(g)) ==
        doctest::Approx(atom_log_integral(g)).epsilon(1e-12));
}

TEST_CASE("atom_neg_laplacian: against finite differences") {
  GaussianAtom g = tilted_atom();
  Vec x{0.9, -0.6};
  double h = 1e-4;
  double lap = 0.0;
  for (std::size_t i = 0; i < 2; ++i) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    lap += (atom_eval(g, xp) - 2.0 * atom_eval(g, x) + atom_eval(g, xm)) / (h * h);
  }
  CHECK(atom_neg_laplacian(g, x) == doctest::Approx(-lap).epsilon(1e-6));
}

TEST_CASE("mixture_eval: point and batch forms agree") {
  Mixture m;
  m.dim = 1;
  m.coeffs = {0.5, -1.5};
  m.atoms.push_back(make_atom(Vec{0.0}, Covariance::iso(1, 1.0)));
  m.atoms.push_back(make_atom(Vec{1.0}, Covariance::iso(1, 2.0)));
  std::vector<Vec> pts{Vec{-0.4}, Vec{0.6}, Vec{2.0}};
  Vec batch = mixture_eval(m, pts);
  for (std::size_t i = 0; i < pts.size(); ++i)
    CHECK(batch[i] == mixture_eval(m, pts[i]));
}
