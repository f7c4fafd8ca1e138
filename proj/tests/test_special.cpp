#include <cmath>
#include <numbers>

#include "doctest.h"
#include "mixred/common.hpp"
#include "mixred/quadrature.hpp"
#include "mixred/special.hpp"

using namespace mixred;

TEST_CASE("gamma_p: half integer order matches erf") {
  for (double x : {0.01, 0.3, 1.0, 4.0, 20.0})
    CHECK(gamma_p(0.5, x) == doctest::Approx(std::erf(std::sqrt(x))).epsilon(1e-13));
}

TEST_CASE("gamma_q: unit order matches the exponential") {
  for (double x : {0.1, 1.0, 5.0, 30.0})
    CHECK(gamma_q(1.0, x) == doctest::Approx(std::exp(-x)).epsilon(1e-13));
}

TEST_CASE("gamma_p and gamma_q: complements") {
  for (double a : {0.5, 1.5, 2.5, 7.0})
    for (double x : {0.2, 2.0, 9.0})
      CHECK(gamma_p(a, x) + gamma_q(a, x) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(gamma_p(2.0, 0.0) == 0.0);
  CHECK(gamma_q(2.0, 0.0) == 1.0);
  CHECK_THROWS_AS(gamma_p(-1.0, 1.0), InvalidRange);
  CHECK_THROWS_AS(gamma_q(1.0, -1.0), InvalidRange);
}

TEST_CASE("bessel_i_scaled: reference values") {
  // e^{-1} I_0(1)
  CHECK(bessel_i_scaled(0.0, 1.0) ==
        doctest::Approx(1.2660658777520084 * std::exp(-1.0)).epsilon(1e-14));
  // Half order has the closed form sqrt(2/(pi z)) sinh z.
  for (double z : {0.3, 2.0, 10.0, 40.0}) {
    double expect = std::sqrt(2.0 / (std::numbers::pi * z)) *
                    (1.0 - std::exp(-2.0 * z)) / 2.0;
    CHECK(bessel_i_scaled(0.5, z) == doctest::Approx(expect).epsilon(1e-12));
  }
  CHECK(bessel_i_scaled(0.0, 0.0) == 1.0);
  CHECK(bessel_i_scaled(2.0, 0.0) == 0.0);
}

TEST_CASE("bessel_i_scaled: series and asymptotic branches agree") {
  // The switch for small orders sits at z = 15; the half-order closed form
  // checks whichever branch is active on each side.
  for (double z : {14.999, 15.001}) {
    double expect = std::sqrt(2.0 / (std::numbers::pi * z)) *
                    (1.0 - std::exp(-2.0 * z)) / 2.0;
    CHECK(bessel_i_scaled(0.5, z) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("bessel_k_half: closed forms of the first half orders") {
  for (double z : {0.7, 5.0}) {
    double base = std::sqrt(std::numbers::pi / (2.0 * z)) * std::exp(-z);
    CHECK(bessel_k_half(1, z) == doctest::Approx(base).epsilon(1e-13));
    CHECK(bessel_k_half(3, z) == doctest::Approx(base * (1.0 + 1.0 / z)).epsilon(1e-13));
    CHECK(bessel_k_half(5, z) ==
          doctest::Approx(base * (1.0 + 3.0 / z + 3.0 / (z * z))).epsilon(1e-13));
  }
}

TEST_CASE("log_gamma_ratio_imag: against closed form moduli") {
  for (double y : {0.5, 2.0, 8.0}) {
    // |Gamma(1/2 + iy)|^2 = pi / cosh(pi y)
    double expect_half = -0.5 * std::log(std::cosh(std::numbers::pi * y));
    CHECK(log_gamma_ratio_imag(0.5, y) == doctest::Approx(expect_half).epsilon(1e-12));
    // |Gamma(1 + iy)|^2 = pi y / sinh(pi y)
    double expect_one =
        0.5 * std::log(std::numbers::pi * y / std::sinh(std::numbers::pi * y));
    CHECK(log_gamma_ratio_imag(1.0, y) == doctest::Approx(expect_one).epsilon(1e-12));
    // One recurrence step up from each.
    double expect_2half = 0.5 * std::log((2.25 + y * y) * (0.25 + y * y) *
                                         std::numbers::pi /
                                         std::cosh(std::numbers::pi * y)) -
                          std::lgamma(2.5);
    CHECK(log_gamma_ratio_imag(2.5, y) == doctest::Approx(expect_2half).epsilon(1e-12));
  }
  CHECK(log_gamma_ratio_imag(1.5, 0.0) == 0.0);
}

TEST_CASE("gauss_legendre: low order nodes and polynomial exactness") {
  auto [x2, w2] = gauss_legendre(2, -1.0, 1.0);
  CHECK(x2[0] == doctest::Approx(-1.0 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(x2[1] == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(w2[0] == doctest::Approx(1.0));
  CHECK(w2[1] == doctest::Approx(1.0));

  auto [x3, w3] = gauss_legendre(3, 0.0, 1.0);
  double s = 0.0;
  for (std::size_t i = 0; i < 3; ++i) s += w3[i] * std::pow(x3[i], 5);
  CHECK(s == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
}

TEST_CASE("adaptive_quad_1d: smooth integrands") {
  double s = adaptive_quad_1d([](double x) { return std::sin(x); }, 0.0,
                              std::numbers::pi, 1e-12);
  CHECK(s == doctest::Approx(2.0).epsilon(1e-11));
  double p = adaptive_quad_1d([](double x) { return x * x; }, 0.0, 1.0, 1e-12);
  CHECK(p == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK_THROWS_AS(adaptive_quad_1d([](double) { return 0.0; }, 1.0, 0.0, 1e-10),
                  InvalidRange);
  CHECK_THROWS_AS(adaptive_quad_1d([](double) { return 0.0; }, 0.0, 1.0, 0.0),
                  ThresholdOutOfRange);
}

TEST_CASE("mc_ball_integral: volume and reproducibility") {
  auto one = [](const Vec&) { return 1.0; };
  Vec c{0.0, 0.0};
  double vol = mc_ball_integral(one, c, 1.5, 100000, 3);
  CHECK(vol == doctest::Approx(std::numbers::pi * 2.25).epsilon(0.03));
  CHECK(mc_ball_integral(one, c, 1.5, 1000, 3) ==
        mc_ball_integral(one, c, 1.5, 1000, 3));
}
