#pragma once

#include <cstddef>

namespace mixred {

// Regularized lower incomplete gamma P(a, x) = gamma(a, x) / Gamma(a).
double gamma_p(double a, double x);
// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);

// Scaled modified Bessel function of the first kind, exp(-z) I_nu(z),
// for nu >= 0 and z >= 0.
double bessel_i_scaled(double nu, double z);

// log(|Gamma(nu + i y)| / Gamma(nu)) for half-integer or integer nu > 0.
// Uses |Gamma(1/2 + iy)|^2 = pi / cosh(pi y), |Gamma(1 + iy)|^2 =
// pi y / sinh(pi y) and the recurrence |Gamma(s+1)|^2 = |s|^2 |Gamma(s)|^2.
double log_gamma_ratio_imag(double nu, double y);

// Modified Bessel function of the second kind K_nu(z) for half-integer
// nu = 1/2, 3/2, ... via the closed form for K_{1/2} and upward recurrence.
// twice_nu must be a positive odd integer.
double bessel_k_half(int twice_nu, double z);

}  // namespace mixred
