#pragma once

#include <cstddef>

#include "mixred/matrix.hpp"

namespace mixred {

enum class ExpansionKind { Power, Helmholtz };

// Sum-of-Gaussians approximation of a radial kernel,
//   K(r) ~= sum_l weights[l] * exp(-exponents[l] * r^2),
// valid to relative accuracy eps on [delta, r_max]. Exponents ascend.
struct KernelExpansion {
  std::size_t d = 0;
  ExpansionKind kind = ExpansionKind::Power;
  double k = 0.0;  // Helmholtz wavenumber, 0 for the power kernel
  double h = 0.0;  // lattice step in the exponent variable
  Vec weights;
  Vec exponents;
  double delta = 0.0;
  double r_max = 0.0;
  double eps = 0.0;
};

// Expansion of the Poisson kernel C_d r^{2-d} in dimension d >= 3, where
// C_d = Gamma(d/2 + 1) / (d (d-2) pi^{d/2}) normalizes -Laplacian.
KernelExpansion power_kernel_expansion(std::size_t d, double eps, double delta,
                                       double r_max);

// Expansion of the Helmholtz kernel (2 pi)^{-d/2} (k/r)^nu K_nu(k r),
// nu = d/2 - 1, the Green's function of -Laplacian + k^2 in dimension d >= 3.
KernelExpansion helmholtz_kernel_expansion(std::size_t d, double k, double eps,
                                           double delta, double r_max);

// Kahan-compensated evaluation of the Gaussian sum at radius r.
double expansion_eval(const KernelExpansion& e, double r);

// The kernel the expansion approximates, evaluated directly.
double exact_kernel(const KernelExpansion& e, double r);

struct ValidationReport {
  double max_rel_err = 0.0;
  double worst_r = 0.0;
};

// Maximum relative error over a log-spaced grid of n_points radii
// covering [delta, r_max].
ValidationReport expansion_validate(const KernelExpansion& e,
                                    std::size_t n_points);

}  // namespace mixred
