#pragma once

#include <cstddef>
#include <vector>

#include "mixred/gaussian.hpp"
#include "mixred/kernel_expansion.hpp"

namespace mixred {

// Variable-coefficient screened problem
//   -div((1 + b) grad u) + k^2 u = f
// with a Gaussian contrast bump b(x) = amplitude * g_b(x).
struct EllipticProblem {
  ScaledAtom bump;
  double k = 1.0;
  Mixture f;
};

// First pass ignoring the contrast: the atoms of G_k * f above the
// coefficient cut, with the screened kernel expansion e. Kept unreduced so
// the candidate set below sees every surviving width; the one reduction
// happens on the full candidate set.
Mixture elliptic_initial_guess(const EllipticProblem& p, const KernelExpansion& e,
                               double coeff_trunc);

// Trial atoms for the corrected solve: the atoms of u0 together with the
// convolution of every kernel term with the Gaussian part of b * (u0 atom).
std::vector<GaussianAtom> elliptic_candidates(const EllipticProblem& p,
                                              const KernelExpansion& e,
                                              const Mixture& u0);

// Well-conditioned subset of the candidates, selected with unit coefficients
// at squared-norm threshold basis_eps. Coefficients are left at zero.
Mixture elliptic_reduce_basis(std::size_t dim,
                              const std::vector<GaussianAtom>& candidates,
                              double basis_eps);

// Least-squares Galerkin coefficients over the basis atoms:
//   <grad g_l, grad g_k> + <b grad g_l, grad g_k> + k^2 <g_l, g_k>.
Mixture elliptic_galerkin_solve(const EllipticProblem& p, const Mixture& basis);

// Largest modulus of the transformed equation residual over a probe set,
// normalized by the largest transformed source value. Probe frequencies run
// along the principal axes of every atom of u, n_s log-spaced magnitudes per
// axis.
double elliptic_residual_fourier(const EllipticProblem& p, const Mixture& u,
                                 std::size_t n_s);

}  // namespace mixred
