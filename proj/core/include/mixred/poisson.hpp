#pragma once

#include <cstddef>
#include <vector>

#include "mixred/gaussian.hpp"
#include "mixred/kernel_expansion.hpp"
#include "mixred/reduction.hpp"

namespace mixred {

// Free-space convolution of a Gaussian mixture with a kernel given as a sum
// of Gaussians. Every (kernel term, source atom) pair contributes one atom;
// `dense` keeps all of them above the coefficient cut, `reduced` is the
// compressed result.
struct PoissonSolution {
  Mixture dense;
  Mixture reduced;
  std::size_t n_pairs = 0;  // candidate count before the coefficient cut
};

// Convolve every source atom with every kernel term. coeff_trunc drops
// candidates whose peak value falls below coeff_trunc times the largest
// peak; the cut uses peak values rather than unit-norm coefficients because
// wide far-field atoms carry large coefficients in the L2 convention while
// contributing little pointwise.
Mixture kernel_convolve(const Mixture& f, const KernelExpansion& e,
                        double coeff_trunc);

// kernel_convolve followed by a reduction of the surviving atoms; red_eps is
// the squared-norm threshold of that reduction.
PoissonSolution poisson_solve(const Mixture& f, const KernelExpansion& e,
                              double coeff_trunc, double red_eps);

// Evaluation points along the principal axes of each atom: for axis j with
// variance lambda_j the points sweep [-s_j, s_j] around the mean, where
// s_j = sqrt(-2 lambda_j log(decay)) is the radius at which the atom has
// fallen to `decay` of its peak.
std::vector<Vec> principal_direction_samples(const Mixture& f, std::size_t n_s,
                                             double decay);

// Pointwise residual (-Laplacian u)(x) - f(x) at the given points.
Vec residual_laplacian(const Mixture& u, const Mixture& f,
                       const std::vector<Vec>& points);

}  // namespace mixred
