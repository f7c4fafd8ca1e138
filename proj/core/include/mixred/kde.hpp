#pragma once

#include <cstddef>
#include <vector>

#include "mixred/gaussian.hpp"
#include "mixred/matrix.hpp"
#include "mixred/reduction.hpp"
#include "mixred/rng.hpp"

namespace mixred {

// Rule-of-thumb bandwidth (4 / ((2 d + 1) n))^{1/(d+4)} for n samples whose
// effective dimension is d.
double silverman_bandwidth(std::size_t d, std::size_t n);

// Kernel density estimate with isotropic bandwidth h as a mixture of
// unit-norm atoms: the density is (1/n) sum_i (2 pi h^2)^{-d/2}
// exp(-|x - x_i|^2 / (2 h^2)).
Mixture kde_build(const std::vector<Vec>& points, double h);

// Reduction specialized to equal isotropic covariances, where the Gram
// matrix is exp(-|x_i - x_j|^2 / (4 h^2)).
ReduceResult kde_reduce(const Mixture& m, double eps);

// Two well-separated anisotropic blobs in a plane, embedded in d dimensions
// and rotated by a random orthogonal frame. The frame is drawn from its own
// stream, so the same seed yields the same plane samples in every dimension.
// If basis is non-null it receives the frame, whose first two columns span
// the data plane.
std::vector<Vec> rotated_plane_dataset(std::size_t d, std::size_t n, Rng& rng,
                                       Mat* basis);

}  // namespace mixred
