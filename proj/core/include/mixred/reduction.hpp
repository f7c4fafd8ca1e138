#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "mixred/gaussian.hpp"
#include "mixred/matrix.hpp"

namespace mixred {

// Gram oracle for a family of unit-norm terms: gram(i, j) = <phi_i, phi_j>,
// with gram(i, i) == 1.
using GramFn = std::function<double(std::size_t, std::size_t)>;

struct ReduceOptions {
  // Pivot threshold on the squared norm of the residual terms. A requested
  // L2 accuracy of delta corresponds to eps = delta^2.
  double eps = 1e-12;
  // Stop after this many pivots; 0 means no cap.
  std::size_t max_rank = 0;
  // Select index 0 first regardless of its pivot value (seed selection).
  bool forced_first = false;
  // If positive, pivot within [0, boundary) while significant pivots remain
  // there, then continue among [boundary, n) (equivalent-source selection).
  std::size_t phase_boundary = 0;
};

struct ReduceResult {
  std::vector<std::size_t> skeleton;  // selected indices, pivot order
  Vec coeffs;                         // updated coefficients of the skeleton
  std::size_t rank = 0;
};

// Greedy rank reduction via pivoted partial Cholesky of the Gram matrix.
// Selects terms while the largest residual squared norm is at least eps,
// then reassigns the removed terms' coefficients to the skeleton by solving
// the skeleton Gram system. O(r^2 n) plus r n Gram evaluations.
ReduceResult pivoted_gram_reduce(std::size_t n, const GramFn& gram,
                                 const Vec& coeffs, const ReduceOptions& opt);

// Same selection computed with modified Gram-Schmidt recurrences on the raw
// Gram panel. Produces the same skeleton as pivoted_gram_reduce in exact
// arithmetic; kept as an independent implementation for cross-checking.
ReduceResult mgs_gram_reduce(std::size_t n, const GramFn& gram,
                             const Vec& coeffs, const ReduceOptions& opt);

// Gram oracle of a mixture's atoms, with a closed form in one variable.
// The mixture must outlive the returned function.
GramFn mixture_gram(const Mixture& m);

// Mixture front ends. eps is the squared-norm pivot threshold in [0, 1).
ReduceResult cholesky_reduce(const Mixture& m, double eps);
ReduceResult mgs_reduce(const Mixture& m, double eps);

// Reduction through samples of the Fourier transform (dimension 1 only).
// Columns of the sample matrix are atoms evaluated at log-spaced frequencies;
// a column interpolative decomposition at relative tolerance eps picks the
// skeleton. r_guess controls the number of frequency samples.
ReduceResult frequency_reduce_1d(const Mixture& m, double eps,
                                 std::size_t r_guess = 225);

// Mixture restricted to the skeleton of r, with the updated coefficients.
Mixture select_mixture(const Mixture& m, const ReduceResult& r);

// A priori L2 error bound for discarding n - rank terms at threshold eps:
// |c|_2 sqrt((n - rank) eps), n = coeffs.size().
double theorem_bound(const Vec& coeffs, std::size_t rank, double eps);

}  // namespace mixred
