#pragma once

#include <cstddef>
#include <vector>

#include "mixred/kernel_expansion.hpp"
#include "mixred/matrix.hpp"
#include "mixred/reduction.hpp"

namespace mixred {

// integral over the ball |x - c| <= radius of exp(-tau |x - y|^2), where
// b = |c - y|. Closed form of the three-dimensional integral; it is used as
// the cross-section weight for any ambient dimension.
double gaussian_ball_integral(double tau, double b, double radius);

// Reference value of the same integral in dimension d by radial quadrature.
double gaussian_ball_integral_nd(std::size_t d, double tau, double b,
                                 double radius);

// Potentials sum_n strengths[n] |x_m - y_n|^r_exponent at every target.
// The default is the inverse-distance kernel.
Vec direct_sums(const std::vector<Vec>& sources, const Vec& strengths,
                const std::vector<Vec>& targets, double r_exponent = -1.0);

struct SkeletonSources {
  std::vector<std::size_t> selected;  // indices into the input family
  Vec strengths;                      // effective strengths of the selected
};

// Subset of the sources whose span reproduces the field of all of them over
// the target ball. The field inner products come from the kernel expansion e
// restricted to the ball, and every source is normalized by its own induced
// norm before pivoting.
SkeletonSources skeleton_sources(const std::vector<Vec>& sources,
                                 const Vec& strengths, const KernelExpansion& e,
                                 const Vec& ball_center, double ball_radius,
                                 double red_eps);

// Same factorization, but the skeleton is drawn from a separate candidate
// set (carrying zero strength) that is pivoted before the sources.
SkeletonSources equivalent_sources(const std::vector<Vec>& candidates,
                                   const std::vector<Vec>& sources,
                                   const Vec& strengths, const KernelExpansion& e,
                                   const Vec& ball_center, double ball_radius,
                                   double red_eps);

// Representative points: the family mean is eliminated first, the seeds are
// the points the pivoting selects after it. bandwidth sets the length scale
// of the similarity, eps the stopping threshold. A positive n_seeds caps the
// count, returning the first n_seeds pivots even if more clear eps.
std::vector<std::size_t> select_seeds(const std::vector<Vec>& points,
                                      double bandwidth, double eps,
                                      std::size_t n_seeds = 0);

// Index into seeds of the nearest seed per point, lowest index on ties.
std::vector<std::size_t> assign_groups(const std::vector<Vec>& points,
                                       const std::vector<std::size_t>& seeds);

}  // namespace mixred
