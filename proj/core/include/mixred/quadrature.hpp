#pragma once

#include <cstdint>
#include <functional>
#include <utility>

#include "mixred/matrix.hpp"

namespace mixred {

// Gauss-Legendre nodes and weights on [a, b].
std::pair<Vec, Vec> gauss_legendre(std::size_t order, double a, double b);

// Adaptive Simpson integration of f on [a, b] to absolute tolerance tol.
// Throws MaxDepthExceeded when bisection passes depth 60 without converging.
double adaptive_quad_1d(const std::function<double(double)>& f, double a,
                        double b, double tol);

// Monte Carlo integral of f over the ball |x - center| <= radius, n_samples
// uniform draws from the ball. Deterministic for a given seed.
double mc_ball_integral(const std::function<double(const Vec&)>& f,
                        const Vec& center, double radius,
                        std::size_t n_samples, std::uint64_t seed);

}  // namespace mixred
