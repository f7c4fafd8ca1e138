#include <cmath>
#include <numbers>

#include "doctest.h"
#include "mixred/common.hpp"
#include "mixred/elliptic.hpp"
#include "mixred/kernel_expansion.hpp"
#include "mixred/poisson.hpp"

using namespace mixred;

namespace {

constexpr double kPi = std::numbers::pi;

// -Laplacian u = exp(-|x|^2 / 2) in three dimensions has the closed form
// u(r) = (2 pi)^{3/2} erf(r / sqrt(2)) / (4 pi r).
double gaussian_potential_3d(double r) {
  return std::pow(2.0 * kPi, 1.5) * std::erf(r / std::sqrt(2.0)) /
         (4.0 * kPi * r);
}

Mixture unit_gaussian_source(std::size_t d) {
  Mixture f;
  f.dim = d;
  f.coeffs.push_back(std::pow(kPi, 0.25 * static_cast<double>(d)));
  f.atoms.push_back(make_atom(Vec(d, 0.0), Covariance::iso(d, 1.0)));
  return f;
}

}  // namespace

TEST_CASE("poisson_solve: reproduces the Gaussian potential") {
  Mixture f = unit_gaussian_source(3);
  KernelExpansion e = power_kernel_expansion(3, 1e-10, 1e-5, 60.0);
  PoissonSolution sol = poisson_solve(f, e, 1e-12, 1e-13);
  CHECK(sol.n_pairs == e.weights.size());
  CHECK(sol.reduced.atoms.size() <= sol.dense.atoms.size());

  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    double r = 0.5 + 7.5 * static_cast<double>(i) / 19.0;
    double u = mixture_eval(sol.reduced, Vec{r, 0.0, 0.0});
    worst = std::max(worst, std::abs(u - gaussian_potential_3d(r)));
  }
  CHECK(worst <= 1e-6);

  std::vector<Vec> pts = principal_direction_samples(f, 7, 1e-8);
  Vec res = residual_laplacian(sol.dense, f, pts);
  for (double v : res) CHECK(std::abs(v) <= 1e-5);
}

TEST_CASE("poisson_solve: argument validation") {
  Mixture f = unit_gaussian_source(3);
  KernelExpansion e = power_kernel_expansion(3, 1e-6, 1e-3, 10.0);
  CHECK_THROWS_AS(poisson_solve(Mixture{}, e, 1e-10, 1e-12), EmptyPointSet);
  CHECK_THROWS_AS(poisson_solve(f, e, 1.5, 1e-12), ThresholdOutOfRange);
}

TEST_CASE("principal_direction_samples: sweeps each principal axis") {
  Mixture f;
  f.dim = 2;
  f.coeffs.push_back(1.0);
  f.atoms.push_back(make_atom(Vec{1.0, -1.0}, Covariance::diagonal(Vec{4.0, 1.0})));
  double decay = std::exp(-2.0);
  std::vector<Vec> pts = principal_direction_samples(f, 3, decay);
  REQUIRE(pts.size() == 6);
  // Leading axis has variance 4, so the sweep radius is sqrt(2 * 4 * 2) = 4.
  CHECK(pts[0][0] == doctest::Approx(-3.0).epsilon(1e-12));
  CHECK(pts[0][1] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(pts[1][0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pts[2][0] == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(std::abs(pts[3][1] - (-3.0)) < 1e-12);
  CHECK(std::abs(pts[5][1] - 1.0) < 1e-12);

  CHECK_THROWS_AS(principal_direction_samples(f, 1, 1e-6), InvalidRange);
  CHECK_THROWS_AS(principal_direction_samples(f, 3, 1.0), InvalidRange);
}

TEST_CASE("elliptic pipeline: contrast bump correction") {
  EllipticProblem p;
  p.k = 1.0;
  p.f = unit_gaussian_source(3);
  p.bump.atom = make_atom(Vec{1.0, 0.0, 0.0}, Covariance::iso(3, 0.5));
  p.bump.amplitude = 0.5;

  KernelExpansion e = helmholtz_kernel_expansion(3, p.k, 1e-8, 1e-5, 60.0);
  Mixture u0 = elliptic_initial_guess(p, e, 1e-10);
  CHECK(u0.atoms.size() > 0);

  std::vector<GaussianAtom> cand = elliptic_candidates(p, e, u0);
  CHECK(cand.size() == u0.atoms.size() * (1 + e.weights.size()));

  Mixture basis = elliptic_reduce_basis(3, cand, 1e-8);
  CHECK(basis.atoms.size() > 0);
  CHECK(basis.atoms.size() < cand.size());

  Mixture u = elliptic_galerkin_solve(p, basis);
  REQUIRE(u.atoms.size() == basis.atoms.size());
  double res = elliptic_residual_fourier(p, u, 6);
  CHECK(res <= 1e-3);
}
