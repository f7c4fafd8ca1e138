#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "mixred/common.hpp"
#include "mixred/reduction.hpp"
#include "mixred/rng.hpp"

using namespace mixred;

namespace {

Mixture random_mixture_1d(Rng& rng, std::size_t n) {
  Mixture m;
  m.dim = 1;
  for (std::size_t i = 0; i < n; ++i) {
    m.coeffs.push_back(rng.uniform(-1.0, 1.0));
    double sigma = rng.uniform(0.05, 0.5);
    m.atoms.push_back(
        make_atom(Vec{rng.uniform(-5.0, 5.0)}, Covariance::iso(1, sigma * sigma)));
  }
  return m;
}

Mixture random_mixture_2d(Rng& rng, std::size_t n) {
  Mixture m;
  m.dim = 2;
  for (std::size_t i = 0; i < n; ++i) {
    m.coeffs.push_back(rng.uniform(-1.0, 1.0));
    Vec mu{rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
    Vec dg{rng.uniform(0.05, 1.0), rng.uniform(0.05, 1.0)};
    m.atoms.push_back(make_atom(std::move(mu), Covariance::diagonal(std::move(dg))));
  }
  return m;
}

// Exact squared L2 distance between the mixture and its reduction through
// the full Gram matrix.
double exact_l2_err(const Mixture& m, const ReduceResult& red) {
  std::size_t n = m.atoms.size();
  Vec diff = m.coeffs;
  for (std::size_t j = 0; j < red.rank; ++j)
    diff[red.skeleton[j]] = m.coeffs[red.skeleton[j]] - red.coeffs[j];
  double q = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      q += diff[i] * atom_inner(m.atoms[i], m.atoms[j]) * diff[j];
  return std::sqrt(std::max(q, 0.0));
}

}  // namespace

TEST_CASE("pivoted_gram_reduce: near duplicates collapse") {
  Mixture m;
  m.dim = 1;
  m.coeffs = {1.0, 1.0, 1.0};
  for (double mu : {0.0, 1e-4, 1.0})
    m.atoms.push_back(make_atom(Vec{mu}, Covariance::iso(1, 1.0)));
  ReduceResult r = cholesky_reduce(m, 1e-6);
  CHECK(r.rank == 2);
  std::set<std::size_t> skel(r.skeleton.begin(), r.skeleton.end());
  CHECK(skel.count(2) == 1);
}

TEST_CASE("pivoted_gram_reduce: exact duplicates fold their coefficients") {
  Mixture m;
  m.dim = 1;
  m.coeffs = {0.7, -0.2, 0.5};
  m.atoms.push_back(make_atom(Vec{0.0}, Covariance::iso(1, 1.0)));
  m.atoms.push_back(make_atom(Vec{2.0}, Covariance::iso(1, 0.5)));
  m.atoms.push_back(make_atom(Vec{0.0}, Covariance::iso(1, 1.0)));
  ReduceResult r = cholesky_reduce(m, 1e-10);
  REQUIRE(r.rank == 2);
  Mixture red = select_mixture(m, r);
  for (double x : {-1.0, 0.0, 0.5, 2.0, 3.5})
    CHECK(mixture_eval(red, Vec{x}) ==
          doctest::Approx(mixture_eval(m, Vec{x})).epsilon(1e-12));
}

TEST_CASE("pivoted_gram_reduce: option validation") {
  Rng rng(1);
  Mixture m = random_mixture_1d(rng, 4);
  ReduceOptions opt;
  opt.eps = 1.5;
  GramFn gram = [&m](std::size_t i, std::size_t j) {
    return atom_inner(m.atoms[i], m.atoms[j]);
  };
  CHECK_THROWS_AS(pivoted_gram_reduce(4, gram, m.coeffs, opt), ThresholdOutOfRange);
  CHECK_THROWS_AS(pivoted_gram_reduce(4, gram, Vec{1.0}, ReduceOptions{}),
                  DimMismatch);
  CHECK_THROWS_AS(pivoted_gram_reduce(0, gram, Vec{}, ReduceOptions{}),
                  EmptyPointSet);
}

TEST_CASE("pivoted_gram_reduce: max_rank caps the skeleton") {
  Rng rng(3);
  Mixture m = random_mixture_1d(rng, 30);
  GramFn gram = [&m](std::size_t i, std::size_t j) {
    return atom_inner(m.atoms[i], m.atoms[j]);
  };
  ReduceOptions opt;
  opt.eps = 0.0;
  opt.max_rank = 7;
  ReduceResult r = pivoted_gram_reduce(30, gram, m.coeffs, opt);
  CHECK(r.rank == 7);
}

TEST_CASE("pivoted_gram_reduce: forced first and phased pivoting") {
  Rng rng(4);
  Mixture m = random_mixture_1d(rng, 12);
  GramFn gram = [&m](std::size_t i, std::size_t j) {
    return atom_inner(m.atoms[i], m.atoms[j]);
  };
  ReduceOptions opt;
  opt.eps = 1e-10;
  opt.forced_first = true;
  ReduceResult r = pivoted_gram_reduce(12, gram, m.coeffs, opt);
  CHECK(r.skeleton[0] == 0);

  ReduceOptions ph;
  ph.eps = 1e-3;
  ph.phase_boundary = 3;
  ReduceResult rp = pivoted_gram_reduce(12, gram, m.coeffs, ph);
  // The first pivots must be drawn from the head of the family.
  bool in_head = true;
  std::size_t first_tail = rp.rank;
  for (std::size_t j = 0; j < rp.rank; ++j) {
    if (rp.skeleton[j] >= 3) {
      first_tail = j;
      break;
    }
  }
  for (std::size_t j = first_tail; j < rp.rank; ++j)
    if (rp.skeleton[j] < 3) in_head = false;
  CHECK(in_head);
}

TEST_CASE("theorem_bound: reference value") {
  Vec c(5, 1.0 / std::sqrt(5.0));
  CHECK(theorem_bound(c, 1, 1e-8) == doctest::Approx(2e-4).epsilon(1e-12));
  CHECK(theorem_bound(c, 5, 1e-8) == 0.0);
}

TEST_CASE("reduction error stays within the norm bound") {
  Rng rng(11);
  for (int inst = 0; inst < 40; ++inst) {
    std::size_t n = 10 + static_cast<std::size_t>(rng.uniform() * 50.0);
    Mixture m = (inst % 2 == 0) ? random_mixture_1d(rng, n)
                                : random_mixture_2d(rng, n);
    double eps = std::pow(10.0, rng.uniform(-10.0, -2.0));
    ReduceResult rc = cholesky_reduce(m, eps);
    double bound = theorem_bound(m.coeffs, rc.rank, eps);
    CHECK(exact_l2_err(m, rc) <= bound * (1.0 + 1e-7) + 1e-12);
    ReduceResult rm = mgs_reduce(m, eps);
    double bound_m = theorem_bound(m.coeffs, rm.rank, eps);
    CHECK(exact_l2_err(m, rm) <= bound_m * (1.0 + 1e-7) + 1e-12);
  }
}

TEST_CASE("cholesky and mgs pivoting agree on the skeleton") {
  for (int seed = 0; seed < 10; ++seed) {
    Rng rng(100 + seed);
    Mixture m = random_mixture_1d(rng, 60);
    ReduceResult a = cholesky_reduce(m, 1e-8);
    ReduceResult b = mgs_reduce(m, 1e-8);
    std::set<std::size_t> sa(a.skeleton.begin(), a.skeleton.end());
    std::set<std::size_t> sb(b.skeleton.begin(), b.skeleton.end());
    CHECK(sa == sb);
  }
}

TEST_CASE("mgs_gram_reduce: rejects phased options") {
  Rng rng(5);
  Mixture m = random_mixture_1d(rng, 5);
  GramFn gram = [&m](std::size_t i, std::size_t j) {
    return atom_inner(m.atoms[i], m.atoms[j]);
  };
  ReduceOptions opt;
  opt.forced_first = true;
  CHECK_THROWS_AS(mgs_gram_reduce(5, gram, m.coeffs, opt), InvalidRange);
}

TEST_CASE("frequency_reduce_1d: reduction error tracks the request") {
  Rng rng(21);
  Mixture m = random_mixture_1d(rng, 150);
  double eps = 1e-8;
  ReduceResult r = frequency_reduce_1d(m, eps);
  CHECK(r.rank < 150);
  Mixture red = select_mixture(m, r);
  double fmax = 0.0, emax = 0.0;
  for (int i = 0; i <= 512; ++i) {
    double x = -6.5 + 13.0 * static_cast<double>(i) / 512.0;
    double f = mixture_eval(m, Vec{x});
    fmax = std::max(fmax, std::abs(f));
    emax = std::max(emax, std::abs(f - mixture_eval(red, Vec{x})));
  }
  CHECK(emax <= 10.0 * eps * fmax);

  Mixture m2 = random_mixture_2d(rng, 4);
  CHECK_THROWS_AS(frequency_reduce_1d(m2, 1e-6), DimMismatch);
}
