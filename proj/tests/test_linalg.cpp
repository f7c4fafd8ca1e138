#include <cmath>

#include "doctest.h"
#include "mixred/common.hpp"
#include "mixred/linalg.hpp"
#include "mixred/rng.hpp"

using namespace mixred;

TEST_CASE("mat: storage and products") {
  Mat a(2, 3, 0.0);
  a(0, 0) = 1.0;
  a(0, 2) = 2.0;
  a(1, 1) = -3.0;
  CHECK(a.rows() == 2);
  CHECK(a.cols() == 3);
  Vec x{1.0, 2.0, 3.0};
  Vec y = mat_vec(a, x);
  CHECK(y[0] == doctest::Approx(7.0));
  CHECK(y[1] == doctest::Approx(-6.0));

  Mat b(3, 2, 1.0);
  Mat c = mat_mul(a, b);
  CHECK(c(0, 0) == doctest::Approx(3.0));
  CHECK(c(1, 1) == doctest::Approx(-3.0));
  Mat at = transpose(a);
  CHECK(at(2, 0) == doctest::Approx(2.0));
}

TEST_CASE("spd_cholesky: known factor") {
  Mat a(2, 2);
  a(0, 0) = 4.0;
  a(0, 1) = 2.0;
  a(1, 0) = 2.0;
  a(1, 1) = 3.0;
  Mat l = spd_cholesky(a);
  CHECK(l(0, 0) == doctest::Approx(2.0));
  CHECK(l(1, 0) == doctest::Approx(1.0));
  CHECK(l(0, 1) == doctest::Approx(0.0));
  CHECK(l(1, 1) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("spd_cholesky: indefinite input reports the pivot") {
  Mat a(2, 2);
  a(0, 0) = 1.0;
  a(0, 1) = 2.0;
  a(1, 0) = 2.0;
  a(1, 1) = 1.0;
  try {
    spd_cholesky(a);
    FAIL("expected NotSPD");
  } catch (const NotSPD& e) {
    CHECK(e.pivot_index == 1);
  }
}

TEST_CASE("tri_solve: lower, upper and transposed systems") {
  Mat l(2, 2, 0.0);
  l(0, 0) = 2.0;
  l(1, 0) = 1.0;
  l(1, 1) = 3.0;
  Vec x = tri_solve(l, Vec{2.0, 7.0}, TriSide::Lower);
  CHECK(x[0] == doctest::Approx(1.0));
  CHECK(x[1] == doctest::Approx(2.0));

  // L^T y = b through the transposed path equals solving the upper system.
  Vec y = tri_solve(l, Vec{4.0, 6.0}, TriSide::Lower, true);
  CHECK(y[1] == doctest::Approx(2.0));
  CHECK(y[0] == doctest::Approx(1.0));

  Mat z(2, 2, 0.0);
  z(1, 1) = 0.0;
  z(0, 0) = 1.0;
  CHECK_THROWS_AS(tri_solve(z, Vec{1.0, 1.0}, TriSide::Lower), SingularDiagonal);
  CHECK_THROWS_AS(tri_solve(l, Vec{1.0}, TriSide::Lower), DimMismatch);
}

TEST_CASE("sym_eigen: reconstructs a Hilbert block") {
  std::size_t n = 4;
  Mat h(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      h(i, j) = 1.0 / static_cast<double>(i + j + 1);
  EigenDecomposition ed = sym_eigen(h);
  for (std::size_t i = 0; i + 1 < n; ++i) CHECK(ed.values[i] >= ed.values[i + 1]);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double r = 0.0;
      for (std::size_t kk = 0; kk < n; ++kk)
        r += ed.vectors(i, kk) * ed.values[kk] * ed.vectors(j, kk);
      CHECK(r == doctest::Approx(h(i, j)).epsilon(1e-12));
    }
}

TEST_CASE("svd_lstsq: minimum norm on a singular system") {
  Mat a(2, 2, 1.0);
  Vec x = svd_lstsq(a, Vec{2.0, 2.0});
  CHECK(x[0] == doctest::Approx(1.0));
  CHECK(x[1] == doctest::Approx(1.0));

  Mat b(3, 2, 0.0);
  b(0, 0) = 1.0;
  b(1, 1) = 2.0;
  b(2, 0) = 1.0;
  Vec y = svd_lstsq(b, Vec{1.0, 4.0, 1.0});
  CHECK(y[0] == doctest::Approx(1.0));
  CHECK(y[1] == doctest::Approx(2.0));
}

TEST_CASE("random_unitary: orthogonal and reproducible") {
  Rng rng(42);
  Mat q = random_unitary(5, rng);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) {
      double g = 0.0;
      for (std::size_t kk = 0; kk < 5; ++kk) g += q(kk, i) * q(kk, j);
      CHECK(g == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
    }
  Rng rng2(42);
  Mat q2 = random_unitary(5, rng2);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) CHECK(q(i, j) == q2(i, j));
}

TEST_CASE("matrix_id: proportional columns collapse to the larger one") {
  Mat y(3, 2);
  for (std::size_t i = 0; i < 3; ++i) {
    y(i, 0) = static_cast<double>(i + 1);
    y(i, 1) = 2.0 * static_cast<double>(i + 1);
  }
  IdResult id = matrix_id(y, 1e-12);
  REQUIRE(id.rank == 1);
  CHECK(id.skeleton[0] == 1);
  CHECK(id.coeffs(0, 0) == doctest::Approx(0.5));
  CHECK(id.coeffs(0, 1) == doctest::Approx(1.0));
  CHECK(id.residual_norm <= 1e-12);
}

TEST_CASE("matrix_id: recovers an exact low rank factorization") {
  Rng rng(7);
  std::size_t m = 20, n = 30, r = 3;
  Mat u(m, r), v(r, n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < r; ++j) u(i, j) = rng.normal();
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < n; ++j) v(i, j) = rng.normal();
  Mat y = mat_mul(u, v);
  IdResult id = matrix_id(y, 1e-10);
  REQUIRE(id.rank == r);
  // Columns rebuild as Y[:, skel] X.
  for (std::size_t j = 0; j < n; ++j)
    for (std::size_t i = 0; i < m; ++i) {
      double rec = 0.0;
      for (std::size_t kk = 0; kk < r; ++kk)
        rec += y(i, id.skeleton[kk]) * id.coeffs(kk, j);
      CHECK(rec == doctest::Approx(y(i, j)).epsilon(1e-8));
    }
}

TEST_CASE("matrix_id: tolerance controls the rank") {
  Mat y(4, 3, 0.0);
  y(0, 0) = 1.0;
  y(1, 1) = 1e-3;
  y(2, 2) = 1e-6;
  CHECK(matrix_id(y, 1e-1).rank == 1);
  CHECK(matrix_id(y, 1e-4).rank == 2);
  CHECK(matrix_id(y, 1e-9).rank == 3);
}
