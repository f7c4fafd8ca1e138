#pragma once

#include <cstddef>
#include <vector>

#include "mixred/matrix.hpp"
#include "mixred/rng.hpp"

namespace mixred {

// Cholesky factor L (lower triangular, L L^T = A) of a symmetric positive
// definite matrix. Only the lower triangle of A is read. Throws NotSPD with
// the index of the first nonpositive pivot.
Mat spd_cholesky(const Mat& a);

enum class TriSide { Lower, Upper };

// Solves T x = b (or T^T x = b) for a triangular T. Throws SingularDiagonal
// on a zero diagonal entry and DimMismatch on shape errors.
Vec tri_solve(const Mat& t, const Vec& b, TriSide side, bool transpose = false);

struct EigenDecomposition {
  Vec values;   // descending
  Mat vectors;  // column j is the eigenvector for values[j]
};

// Eigendecomposition of a symmetric matrix, eigenvalues in descending order.
EigenDecomposition sym_eigen(const Mat& a);

// Minimum-norm least squares solution of A x = b via SVD. Singular values
// below rel_tol * sigma_max are treated as zero.
Vec svd_lstsq(const Mat& a, const Vec& b, double rel_tol = 1e-12);

// Haar-distributed d x d orthogonal matrix: QR of a standard normal matrix
// (entries drawn row by row) with the sign of each R diagonal fixed.
Mat random_unitary(std::size_t d, Rng& rng);

struct IdResult {
  std::vector<std::size_t> skeleton;  // selected column indices, pivot order
  Mat coeffs;                         // r x n interpolation matrix X
  double residual_norm = 0.0;         // relative Frobenius norm of the tail
  std::size_t rank = 0;
};

// Column interpolative decomposition Y ~= Y[:, skeleton] * X with
// X[:, skeleton[j]] = e_j, computed by column-pivoted Gram-Schmidt with a
// relative Frobenius stopping tolerance.
IdResult matrix_id(const Mat& y, double tol);

}  // namespace mixred
