#include "mixred/linalg.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "mixred/common.hpp"
#include "mixred/parallel.hpp"

namespace mixred {

using EMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using EVec = Eigen::VectorXd;

static Eigen::Map<const EMat> emap(const Mat& a) {
  return Eigen::Map<const EMat>(a.data(), static_cast<Eigen::Index>(a.rows()),
                                static_cast<Eigen::Index>(a.cols()));
}

Mat spd_cholesky(const Mat& a) {
  if (a.rows() != a.cols()) throw DimMismatch("spd_cholesky: matrix not square");
  std::size_t n = a.rows();
  Mat l(n, n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double diag = a(j, j) - dot(l.row(j), l.row(j), j);
    if (!(diag > 0.0))
      throw NotSPD("spd_cholesky: nonpositive pivot " + std::to_string(j), j);
    double ljj = std::sqrt(diag);
    l(j, j) = ljj;
    for (std::size_t i = j + 1; i < n; ++i)
      l(i, j) = (a(i, j) - dot(l.row(i), l.row(j), j)) / ljj;
  }
  return l;
}

Vec tri_solve(const Mat& t, const Vec& b, TriSide side, bool transpose) {
  if (t.rows() != t.cols()) throw DimMismatch("tri_solve: matrix not square");
  std::size_t n = t.rows();
  if (b.size() != n) throw DimMismatch("tri_solve: size mismatch");
  for (std::size_t i = 0; i < n; ++i)
    if (t(i, i) == 0.0)
      throw SingularDiagonal("tri_solve: zero diagonal at " + std::to_string(i));

  // T^T flips the triangle.
  bool lower = (side == TriSide::Lower) != transpose;
  Vec x(b);
  if (lower) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = x[i];
      for (std::size_t j = 0; j < i; ++j)
        s -= (transpose ? t(j, i) : t(i, j)) * x[j];
      x[i] = s / t(i, i);
    }
  } else {
    for (std::size_t ii = n; ii-- > 0;) {
      double s = x[ii];
      for (std::size_t j = ii + 1; j < n; ++j)
        s -= (transpose ? t(j, ii) : t(ii, j)) * x[j];
      x[ii] = s / t(ii, ii);
    }
  }
  return x;
}

EigenDecomposition sym_eigen(const Mat& a) {
  if (a.rows() != a.cols()) throw DimMismatch("sym_eigen: matrix not square");
  Eigen::SelfAdjointEigenSolver<EMat> solver(emap(a));
  if (solver.info() != Eigen::Success)
    throw NoConvergence("sym_eigen: eigensolver failed");
  std::size_t n = a.rows();
  EigenDecomposition out;
  out.values.resize(n);
  out.vectors = Mat(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    auto src = static_cast<Eigen::Index>(n - 1 - j);  // ascending to descending
    out.values[j] = solver.eigenvalues()(src);
    for (std::size_t i = 0; i < n; ++i)
      out.vectors(i, j) = solver.eigenvectors()(static_cast<Eigen::Index>(i), src);
  }
  return out;
}

Vec svd_lstsq(const Mat& a, const Vec& b, double rel_tol) {
  if (b.size() != a.rows()) throw DimMismatch("svd_lstsq: size mismatch");
  Eigen::BDCSVD<EMat> svd(emap(a), Eigen::ComputeThinU | Eigen::ComputeThinV);
  svd.setThreshold(rel_tol);
  EVec rhs = Eigen::Map<const EVec>(b.data(), static_cast<Eigen::Index>(b.size()));
  EVec x = svd.solve(rhs);
  return Vec(x.data(), x.data() + x.size());
}

Mat random_unitary(std::size_t d, Rng& rng) {
  EMat a(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rng.normal();
  Eigen::HouseholderQR<EMat> qr(a);
  EMat q = qr.householderQ() * EMat::Identity(d, d);
  EMat r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the gauge so the distribution is Haar and the result unique.
  for (std::size_t j = 0; j < d; ++j)
    if (r(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) < 0.0)
      q.col(static_cast<Eigen::Index>(j)) *= -1.0;
  Mat out(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      out(i, j) = q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return out;
}

IdResult matrix_id(const Mat& y, double tol) {
  if (tol < 0.0) throw ThresholdOutOfRange("matrix_id: negative tolerance");
  std::size_t m = y.rows(), n = y.cols();
  if (m == 0 || n == 0) throw DimMismatch("matrix_id: empty matrix");

  // Work on Y^T so that columns of Y are contiguous rows here.
  Mat w = transpose(y);
  Vec norms2(n), norms2_ref(n);
  for (std::size_t i = 0; i < n; ++i) {
    norms2[i] = dot(w.row(i), w.row(i), m);
    norms2_ref[i] = norms2[i];
  }
  double total2 = 0.0;
  for (double v : norms2) total2 += v;

  std::size_t max_rank = std::min(m, n);
  std::vector<std::size_t> skeleton;
  std::vector<char> in_skel(n, 0);  // chosen as a basis column
  std::vector<char> dead(n, 0);     // numerically empty, excluded from pivoting
  Mat r(max_rank, n, 0.0);          // row k holds <q_k, y_i> for every column i

  while (skeleton.size() < max_rank) {
    if (total2 == 0.0) break;
    double tail2 = 0.0;
    std::size_t pivot = n;
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (in_skel[i]) continue;
      tail2 += norms2[i];
      if (!dead[i] && norms2[i] > best) {
        best = norms2[i];
        pivot = i;
      }
    }
    if (tail2 <= tol * tol * total2) break;
    if (pivot == n || best <= 0.0) break;

    std::size_t k = skeleton.size();
    double* prow = w.row(pivot);
    // Re-orthogonalize the pivot row against the accepted basis; fold the
    // corrections into R so the factorization stays consistent.
    for (std::size_t l = 0; l < k; ++l) {
      double c = dot(w.row(skeleton[l]), prow, m);
      axpy(-c, w.row(skeleton[l]), prow, m);
      r(l, pivot) += c;
    }
    double rkk = std::sqrt(dot(prow, prow, m));
    if (rkk <= 0.0) {
      norms2[pivot] = 0.0;
      dead[pivot] = 1;
      continue;
    }
    for (std::size_t t = 0; t < m; ++t) prow[t] /= rkk;
    r(k, pivot) = rkk;
    in_skel[pivot] = 1;
    skeleton.push_back(pivot);

    parallel_for(n, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        if (in_skel[i]) continue;
        double* row = w.row(i);
        double rki = dot(prow, row, m);
        r(k, i) = rki;
        axpy(-rki, prow, row, m);
        norms2[i] -= rki * rki;
        // Recompute when cancellation ate three digits of the norm.
        if (norms2[i] < 1e-6 * norms2_ref[i]) {
          norms2[i] = dot(row, row, m);
          norms2_ref[i] = norms2[i];
        }
        if (norms2[i] < 0.0) norms2[i] = 0.0;
      }
    });
  }

  std::size_t rank = skeleton.size();
  IdResult out;
  out.skeleton = skeleton;
  out.rank = rank;
  double tail2 = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (!in_skel[i]) tail2 += std::max(norms2[i], 0.0);
  out.residual_norm = total2 > 0.0 ? std::sqrt(tail2 / total2) : 0.0;

  // X: identity on skeleton columns, back substitution for the rest.
  out.coeffs = Mat(rank, n, 0.0);
  for (std::size_t j = 0; j < rank; ++j) out.coeffs(j, skeleton[j]) = 1.0;
  if (rank > 0) {
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
      Vec z(rank);
      for (std::size_t i = begin; i < end; ++i) {
        if (in_skel[i]) continue;
        // Solve R11 z = R[:, i]; R11[l][j] = r(l, skeleton[j]) is upper
        // triangular in pivot order.
        for (std::size_t l = 0; l < rank; ++l) z[l] = r(l, i);
        for (std::size_t jj = rank; jj-- > 0;) {
          double s = z[jj];
          for (std::size_t l = jj + 1; l < rank; ++l)
            s -= r(jj, skeleton[l]) * z[l];
          z[jj] = s / r(jj, skeleton[jj]);
        }
        for (std::size_t jj = 0; jj < rank; ++jj) out.coeffs(jj, i) = z[jj];
      }
    });
  }
  return out;
}

}  // namespace mixred
