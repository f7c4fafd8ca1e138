#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "mixred/matrix.hpp"

namespace mixred {

enum class CovKind { Iso, Diag, Full };

// Symmetric positive definite covariance with a storage tag. Iso keeps one
// value, Diag keeps the diagonal, Full keeps the dense matrix row-major.
struct Covariance {
  CovKind kind = CovKind::Iso;
  std::size_t dim = 0;
  Vec data;

  static Covariance iso(std::size_t d, double value);
  static Covariance diagonal(Vec values);
  static Covariance full(std::size_t d, Vec values);

  double at(std::size_t i, std::size_t j) const;
  Mat dense() const;
};

// Sum of covariances. The result keeps the cheaper storage when both inputs
// share it (Iso+Iso stays Iso, Diag+Diag stays Diag), otherwise it is Full.
Covariance cov_add(const Covariance& a, const Covariance& b);

// Cholesky factor in matching storage. Throws NotSPD.
Covariance cov_chol(const Covariance& a);
double cov_log_det_from_chol(const Covariance& chol);
// L^{-1} x and (L L^T)^{-1} x for a factor from cov_chol.
Vec cov_chol_forward(const Covariance& chol, const Vec& x);
Vec cov_chol_solve(const Covariance& chol, const Vec& x);
Vec cov_mat_vec(const Covariance& a, const Vec& x);

// Gaussian normalized to unit L2 norm:
//   g(x) = det(pi Sigma)^{-1/4} exp(-(x-mu)^T Sigma^{-1} (x-mu) / 2).
// The factorization and normalization are precomputed by make_atom.
struct GaussianAtom {
  Vec mu;
  Covariance cov;
  Covariance chol;
  double log_det = 0.0;   // log det Sigma
  double log_norm = 0.0;  // -(d/4) log pi - (1/4) log det Sigma
};

GaussianAtom make_atom(Vec mu, Covariance cov);

double atom_eval(const GaussianAtom& g, const Vec& x);

// L2 inner product <g1, g2>; equals 1 when the atoms coincide.
double atom_inner(const GaussianAtom& a, const GaussianAtom& b);
double log_atom_inner(const GaussianAtom& a, const GaussianAtom& b);

struct ScaledAtom {
  GaussianAtom atom;
  double amplitude = 0.0;
};

// Pointwise product g_a g_b = amplitude * g_p.
ScaledAtom atom_product(const GaussianAtom& a, const GaussianAtom& b);
// Convolution (g_a * g_b)(x) = amplitude * g_c(x).
ScaledAtom atom_convolve(const GaussianAtom& a, const GaussianAtom& b);

// Unitary Fourier transform with kernel exp(-i x.xi):
//   (2 pi)^{-d/2} integral g(x) exp(-i x.xi) dx.
std::complex<double> atom_fourier(const GaussianAtom& g, const Vec& xi);

// integral of g over R^d and its logarithm.
double atom_integral(const GaussianAtom& g);
double atom_log_integral(const GaussianAtom& g);

// (-Laplacian g)(x) = g(x) (tr Sigma^{-1} - |Sigma^{-1}(x-mu)|^2).
double atom_neg_laplacian(const GaussianAtom& g, const Vec& x);

struct Mixture {
  std::size_t dim = 0;
  Vec coeffs;
  std::vector<GaussianAtom> atoms;
};

double mixture_eval(const Mixture& m, const Vec& x);
Vec mixture_eval(const Mixture& m, const std::vector<Vec>& points);

}  // namespace mixred
