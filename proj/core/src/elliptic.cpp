#include "mixred/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include "mixred/common.hpp"
#include "mixred/linalg.hpp"
#include "mixred/parallel.hpp"
#include "mixred/poisson.hpp"
#include "mixred/reduction.hpp"

namespace mixred {

namespace {

Mat cov_inverse_dense(const GaussianAtom& a) {
  std::size_t d = a.mu.size();
  Mat inv(d, d, 0.0);
  Vec e(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    e[j] = 1.0;
    Vec col = cov_chol_solve(a.chol, e);
    for (std::size_t i = 0; i < d; ++i) inv(i, j) = col[i];
    e[j] = 0.0;
  }
  return inv;
}

// tr(A B C) for dense d x d matrices.
double trace_prod3(const Mat& a, const Mat& b, const Mat& c) {
  std::size_t d = a.rows();
  Mat bc = mat_mul(b, c);
  double tr = 0.0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) tr += a(i, j) * bc(j, i);
  return tr;
}

}  // namespace

Mixture elliptic_initial_guess(const EllipticProblem& p, const KernelExpansion& e,
                               double coeff_trunc) {
  return kernel_convolve(p.f, e, coeff_trunc);
}

std::vector<GaussianAtom> elliptic_candidates(const EllipticProblem& p,
                                              const KernelExpansion& e,
                                              const Mixture& u0) {
  if (u0.atoms.empty()) throw EmptyPointSet("elliptic_candidates: empty first pass");
  std::size_t d = u0.dim;
  std::vector<GaussianAtom> out;
  out.reserve(u0.atoms.size() * (1 + e.weights.size()));
  for (const auto& a : u0.atoms) out.push_back(a);
  std::vector<GaussianAtom> pj;
  pj.reserve(u0.atoms.size());
  for (const auto& a : u0.atoms)
    pj.push_back(atom_product(p.bump.atom, a).atom);
  for (std::size_t l = 0; l < e.weights.size(); ++l) {
    GaussianAtom gterm =
        make_atom(Vec(d, 0.0), Covariance::iso(d, 1.0 / (2.0 * e.exponents[l])));
    for (const auto& q : pj) out.push_back(atom_convolve(gterm, q).atom);
  }
  return out;
}

Mixture elliptic_reduce_basis(std::size_t dim,
                              const std::vector<GaussianAtom>& candidates,
                              double basis_eps) {
  if (candidates.empty()) throw EmptyPointSet("elliptic_reduce_basis: no candidates");
  ReduceOptions opt;
  opt.eps = basis_eps;
  const std::vector<GaussianAtom>* atoms = &candidates;
  GramFn gram = [atoms](std::size_t i, std::size_t j) {
    return atom_inner((*atoms)[i], (*atoms)[j]);
  };
  ReduceResult red =
      pivoted_gram_reduce(candidates.size(), gram, Vec(candidates.size(), 1.0), opt);
  Mixture basis;
  basis.dim = dim;
  basis.coeffs.assign(red.rank, 0.0);
  basis.atoms.reserve(red.rank);
  for (std::size_t idx : red.skeleton) basis.atoms.push_back(candidates[idx]);
  return basis;
}

Mixture elliptic_galerkin_solve(const EllipticProblem& p, const Mixture& basis) {
  std::size_t n = basis.atoms.size();
  if (n == 0) throw EmptyPointSet("elliptic_galerkin_solve: empty basis");
  std::size_t d = basis.dim;

  std::vector<Mat> inv(n);
  for (std::size_t i = 0; i < n; ++i) inv[i] = cov_inverse_dense(basis.atoms[i]);

  Mat a(n, n, 0.0);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    Vec u(d), v(d), dl(d), dk(d);
    for (std::size_t k = begin; k < end; ++k) {
      const GaussianAtom& gk = basis.atoms[k];
      for (std::size_t l = k; l < n; ++l) {
        const GaussianAtom& gl = basis.atoms[l];
        ScaledAtom pr = atom_product(gl, gk);
        double ip = atom_integral(pr.atom);
        Mat sp = pr.atom.cov.dense();

        for (std::size_t i = 0; i < d; ++i) {
          dl[i] = pr.atom.mu[i] - gl.mu[i];
          dk[i] = pr.atom.mu[i] - gk.mu[i];
        }
        u = mat_vec(inv[l], dl);
        v = mat_vec(inv[k], dk);
        double grad = pr.amplitude * ip *
                      (dot(u, v) + trace_prod3(inv[l], inv[k], sp));

        ScaledAtom bq = atom_product(p.bump.atom, pr.atom);
        double iq = atom_integral(bq.atom);
        Mat sq = bq.atom.cov.dense();
        for (std::size_t i = 0; i < d; ++i) {
          dl[i] = bq.atom.mu[i] - gl.mu[i];
          dk[i] = bq.atom.mu[i] - gk.mu[i];
        }
        u = mat_vec(inv[l], dl);
        v = mat_vec(inv[k], dk);
        double bgrad = p.bump.amplitude * pr.amplitude * bq.amplitude * iq *
                       (dot(u, v) + trace_prod3(inv[l], inv[k], sq));

        double mass = p.k * p.k * pr.amplitude * ip;
        a(k, l) = grad + bgrad + mass;
      }
    }
  });
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t l = 0; l < k; ++l) a(k, l) = a(l, k);

  Vec rhs(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double s = 0.0;
    for (std::size_t j = 0; j < p.f.atoms.size(); ++j)
      s += p.f.coeffs[j] * atom_inner(p.f.atoms[j], basis.atoms[k]);
    rhs[k] = s;
  }

  Mixture u;
  u.dim = basis.dim;
  u.atoms = basis.atoms;
  u.coeffs = svd_lstsq(a, rhs);
  return u;
}

double elliptic_residual_fourier(const EllipticProblem& p, const Mixture& u,
                                 std::size_t n_s) {
  std::size_t n = u.atoms.size();
  if (n == 0) throw EmptyPointSet("elliptic_residual_fourier: empty solution");
  if (n_s < 2) throw InvalidRange("elliptic_residual_fourier: need n_s >= 2");
  std::size_t d = u.dim;

  // Per atom: the bump product and the matrices of the transformed
  // divergence term.
  std::vector<GaussianAtom> prod(n);
  Vec beta(n);
  std::vector<Mat> cmat(n);
  std::vector<Vec> wvec(n);
  for (std::size_t l = 0; l < n; ++l) {
    ScaledAtom pr = atom_product(p.bump.atom, u.atoms[l]);
    beta[l] = p.bump.amplitude * pr.amplitude;
    Mat invl = cov_inverse_dense(u.atoms[l]);
    cmat[l] = mat_mul(invl, pr.atom.cov.dense());
    Vec dmu(d);
    for (std::size_t i = 0; i < d; ++i) dmu[i] = pr.atom.mu[i] - u.atoms[l].mu[i];
    wvec[l] = mat_vec(invl, dmu);
    prod[l] = std::move(pr.atom);
  }

  // Probe frequencies along every principal axis of every solution atom.
  std::vector<Vec> probes;
  for (const auto& a : u.atoms) {
    EigenDecomposition ed = sym_eigen(a.cov.dense());
    for (std::size_t j = 0; j < d; ++j) {
      double lam = std::max(ed.values[j], 1e-300);
      double s_hi = std::sqrt(-2.0 * std::log(1e-10) / lam);
      double s_lo = 1e-5;
      if (s_hi <= s_lo) s_hi = 2.0 * s_lo;
      double ratio = std::log(s_hi / s_lo);
      for (std::size_t kk = 0; kk < n_s; ++kk) {
        double s = s_lo * std::exp(ratio * static_cast<double>(kk) /
                                   static_cast<double>(n_s - 1));
        Vec xi(d);
        for (std::size_t i = 0; i < d; ++i) xi[i] = s * ed.vectors(i, j);
        probes.push_back(std::move(xi));
      }
    }
  }

  Vec hmod(probes.size()), fmod(probes.size());
  parallel_for(probes.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      const Vec& xi = probes[t];
      double xi2 = dot(xi, xi);
      std::complex<double> h(0.0, 0.0);
      for (std::size_t l = 0; l < n; ++l) {
        std::complex<double> gl = atom_fourier(u.atoms[l], xi);
        std::complex<double> gp = atom_fourier(prod[l], xi);
        Vec cxi = mat_vec(cmat[l], xi);
        std::complex<double> div(dot(xi, cxi), dot(xi, wvec[l]));
        h += u.coeffs[l] * ((xi2 + p.k * p.k) * gl + beta[l] * div * gp);
      }
      std::complex<double> fhat(0.0, 0.0);
      for (std::size_t j = 0; j < p.f.atoms.size(); ++j)
        fhat += p.f.coeffs[j] * atom_fourier(p.f.atoms[j], xi);
      hmod[t] = std::abs(h - fhat);
      fmod[t] = std::abs(fhat);
    }
  });
  double hmax = 0.0, fmax = 0.0;
  for (std::size_t t = 0; t < probes.size(); ++t) {
    hmax = std::max(hmax, hmod[t]);
    fmax = std::max(fmax, fmod[t]);
  }
  if (!(fmax > 0.0))
    throw NumericalBreakdown("elliptic_residual_fourier: vanishing source");
  return hmax / fmax;
}

}  // namespace mixred
