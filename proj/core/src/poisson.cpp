#include "mixred/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mixred/common.hpp"
#include "mixred/linalg.hpp"

namespace mixred {

Mixture kernel_convolve(const Mixture& f, const KernelExpansion& e,
                        double coeff_trunc) {
  if (f.atoms.empty()) throw EmptyPointSet("kernel_convolve: empty source");
  if (!(coeff_trunc >= 0.0) || coeff_trunc >= 1.0)
    throw ThresholdOutOfRange("kernel_convolve: coeff_trunc must lie in [0, 1)");
  std::size_t d = f.dim;

  // Each kernel term w exp(-tau r^2) is w (pi/(2 tau))^{d/4} times the unit
  // atom with covariance I/(2 tau); convolve it with every source atom.
  Mixture cand;
  cand.dim = d;
  cand.coeffs.reserve(e.weights.size() * f.atoms.size());
  cand.atoms.reserve(e.weights.size() * f.atoms.size());
  for (std::size_t l = 0; l < e.weights.size(); ++l) {
    double tau = e.exponents[l];
    double term_amp =
        e.weights[l] *
        std::exp(0.25 * static_cast<double>(d) *
                 (std::log(std::numbers::pi) - std::log(2.0 * tau)));
    GaussianAtom gterm = make_atom(Vec(d, 0.0), Covariance::iso(d, 1.0 / (2.0 * tau)));
    for (std::size_t j = 0; j < f.atoms.size(); ++j) {
      ScaledAtom conv = atom_convolve(gterm, f.atoms[j]);
      cand.coeffs.push_back(f.coeffs[j] * term_amp * conv.amplitude);
      cand.atoms.push_back(std::move(conv.atom));
    }
  }

  // Truncate on each candidate's peak value |c| exp(log_norm), not on the
  // unit-norm coefficient: wide far-field atoms carry large coefficients in
  // the L2 convention while contributing little pointwise, and the narrow
  // near-field atoms they would otherwise crowd out are what keeps the
  // Laplacian residual small.
  Vec peak(cand.coeffs.size());
  double cmax = 0.0;
  for (std::size_t i = 0; i < cand.coeffs.size(); ++i) {
    peak[i] = std::abs(cand.coeffs[i]) * std::exp(cand.atoms[i].log_norm);
    cmax = std::max(cmax, peak[i]);
  }
  Mixture dense;
  dense.dim = d;
  for (std::size_t i = 0; i < cand.coeffs.size(); ++i) {
    if (peak[i] < coeff_trunc * cmax) continue;
    dense.coeffs.push_back(cand.coeffs[i]);
    dense.atoms.push_back(std::move(cand.atoms[i]));
  }
  if (dense.atoms.empty())
    throw NumericalBreakdown("kernel_convolve: all candidates truncated");
  return dense;
}

PoissonSolution poisson_solve(const Mixture& f, const KernelExpansion& e,
                              double coeff_trunc, double red_eps) {
  PoissonSolution sol;
  sol.n_pairs = e.weights.size() * f.atoms.size();
  sol.dense = kernel_convolve(f, e, coeff_trunc);
  ReduceResult red = cholesky_reduce(sol.dense, red_eps);
  sol.reduced = select_mixture(sol.dense, red);
  return sol;
}

std::vector<Vec> principal_direction_samples(const Mixture& f, std::size_t n_s,
                                             double decay) {
  if (n_s < 2) throw InvalidRange("principal_direction_samples: need n_s >= 2");
  if (!(decay > 0.0) || decay >= 1.0)
    throw InvalidRange("principal_direction_samples: decay must lie in (0, 1)");
  std::size_t d = f.dim;
  std::vector<Vec> pts;
  pts.reserve(f.atoms.size() * d * n_s);
  for (const auto& a : f.atoms) {
    EigenDecomposition ed = sym_eigen(a.cov.dense());
    for (std::size_t j = 0; j < d; ++j) {
      double lam = std::max(ed.values[j], 0.0);
      double sj = std::sqrt(-2.0 * lam * std::log(decay));
      for (std::size_t kk = 0; kk < n_s; ++kk) {
        double s = -sj + static_cast<double>(kk) * 2.0 * sj /
                             static_cast<double>(n_s - 1);
        Vec x(d);
        for (std::size_t i = 0; i < d; ++i)
          x[i] = a.mu[i] + s * ed.vectors(i, j);
        pts.push_back(std::move(x));
      }
    }
  }
  return pts;
}

Vec residual_laplacian(const Mixture& u, const Mixture& f,
                       const std::vector<Vec>& points) {
  Vec out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    double lap = 0.0;
    for (std::size_t j = 0; j < u.atoms.size(); ++j)
      lap += u.coeffs[j] * atom_neg_laplacian(u.atoms[j], points[i]);
    out[i] = lap - mixture_eval(f, points[i]);
  }
  return out;
}

}  // namespace mixred
