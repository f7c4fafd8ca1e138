#include "mixred/reduction.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <string>

#include "mixred/common.hpp"
#include "mixred/linalg.hpp"
#include "mixred/parallel.hpp"

namespace mixred {

namespace {

// Row-major panel with a growing number of columns. Rows stay contiguous so
// the per-term dot products in the elimination loops stream through memory.
class Panel {
 public:
  Panel(std::size_t n, std::size_t cap0) : n_(n), cap_(cap0 > 0 ? cap0 : 1), data_(n * cap_, 0.0) {}

  double* row(std::size_t i) { return data_.data() + i * cap_; }
  const double* row(std::size_t i) const { return data_.data() + i * cap_; }

  void ensure(std::size_t cols) {
    if (cols <= cap_) return;
    std::size_t cap2 = cap_;
    while (cap2 < cols) cap2 *= 2;
    std::vector<double> next(n_ * cap2, 0.0);
    for (std::size_t i = 0; i < n_; ++i)
      std::copy(data_.begin() + i * cap_, data_.begin() + i * cap_ + cap_,
                next.begin() + i * cap2);
    data_.swap(next);
    cap_ = cap2;
  }

 private:
  std::size_t n_, cap_;
  std::vector<double> data_;
};

void check_options(std::size_t n, const Vec& coeffs, const ReduceOptions& opt) {
  if (n == 0) throw EmptyPointSet("reduce: empty family");
  if (coeffs.size() != n) throw DimMismatch("reduce: coefficient count");
  if (!(opt.eps >= 0.0) || opt.eps >= 1.0)
    throw ThresholdOutOfRange("reduce: eps must lie in [0, 1)");
}

}  // namespace

ReduceResult pivoted_gram_reduce(std::size_t n, const GramFn& gram,
                                 const Vec& coeffs, const ReduceOptions& opt) {
  check_options(n, coeffs, opt);

  Vec diag(n, 1.0);
  std::vector<char> selected(n, 0);
  std::vector<std::size_t> skeleton;
  std::size_t cap0 = opt.max_rank > 0 ? opt.max_rank : std::min<std::size_t>(n, 64);
  Panel panel(n, cap0);
  bool in_first_phase = opt.phase_boundary > 0;

  while (skeleton.size() < n) {
    if (opt.max_rank > 0 && skeleton.size() >= opt.max_rank) break;
    std::size_t k = skeleton.size();

    std::size_t pivot = n;
    if (opt.forced_first && k == 0) {
      pivot = 0;
    } else {
      std::size_t hi = in_first_phase ? opt.phase_boundary : n;
      double best = -1.0;
      for (std::size_t i = 0; i < hi; ++i)
        if (!selected[i] && diag[i] > best) {
          best = diag[i];
          pivot = i;
        }
      if (pivot == n || best <= 0.0 || best < opt.eps) {
        if (in_first_phase) {
          // Candidates exhausted; continue among the remaining terms.
          in_first_phase = false;
          continue;
        }
        break;
      }
    }

    double piv = diag[pivot];
    if (opt.forced_first && k == 0 && piv <= 0.0) break;
    double lkk = std::sqrt(piv);
    if (!std::isfinite(lkk) || lkk <= 0.0)
      throw NumericalBreakdown("pivoted_gram_reduce: bad pivot value");

    panel.ensure(k + 1);
    panel.row(pivot)[k] = lkk;
    selected[pivot] = 1;
    diag[pivot] = 0.0;
    const double* prow = panel.row(pivot);

    std::atomic<bool> bad{false};
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        if (selected[i]) continue;
        double* irow = panel.row(i);
        double v = gram(i, pivot) - dot(irow, prow, k);
        if (!std::isfinite(v)) {
          bad.store(true);
          return;
        }
        double lik = v / lkk;
        irow[k] = lik;
        diag[i] -= lik * lik;
        if (diag[i] < 0.0) diag[i] = 0.0;
      }
    });
    if (bad.load())
      throw NumericalBreakdown("pivoted_gram_reduce: Gram value not finite");

    skeleton.push_back(pivot);
  }

  std::size_t r = skeleton.size();
  ReduceResult out;
  out.skeleton = skeleton;
  out.rank = r;
  out.coeffs.resize(r);
  if (r == 0) return out;

  // Least-squares transfer of the removed terms' coefficients. With the
  // partial factor L, skeleton rows satisfy G[s_j][m] = sum_k L[s_j][k] L[m][k]
  // exactly, so the normal equations use only the panel.
  Vec v(r, 0.0);
  for (std::size_t m = 0; m < n; ++m) {
    if (selected[m]) continue;
    const double* mrow = panel.row(m);
    double cm = coeffs[m];
    if (cm == 0.0) continue;
    for (std::size_t kk = 0; kk < r; ++kk) v[kk] += cm * mrow[kk];
  }
  Vec b(r);
  for (std::size_t j = 0; j < r; ++j)
    b[j] = dot(panel.row(skeleton[j]), v.data(), j + 1);
  // Forward then transposed back substitution with the skeleton factor.
  Vec z(r);
  for (std::size_t j = 0; j < r; ++j) {
    double s = b[j];
    const double* jrow = panel.row(skeleton[j]);
    for (std::size_t l = 0; l < j; ++l) s -= jrow[l] * z[l];
    z[j] = s / jrow[j];
  }
  Vec w(r);
  for (std::size_t jj = r; jj-- > 0;) {
    double s = z[jj];
    for (std::size_t l = jj + 1; l < r; ++l)
      s -= panel.row(skeleton[l])[jj] * w[l];
    w[jj] = s / panel.row(skeleton[jj])[jj];
  }
  for (std::size_t j = 0; j < r; ++j) out.coeffs[j] = coeffs[skeleton[j]] + w[j];
  return out;
}

ReduceResult mgs_gram_reduce(std::size_t n, const GramFn& gram,
                             const Vec& coeffs, const ReduceOptions& opt) {
  check_options(n, coeffs, opt);
  if (opt.forced_first || opt.phase_boundary > 0)
    throw InvalidRange("mgs_gram_reduce: phased pivoting not supported");

  Vec n2(n, 1.0);
  std::vector<char> selected(n, 0);
  std::vector<std::size_t> skeleton;
  std::size_t cap0 = opt.max_rank > 0 ? opt.max_rank : std::min<std::size_t>(n, 64);
  Panel graw(n, cap0);  // raw Gram columns of the pivots
  Panel rpan(n, cap0);  // r_{ik} = <q_k, phi_i>
  std::vector<Vec> srows;  // lower-triangular map from pivots to the q basis

  while (skeleton.size() < n) {
    if (opt.max_rank > 0 && skeleton.size() >= opt.max_rank) break;
    std::size_t k = skeleton.size();

    std::size_t pivot = n;
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i)
      if (!selected[i] && n2[i] > best) {
        best = n2[i];
        pivot = i;
      }
    if (pivot == n || best <= 0.0 || best < opt.eps) break;

    double rkk = std::sqrt(n2[pivot]);
    if (!std::isfinite(rkk))
      throw NumericalBreakdown("mgs_gram_reduce: bad pivot value");
    if (rkk < 1e-150) throw NormUnderflow("mgs_gram_reduce: pivot norm underflow");

    // q_k in terms of the selected terms: s_kk = 1/r_kk and
    // s_kj = -(1/r_kk) sum_{l=j..k-1} r_{p_k,l} s_{lj}.
    Vec srow(k + 1, 0.0);
    srow[k] = 1.0 / rkk;
    const double* pr = rpan.row(pivot);
    for (std::size_t j = 0; j < k; ++j) {
      double s = 0.0;
      for (std::size_t l = j; l < k; ++l) s += pr[l] * srows[l][j];
      srow[j] = -s / rkk;
    }
    srows.push_back(std::move(srow));

    graw.ensure(k + 1);
    rpan.ensure(k + 1);
    selected[pivot] = 1;
    n2[pivot] = 0.0;
    rpan.row(pivot)[k] = rkk;
    graw.row(pivot)[k] = 1.0;

    const Vec& sk = srows.back();
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        if (selected[i]) continue;
        double* gi = graw.row(i);
        gi[k] = gram(i, pivot);
        double rik = 0.0;
        for (std::size_t l = 0; l <= k; ++l) rik += sk[l] * gi[l];
        rpan.row(i)[k] = rik;
        n2[i] -= rik * rik;
        if (n2[i] < 0.0) n2[i] = 0.0;
      }
    });

    skeleton.push_back(pivot);
  }

  std::size_t r = skeleton.size();
  ReduceResult out;
  out.skeleton = skeleton;
  out.rank = r;
  out.coeffs.resize(r);
  if (r == 0) return out;

  // c~_j = c_{p_j} + sum_{k>=j} s_{kj} t_k with t_k = sum_removed c_i r_{ik}.
  Vec t(r, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (selected[i]) continue;
    double ci = coeffs[i];
    if (ci == 0.0) continue;
    const double* ri = rpan.row(i);
    for (std::size_t kk = 0; kk < r; ++kk) t[kk] += ci * ri[kk];
  }
  for (std::size_t j = 0; j < r; ++j) {
    double s = 0.0;
    for (std::size_t kk = j; kk < r; ++kk) s += srows[kk][j] * t[kk];
    out.coeffs[j] = coeffs[skeleton[j]] + s;
  }
  return out;
}

GramFn mixture_gram(const Mixture& m) {
  if (m.dim == 1) {
    // Closed form in one variable, avoiding per-call temporaries.
    auto s2 = std::make_shared<Vec>(m.atoms.size());
    auto ls = std::make_shared<Vec>(m.atoms.size());
    auto mu = std::make_shared<Vec>(m.atoms.size());
    for (std::size_t i = 0; i < m.atoms.size(); ++i) {
      (*s2)[i] = m.atoms[i].cov.at(0, 0);
      (*ls)[i] = std::log((*s2)[i]);
      (*mu)[i] = m.atoms[i].mu[0];
    }
    return [s2, ls, mu](std::size_t i, std::size_t j) {
      double ssum = (*s2)[i] + (*s2)[j];
      double dmu = (*mu)[i] - (*mu)[j];
      return std::exp(0.5 * std::log(2.0) + 0.25 * ((*ls)[i] + (*ls)[j]) -
                      0.5 * std::log(ssum) - 0.5 * dmu * dmu / ssum);
    };
  }
  const Mixture* mp = &m;
  return [mp](std::size_t i, std::size_t j) {
    return atom_inner(mp->atoms[i], mp->atoms[j]);
  };
}

ReduceResult cholesky_reduce(const Mixture& m, double eps) {
  ReduceOptions opt;
  opt.eps = eps;
  return pivoted_gram_reduce(m.atoms.size(), mixture_gram(m), m.coeffs, opt);
}

ReduceResult mgs_reduce(const Mixture& m, double eps) {
  ReduceOptions opt;
  opt.eps = eps;
  return mgs_gram_reduce(m.atoms.size(), mixture_gram(m), m.coeffs, opt);
}

ReduceResult frequency_reduce_1d(const Mixture& m, double eps,
                                 std::size_t r_guess) {
  if (m.dim != 1) throw DimMismatch("frequency_reduce_1d: dimension must be 1");
  std::size_t n = m.atoms.size();
  if (n == 0) throw EmptyPointSet("frequency_reduce_1d: empty mixture");
  if (!(eps > 0.0) || eps >= 1.0)
    throw ThresholdOutOfRange("frequency_reduce_1d: eps must lie in (0, 1)");

  double sigma_min = std::numeric_limits<double>::infinity();
  for (const auto& a : m.atoms)
    sigma_min = std::min(sigma_min, std::sqrt(a.cov.at(0, 0)));
  // Frequency where the widest spectrum falls below 1e-16 in magnitude.
  double arg = std::sqrt(sigma_min) * 1e16 / std::pow(std::numbers::pi, 0.25);
  double xi_low = 1e-2;
  double xi_high = arg > 1.0
                       ? std::sqrt(2.0 * std::log(arg)) / sigma_min
                       : 10.0 * xi_low;
  if (xi_high <= xi_low) xi_high = 10.0 * xi_low;

  std::size_t rp = std::max<std::size_t>(2 * r_guess, 50);
  for (int attempt = 0; attempt < 2; ++attempt) {
    Mat ys(2 * rp, n, 0.0);
    double ratio = std::log(xi_high / xi_low);
    parallel_for(rp, [&](std::size_t begin, std::size_t end) {
      for (std::size_t j = begin; j < end; ++j) {
        double frac = rp > 1 ? static_cast<double>(j) / static_cast<double>(rp - 1) : 0.0;
        double xi = xi_low * std::exp(ratio * frac);
        for (std::size_t i = 0; i < n; ++i) {
          const GaussianAtom& a = m.atoms[i];
          double s2v = a.cov.at(0, 0);
          double mag = std::exp(a.log_norm + 0.5 * a.log_det - 0.5 * s2v * xi * xi);
          double phase = a.mu[0] * xi;
          ys(j, i) = mag * std::cos(phase);
          ys(rp + j, i) = -mag * std::sin(phase);
        }
      }
    });
    IdResult id = matrix_id(ys, eps);
    if (id.rank >= rp) {
      // All frequency samples were consumed; the sampling cannot justify
      // the reported rank. Densify once, then give up.
      if (attempt == 0) {
        rp *= 2;
        continue;
      }
      throw RankDeficientSampling("frequency_reduce_1d: sampling rank exhausted");
    }
    ReduceResult out;
    out.skeleton = id.skeleton;
    out.rank = id.rank;
    out.coeffs.resize(id.rank);
    for (std::size_t kk = 0; kk < id.rank; ++kk)
      out.coeffs[kk] = dot(id.coeffs.row(kk), m.coeffs.data(), n);
    return out;
  }
  throw RankDeficientSampling("frequency_reduce_1d: unreachable");
}

Mixture select_mixture(const Mixture& m, const ReduceResult& r) {
  Mixture out;
  out.dim = m.dim;
  out.coeffs = r.coeffs;
  out.atoms.reserve(r.rank);
  for (std::size_t idx : r.skeleton) out.atoms.push_back(m.atoms[idx]);
  return out;
}

double theorem_bound(const Vec& coeffs, std::size_t rank, double eps) {
  if (eps < 0.0) throw ThresholdOutOfRange("theorem_bound: negative eps");
  std::size_t n = coeffs.size();
  if (rank >= n) return 0.0;
  return norm2(coeffs) * std::sqrt(static_cast<double>(n - rank) * eps);
}

}  // namespace mixred
