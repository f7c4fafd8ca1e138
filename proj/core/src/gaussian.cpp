#include "mixred/gaussian.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "mixred/common.hpp"
#include "mixred/linalg.hpp"
#include "mixred/parallel.hpp"

namespace mixred {

Covariance Covariance::iso(std::size_t d, double value) {
  if (d == 0) throw DimMismatch("covariance: zero dimension");
  if (!(value > 0.0)) throw NotSPD("covariance: nonpositive isotropic value", 0);
  Covariance c;
  c.kind = CovKind::Iso;
  c.dim = d;
  c.data = {value};
  return c;
}

Covariance Covariance::diagonal(Vec values) {
  if (values.empty()) throw DimMismatch("covariance: zero dimension");
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!(values[i] > 0.0))
      throw NotSPD("covariance: nonpositive diagonal entry", i);
  Covariance c;
  c.kind = CovKind::Diag;
  c.dim = values.size();
  c.data = std::move(values);
  return c;
}

Covariance Covariance::full(std::size_t d, Vec values) {
  if (d == 0) throw DimMismatch("covariance: zero dimension");
  if (values.size() != d * d) throw DimMismatch("covariance: bad entry count");
  Covariance c;
  c.kind = CovKind::Full;
  c.dim = d;
  c.data = std::move(values);
  return c;
}

double Covariance::at(std::size_t i, std::size_t j) const {
  switch (kind) {
    case CovKind::Iso:
      return i == j ? data[0] : 0.0;
    case CovKind::Diag:
      return i == j ? data[i] : 0.0;
    default:
      return data[i * dim + j];
  }
}

Mat Covariance::dense() const {
  Mat m(dim, dim, 0.0);
  if (kind == CovKind::Full) {
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) m(i, j) = data[i * dim + j];
  } else {
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = at(i, i);
  }
  return m;
}

Covariance cov_add(const Covariance& a, const Covariance& b) {
  if (a.dim != b.dim) throw DimMismatch("cov_add: dimension mismatch");
  Covariance c;
  c.dim = a.dim;
  if (a.kind == CovKind::Iso && b.kind == CovKind::Iso) {
    c.kind = CovKind::Iso;
    c.data = {a.data[0] + b.data[0]};
  } else if (a.kind == CovKind::Diag && b.kind == CovKind::Diag) {
    c.kind = CovKind::Diag;
    c.data.resize(a.dim);
    for (std::size_t i = 0; i < a.dim; ++i) c.data[i] = a.data[i] + b.data[i];
  } else {
    c.kind = CovKind::Full;
    c.data.resize(a.dim * a.dim);
    for (std::size_t i = 0; i < a.dim; ++i)
      for (std::size_t j = 0; j < a.dim; ++j)
        c.data[i * a.dim + j] = a.at(i, j) + b.at(i, j);
  }
  return c;
}

Covariance cov_chol(const Covariance& a) {
  Covariance f;
  f.kind = a.kind;
  f.dim = a.dim;
  switch (a.kind) {
    case CovKind::Iso:
      if (!(a.data[0] > 0.0)) throw NotSPD("cov_chol: nonpositive value", 0);
      f.data = {std::sqrt(a.data[0])};
      break;
    case CovKind::Diag:
      f.data.resize(a.dim);
      for (std::size_t i = 0; i < a.dim; ++i) {
        if (!(a.data[i] > 0.0)) throw NotSPD("cov_chol: nonpositive value", i);
        f.data[i] = std::sqrt(a.data[i]);
      }
      break;
    default: {
      Mat l = spd_cholesky(a.dense());
      f.data.assign(l.data(), l.data() + a.dim * a.dim);
      break;
    }
  }
  return f;
}

double cov_log_det_from_chol(const Covariance& chol) {
  double s = 0.0;
  switch (chol.kind) {
    case CovKind::Iso:
      s = static_cast<double>(chol.dim) * std::log(chol.data[0]);
      break;
    case CovKind::Diag:
      for (double v : chol.data) s += std::log(v);
      break;
    default:
      for (std::size_t i = 0; i < chol.dim; ++i)
        s += std::log(chol.data[i * chol.dim + i]);
      break;
  }
  return 2.0 * s;
}

Vec cov_chol_forward(const Covariance& chol, const Vec& x) {
  if (x.size() != chol.dim) throw DimMismatch("cov_chol_forward: size mismatch");
  std::size_t d = chol.dim;
  Vec y(d);
  switch (chol.kind) {
    case CovKind::Iso:
      for (std::size_t i = 0; i < d; ++i) y[i] = x[i] / chol.data[0];
      break;
    case CovKind::Diag:
      for (std::size_t i = 0; i < d; ++i) y[i] = x[i] / chol.data[i];
      break;
    default:
      for (std::size_t i = 0; i < d; ++i) {
        double s = x[i];
        const double* row = chol.data.data() + i * d;
        for (std::size_t j = 0; j < i; ++j) s -= row[j] * y[j];
        y[i] = s / row[i];
      }
      break;
  }
  return y;
}

Vec cov_chol_solve(const Covariance& chol, const Vec& x) {
  std::size_t d = chol.dim;
  Vec y = cov_chol_forward(chol, x);
  switch (chol.kind) {
    case CovKind::Iso:
      for (std::size_t i = 0; i < d; ++i) y[i] /= chol.data[0];
      break;
    case CovKind::Diag:
      for (std::size_t i = 0; i < d; ++i) y[i] /= chol.data[i];
      break;
    default:
      for (std::size_t ii = d; ii-- > 0;) {
        double s = y[ii];
        for (std::size_t j = ii + 1; j < d; ++j)
          s -= chol.data[j * d + ii] * y[j];
        y[ii] = s / chol.data[ii * d + ii];
      }
      break;
  }
  return y;
}

Vec cov_mat_vec(const Covariance& a, const Vec& x) {
  if (x.size() != a.dim) throw DimMismatch("cov_mat_vec: size mismatch");
  std::size_t d = a.dim;
  Vec y(d, 0.0);
  switch (a.kind) {
    case CovKind::Iso:
      for (std::size_t i = 0; i < d; ++i) y[i] = a.data[0] * x[i];
      break;
    case CovKind::Diag:
      for (std::size_t i = 0; i < d; ++i) y[i] = a.data[i] * x[i];
      break;
    default:
      for (std::size_t i = 0; i < d; ++i)
        y[i] = dot(a.data.data() + i * d, x.data(), d);
      break;
  }
  return y;
}

GaussianAtom make_atom(Vec mu, Covariance cov) {
  if (mu.size() != cov.dim) throw DimMismatch("make_atom: dimension mismatch");
  GaussianAtom g;
  g.chol = cov_chol(cov);
  g.log_det = cov_log_det_from_chol(g.chol);
  g.log_norm = -0.25 * static_cast<double>(cov.dim) * std::log(std::numbers::pi) -
               0.25 * g.log_det;
  g.mu = std::move(mu);
  g.cov = std::move(cov);
  return g;
}

double atom_eval(const GaussianAtom& g, const Vec& x) {
  if (x.size() != g.mu.size()) throw DimMismatch("atom_eval: size mismatch");
  std::size_t d = g.mu.size();
  Vec delta(d);
  for (std::size_t i = 0; i < d; ++i) delta[i] = x[i] - g.mu[i];
  Vec half = cov_chol_forward(g.chol, delta);
  double q = dot(half, half);
  return std::exp(g.log_norm - 0.5 * q);
}

double log_atom_inner(const GaussianAtom& a, const GaussianAtom& b) {
  if (a.mu.size() != b.mu.size()) throw DimMismatch("atom_inner: dim mismatch");
  std::size_t d = a.mu.size();
  Covariance s = cov_add(a.cov, b.cov);
  Covariance ls = cov_chol(s);
  Vec delta(d);
  for (std::size_t i = 0; i < d; ++i) delta[i] = a.mu[i] - b.mu[i];
  Vec half = cov_chol_forward(ls, delta);
  double q = dot(half, half);
  return 0.5 * static_cast<double>(d) * std::log(2.0) +
         0.25 * (a.log_det + b.log_det) - 0.5 * cov_log_det_from_chol(ls) -
         0.5 * q;
}

double atom_inner(const GaussianAtom& a, const GaussianAtom& b) {
  return std::exp(log_atom_inner(a, b));
}

ScaledAtom atom_product(const GaussianAtom& a, const GaussianAtom& b) {
  if (a.mu.size() != b.mu.size()) throw DimMismatch("atom_product: dim mismatch");
  std::size_t d = a.mu.size();
  Covariance s = cov_add(a.cov, b.cov);
  Covariance ls = cov_chol(s);

  Covariance prod_cov;
  prod_cov.dim = d;
  Vec mu(d);
  if (s.kind != CovKind::Full) {
    // Per-axis formulas; Iso broadcasts a single value.
    auto va = [&](std::size_t i) { return a.cov.kind == CovKind::Iso ? a.cov.data[0] : a.cov.data[i]; };
    auto vb = [&](std::size_t i) { return b.cov.kind == CovKind::Iso ? b.cov.data[0] : b.cov.data[i]; };
    prod_cov.kind = s.kind;
    prod_cov.data.resize(s.kind == CovKind::Iso ? 1 : d);
    for (std::size_t i = 0; i < (s.kind == CovKind::Iso ? std::size_t{1} : d); ++i)
      prod_cov.data[i] = va(i) * vb(i) / (va(i) + vb(i));
    for (std::size_t i = 0; i < d; ++i) {
      double total = va(i) + vb(i);
      mu[i] = (vb(i) * a.mu[i] + va(i) * b.mu[i]) / total;
    }
  } else {
    // Sigma_p = Sigma_a S^{-1} Sigma_b, assembled column by column and
    // symmetrized to control roundoff.
    Mat sp(d, d, 0.0);
    Vec col(d), tmp(d);
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t i = 0; i < d; ++i) col[i] = b.cov.at(i, j);
      tmp = cov_chol_solve(ls, col);
      Vec out = cov_mat_vec(a.cov, tmp);
      for (std::size_t i = 0; i < d; ++i) sp(i, j) = out[i];
    }
    prod_cov.kind = CovKind::Full;
    prod_cov.data.resize(d * d);
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        prod_cov.data[i * d + j] = 0.5 * (sp(i, j) + sp(j, i));
    Vec ya = cov_chol_solve(ls, a.mu);
    Vec yb = cov_chol_solve(ls, b.mu);
    Vec t1 = cov_mat_vec(b.cov, ya);
    Vec t2 = cov_mat_vec(a.cov, yb);
    for (std::size_t i = 0; i < d; ++i) mu[i] = t1[i] + t2[i];
  }

  Vec delta(d);
  for (std::size_t i = 0; i < d; ++i) delta[i] = a.mu[i] - b.mu[i];
  Vec half = cov_chol_forward(ls, delta);
  double k = dot(half, half);

  ScaledAtom out;
  out.atom = make_atom(std::move(mu), std::move(prod_cov));
  out.amplitude = std::exp(a.log_norm + b.log_norm - out.atom.log_norm - 0.5 * k);
  return out;
}

ScaledAtom atom_convolve(const GaussianAtom& a, const GaussianAtom& b) {
  if (a.mu.size() != b.mu.size()) throw DimMismatch("atom_convolve: dim mismatch");
  std::size_t d = a.mu.size();
  Vec mu(d);
  for (std::size_t i = 0; i < d; ++i) mu[i] = a.mu[i] + b.mu[i];
  ScaledAtom out;
  out.atom = make_atom(std::move(mu), cov_add(a.cov, b.cov));
  // amplitude = I_a I_b / I_c where I is the atom integral; this is the
  // convolution identity for L1-normalized Gaussians rescaled to unit L2.
  out.amplitude = std::exp(atom_log_integral(a) + atom_log_integral(b) -
                           atom_log_integral(out.atom));
  return out;
}

std::complex<double> atom_fourier(const GaussianAtom& g, const Vec& xi) {
  if (xi.size() != g.mu.size()) throw DimMismatch("atom_fourier: size mismatch");
  Vec sx = cov_mat_vec(g.cov, xi);
  double quad = dot(sx.data(), xi.data(), xi.size());
  double mag = std::exp(g.log_norm + 0.5 * g.log_det - 0.5 * quad);
  double phase = -dot(g.mu.data(), xi.data(), xi.size());
  return {mag * std::cos(phase), mag * std::sin(phase)};
}

double atom_log_integral(const GaussianAtom& g) {
  return g.log_norm +
         0.5 * static_cast<double>(g.mu.size()) * std::log(2.0 * std::numbers::pi) +
         0.5 * g.log_det;
}

double atom_integral(const GaussianAtom& g) { return std::exp(atom_log_integral(g)); }

double atom_neg_laplacian(const GaussianAtom& g, const Vec& x) {
  std::size_t d = g.mu.size();
  if (x.size() != d) throw DimMismatch("atom_neg_laplacian: size mismatch");
  Vec delta(d);
  for (std::size_t i = 0; i < d; ++i) delta[i] = x[i] - g.mu[i];
  Vec grad = cov_chol_solve(g.chol, delta);  // Sigma^{-1} (x - mu)
  double trace_inv = 0.0;
  switch (g.chol.kind) {
    case CovKind::Iso:
      trace_inv = static_cast<double>(d) / (g.chol.data[0] * g.chol.data[0]);
      break;
    case CovKind::Diag:
      for (double v : g.chol.data) trace_inv += 1.0 / (v * v);
      break;
    default: {
      // tr Sigma^{-1} = |L^{-1}|_F^2, accumulated by forward solves.
      Vec e(d, 0.0);
      for (std::size_t j = 0; j < d; ++j) {
        e.assign(d, 0.0);
        e[j] = 1.0;
        Vec col = cov_chol_forward(g.chol, e);
        trace_inv += dot(col, col);
      }
      break;
    }
  }
  return atom_eval(g, x) * (trace_inv - dot(grad, grad));
}

double mixture_eval(const Mixture& m, const Vec& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.atoms.size(); ++i)
    s += m.coeffs[i] * atom_eval(m.atoms[i], x);
  return s;
}

Vec mixture_eval(const Mixture& m, const std::vector<Vec>& points) {
  Vec out(points.size(), 0.0);
  parallel_for(points.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) out[p] = mixture_eval(m, points[p]);
  });
  return out;
}

}  // namespace mixred
