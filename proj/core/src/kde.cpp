#include "mixred/kde.hpp"

#include <cmath>
#include <memory>
#include <numbers>

#include "mixred/common.hpp"
#include "mixred/linalg.hpp"

namespace mixred {

double silverman_bandwidth(std::size_t d, std::size_t n) {
  if (n == 0) throw EmptyPointSet("silverman_bandwidth: no samples");
  if (d == 0) throw InvalidRange("silverman_bandwidth: zero dimension");
  double dd = static_cast<double>(d);
  return std::pow(4.0 / ((2.0 * dd + 1.0) * static_cast<double>(n)),
                  1.0 / (dd + 4.0));
}

Mixture kde_build(const std::vector<Vec>& points, double h) {
  if (points.empty()) throw EmptyPointSet("kde_build: no samples");
  if (!(h > 0.0)) throw InvalidRange("kde_build: bandwidth must be positive");
  std::size_t d = points[0].size();
  std::size_t n = points.size();
  double dd = static_cast<double>(d);
  double coeff = std::exp(0.25 * dd * std::log(std::numbers::pi) -
                          0.5 * dd * std::log(2.0 * std::numbers::pi) -
                          0.5 * dd * std::log(h)) /
                 static_cast<double>(n);
  Mixture m;
  m.dim = d;
  m.coeffs.assign(n, coeff);
  m.atoms.reserve(n);
  Covariance cov = Covariance::iso(d, h * h);
  for (const auto& x : points) {
    if (x.size() != d) throw DimMismatch("kde_build: ragged sample");
    m.atoms.push_back(make_atom(x, cov));
  }
  return m;
}

ReduceResult kde_reduce(const Mixture& m, double eps) {
  if (m.atoms.empty()) throw EmptyPointSet("kde_reduce: empty mixture");
  std::size_t d = m.dim;
  double h2 = m.atoms[0].cov.at(0, 0);
  for (const auto& a : m.atoms)
    if (a.cov.kind != CovKind::Iso || a.cov.at(0, 0) != h2)
      throw DimMismatch("kde_reduce: atoms must share an isotropic covariance");

  // Flat copy of the centers for cache-friendly distance evaluation.
  auto mus = std::make_shared<Vec>(m.atoms.size() * d);
  for (std::size_t i = 0; i < m.atoms.size(); ++i)
    for (std::size_t j = 0; j < d; ++j) (*mus)[i * d + j] = m.atoms[i].mu[j];
  double inv4h2 = 1.0 / (4.0 * h2);
  GramFn gram = [mus, d, inv4h2](std::size_t i, std::size_t j) {
    const double* a = mus->data() + i * d;
    const double* b = mus->data() + j * d;
    double q = 0.0;
    for (std::size_t kk = 0; kk < d; ++kk) {
      double t = a[kk] - b[kk];
      q += t * t;
    }
    return std::exp(-q * inv4h2);
  };
  ReduceOptions opt;
  opt.eps = eps;
  return pivoted_gram_reduce(m.atoms.size(), gram, m.coeffs, opt);
}

std::vector<Vec> rotated_plane_dataset(std::size_t d, std::size_t n, Rng& rng,
                                       Mat* basis) {
  if (d < 2) throw InvalidRange("rotated_plane_dataset: need d >= 2");
  if (n == 0) throw EmptyPointSet("rotated_plane_dataset: no samples");
  // The frame comes from its own stream seeded by one draw, so the plane
  // samples below are the same for every ambient dimension and the data set
  // is a pure rotation of its d = 2 counterpart.
  Rng frame_rng(rng.next_u64());
  Mat q = random_unitary(d, frame_rng);
  std::vector<Vec> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double pick = rng.uniform();
    double n1 = rng.normal();
    double n2 = rng.normal();
    double x0, x1;
    if (pick < 0.5) {
      x0 = std::sqrt(2.0) * n1;
      x1 = std::sqrt(0.5) * n2;
    } else {
      x0 = 3.0 + n1;
      x1 = 3.0 + n2;
    }
    Vec y(d);
    for (std::size_t r = 0; r < d; ++r) y[r] = q(r, 0) * x0 + q(r, 1) * x1;
    pts.push_back(std::move(y));
  }
  if (basis != nullptr) *basis = q;
  return pts;
}

}  // namespace mixred
