#include <algorithm>
#include <cmath>

#include "lcsb/errors.hpp"
#include "lcsb/linalg.hpp"
#include "lcsb/regress.hpp"

namespace lcsb {

namespace {

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double v = a[i] - b[i];
    d += v * v;
  }
  return d;
}

}  // namespace

double median_pairwise_distance(const std::vector<std::vector<double>>& x) {
  const std::size_t n = x.size();
  if (n < 2) return 1.0;
  // cap the quadratic scan to a deterministic stride subsample
  std::size_t stride = 1;
  while ((n / stride) > 2048) ++stride;
  std::vector<double> dists;
  for (std::size_t i = 0; i < n; i += stride)
    for (std::size_t j = i + stride; j < n; j += stride)
      dists.push_back(std::sqrt(sq_dist(x[i], x[j])));
  if (dists.empty()) return 1.0;
  std::nth_element(dists.begin(), dists.begin() + dists.size() / 2, dists.end());
  const double med = dists[dists.size() / 2];
  return med > 0.0 ? med : 1.0;
}

KridgeModel KridgeModel::fit(const KridgeParams& params, const std::vector<std::vector<double>>& x,
                             const std::vector<std::vector<double>>& y) {
  const int n = static_cast<int>(x.size());
  if (n < 2) throw ConfigError("kridge fit needs at least two samples");

  KridgeModel m;
  m.train_x = x;
  m.ridge = params.ridge;
  m.length_scale =
      params.length_scale > 0.0 ? params.length_scale : median_pairwise_distance(x);
  m.n_outputs = static_cast<int>(y.front().size());
  m.train_y_ = y;

  std::vector<double> kmat(static_cast<std::size_t>(n) * n);
  const double inv = 1.0 / (2.0 * m.length_scale * m.length_scale);
  for (int i = 0; i < n; ++i) {
    kmat[static_cast<std::size_t>(i) * n + i] = 1.0 + m.ridge;
    for (int j = i + 1; j < n; ++j) {
      const double k = std::exp(-sq_dist(x[static_cast<std::size_t>(i)],
                                         x[static_cast<std::size_t>(j)]) *
                                inv);
      kmat[static_cast<std::size_t>(i) * n + j] = k;
      kmat[static_cast<std::size_t>(j) * n + i] = k;
    }
  }
  cholesky_factor(kmat, n);

  m.alphas.resize(static_cast<std::size_t>(m.n_outputs));
  std::vector<double> rhs(static_cast<std::size_t>(n));
  for (int o = 0; o < m.n_outputs; ++o) {
    for (int i = 0; i < n; ++i)
      rhs[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i)][static_cast<std::size_t>(o)];
    m.alphas[static_cast<std::size_t>(o)] = cholesky_solve(kmat, n, rhs);
  }
  return m;
}

std::vector<double> KridgeModel::predict(std::span<const double> x) const {
  const int n = static_cast<int>(train_x.size());
  std::vector<double> k(static_cast<std::size_t>(n));
  const double inv = 1.0 / (2.0 * length_scale * length_scale);
  for (int i = 0; i < n; ++i) {
    double d = 0.0;
    const auto& xi = train_x[static_cast<std::size_t>(i)];
    for (std::size_t j = 0; j < xi.size(); ++j) {
      const double v = xi[j] - x[j];
      d += v * v;
    }
    k[static_cast<std::size_t>(i)] = std::exp(-d * inv);
  }
  std::vector<double> out(static_cast<std::size_t>(n_outputs), 0.0);
  for (int o = 0; o < n_outputs; ++o) {
    const auto& alpha = alphas[static_cast<std::size_t>(o)];
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += alpha[static_cast<std::size_t>(i)] * k[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(o)] = acc;
  }
  return out;
}

double KridgeModel::solve_residual_norm() const {
  const int n = static_cast<int>(train_x.size());
  const double inv = 1.0 / (2.0 * length_scale * length_scale);
  double worst = 0.0;
  for (int o = 0; o < n_outputs; ++o) {
    const auto& alpha = alphas[static_cast<std::size_t>(o)];
    double norm2 = 0.0;
    for (int i = 0; i < n; ++i) {
      double acc = ridge * alpha[static_cast<std::size_t>(i)];
      for (int j = 0; j < n; ++j) {
        const double k = std::exp(-sq_dist(train_x[static_cast<std::size_t>(i)],
                                           train_x[static_cast<std::size_t>(j)]) *
                                  inv);
        acc += k * alpha[static_cast<std::size_t>(j)];
      }
      const double r = acc - train_y_[static_cast<std::size_t>(i)][static_cast<std::size_t>(o)];
      norm2 += r * r;
    }
    worst = std::max(worst, std::sqrt(norm2));
  }
  return worst;
}

}  // namespace lcsb
