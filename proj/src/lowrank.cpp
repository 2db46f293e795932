#include "lcsb/lowrank.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lcsb/errors.hpp"

namespace lcsb {

namespace detail {

void symmetric_eigen(std::vector<double>& a, int n, std::vector<double>& eigenvalues,
                     std::vector<double>& eigenvectors) {
  auto A = [&](int i, int j) -> double& { return a[static_cast<std::size_t>(i) * n + j]; };
  eigenvectors.assign(static_cast<std::size_t>(n) * n, 0.0);
  auto V = [&](int i, int j) -> double& {
    return eigenvectors[static_cast<std::size_t>(i) * n + j];
  };
  for (int i = 0; i < n; ++i) V(i, i) = 1.0;

  double frob = 0.0;
  for (double v : a) frob += v * v;
  const double tol = 1e-28 * std::max(frob, 1e-300);

  const int max_sweeps = 64;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q) off += A(p, q) * A(p, q);
    if (off <= tol) break;

    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = A(p, q);
        if (apq == 0.0) continue;
        const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (int i = 0; i < n; ++i) {
          const double aip = A(i, p), aiq = A(i, q);
          A(i, p) = c * aip - s * aiq;
          A(i, q) = s * aip + c * aiq;
        }
        for (int i = 0; i < n; ++i) {
          const double api = A(p, i), aqi = A(q, i);
          A(p, i) = c * api - s * aqi;
          A(q, i) = s * api + c * aqi;
        }
        for (int i = 0; i < n; ++i) {
          const double vip = V(i, p), viq = V(i, q);
          V(i, p) = c * vip - s * viq;
          V(i, q) = s * vip + c * viq;
        }
      }
    }
  }

  eigenvalues.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) eigenvalues[static_cast<std::size_t>(i)] = A(i, i);
}

}  // namespace detail

SvdBasis truncated_svd(const std::vector<LearningCurve>& curves, int k) {
  if (curves.empty()) throw ConfigError("truncated_svd needs a nonempty matrix");
  const int n_rows = static_cast<int>(curves.size());
  const int e_max = static_cast<int>(curves.front().size());
  if (k < 1 || k > std::min(n_rows, e_max))
    throw ConfigError("rank k must be in [1, min(rows, e_max)]");
  for (const auto& c : curves) {
    if (static_cast<int>(c.size()) != e_max)
      throw ConfigError("truncated_svd needs equal-length curves");
    for (double v : c)
      if (!std::isfinite(v)) throw ConfigError("truncated_svd input has non-finite values");
  }

  // Gram matrix S^T S (e_max x e_max)
  std::vector<double> gram(static_cast<std::size_t>(e_max) * e_max, 0.0);
  for (const auto& c : curves)
    for (int i = 0; i < e_max; ++i) {
      const double ci = c[static_cast<std::size_t>(i)];
      if (ci == 0.0) continue;
      double* row = gram.data() + static_cast<std::size_t>(i) * e_max;
      for (int j = 0; j < e_max; ++j) row[j] += ci * c[static_cast<std::size_t>(j)];
    }

  std::vector<double> eigenvalues, eigenvectors;
  detail::symmetric_eigen(gram, e_max, eigenvalues, eigenvectors);

  // order eigenpairs by descending eigenvalue, stable in the original index
  std::vector<int> order(static_cast<std::size_t>(e_max));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return eigenvalues[static_cast<std::size_t>(a)] > eigenvalues[static_cast<std::size_t>(b)];
  });

  SvdBasis basis;
  basis.k = k;
  basis.e_max = e_max;
  basis.singular_values.resize(static_cast<std::size_t>(k));
  basis.components.resize(static_cast<std::size_t>(k) * e_max);
  for (int i = 0; i < k; ++i) {
    const int col = order[static_cast<std::size_t>(i)];
    basis.singular_values[static_cast<std::size_t>(i)] =
        std::sqrt(std::max(0.0, eigenvalues[static_cast<std::size_t>(col)]));
    double* row = basis.components.data() + static_cast<std::size_t>(i) * e_max;
    for (int j = 0; j < e_max; ++j)
      row[j] = eigenvectors[static_cast<std::size_t>(j) * e_max + col];

    // sign convention: largest-magnitude entry (first on ties) positive
    int arg = 0;
    double best = std::abs(row[0]);
    for (int j = 1; j < e_max; ++j)
      if (std::abs(row[j]) > best) {
        best = std::abs(row[j]);
        arg = j;
      }
    if (row[arg] < 0.0)
      for (int j = 0; j < e_max; ++j) row[j] = -row[j];
  }
  return basis;
}

std::vector<double> compress(const LearningCurve& curve, const SvdBasis& basis) {
  if (static_cast<int>(curve.size()) != basis.e_max)
    throw ConfigError("compress: curve length does not match basis");
  std::vector<double> coeffs(static_cast<std::size_t>(basis.k), 0.0);
  for (int i = 0; i < basis.k; ++i) {
    const double* row = basis.row(i);
    double dot = 0.0;
    for (int j = 0; j < basis.e_max; ++j) dot += row[j] * curve[static_cast<std::size_t>(j)];
    coeffs[static_cast<std::size_t>(i)] = dot;
  }
  return coeffs;
}

LearningCurve decompress_with_rank(const std::vector<double>& coeffs, const SvdBasis& basis,
                                   int rank) {
  if (rank < 0 || rank > basis.k || rank > static_cast<int>(coeffs.size()))
    throw ConfigError("decompress: rank out of range");
  LearningCurve out(static_cast<std::size_t>(basis.e_max), 0.0);
  for (int i = 0; i < rank; ++i) {
    const double ci = coeffs[static_cast<std::size_t>(i)];
    const double* row = basis.row(i);
    for (int j = 0; j < basis.e_max; ++j) out[static_cast<std::size_t>(j)] += ci * row[j];
  }
  for (double& v : out) v = std::min(1.0, std::max(0.0, v));
  return out;
}

LearningCurve decompress(const std::vector<double>& coeffs, const SvdBasis& basis) {
  if (static_cast<int>(coeffs.size()) != basis.k)
    throw ConfigError("decompress: coefficient count does not match basis rank");
  return decompress_with_rank(coeffs, basis, basis.k);
}

int select_rank(const std::vector<LearningCurve>& train_curves,
                const std::vector<std::vector<LearningCurve>>& val_groups, int k_max) {
  if (val_groups.empty()) throw ConfigError("select_rank needs validation groups");
  for (const auto& g : val_groups)
    if (g.size() < 2)
      throw ConfigError("select_rank needs >= 2 seeds per validation architecture");

  const int e_max = static_cast<int>(train_curves.at(0).size());
  const int k_cap = std::min<int>(k_max, std::min<int>(static_cast<int>(train_curves.size()), e_max));
  const SvdBasis basis = truncated_svd(train_curves, k_cap);

  std::vector<double> mse(static_cast<std::size_t>(k_cap) + 1, 0.0);
  std::size_t n_curves = 0;
  for (const auto& group : val_groups) {
    const LearningCurve target = mean_curve(group);
    for (const auto& y : group) {
      ++n_curves;
      const std::vector<double> coeffs = compress(y, basis);
      LearningCurve partial(static_cast<std::size_t>(e_max), 0.0);
      for (int k = 1; k <= k_cap; ++k) {
        const double ck = coeffs[static_cast<std::size_t>(k - 1)];
        const double* row = basis.row(k - 1);
        double err = 0.0;
        for (int j = 0; j < e_max; ++j) {
          partial[static_cast<std::size_t>(j)] += ck * row[j];
          const double clipped =
              std::min(1.0, std::max(0.0, partial[static_cast<std::size_t>(j)]));
          const double d = clipped - target[static_cast<std::size_t>(j)];
          err += d * d;
        }
        mse[static_cast<std::size_t>(k)] += err;
      }
    }
  }

  int best_k = 1;
  for (int k = 2; k <= k_cap; ++k)
    if (mse[static_cast<std::size_t>(k)] < mse[static_cast<std::size_t>(best_k)]) best_k = k;
  (void)n_curves;
  return best_k;
}

}  // namespace lcsb
