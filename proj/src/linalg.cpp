#include "lcsb/linalg.hpp"

#include <cmath>

#include "lcsb/errors.hpp"

namespace lcsb {

void cholesky_factor(std::vector<double>& a, int n) {
  for (int j = 0; j < n; ++j) {
    double d = a[static_cast<std::size_t>(j) * n + j];
    for (int k = 0; k < j; ++k) {
      const double l = a[static_cast<std::size_t>(j) * n + k];
      d -= l * l;
    }
    if (d <= 0.0) throw DataError("cholesky: matrix not positive definite");
    const double diag = std::sqrt(d);
    a[static_cast<std::size_t>(j) * n + j] = diag;
    for (int i = j + 1; i < n; ++i) {
      double v = a[static_cast<std::size_t>(i) * n + j];
      for (int k = 0; k < j; ++k)
        v -= a[static_cast<std::size_t>(i) * n + k] * a[static_cast<std::size_t>(j) * n + k];
      a[static_cast<std::size_t>(i) * n + j] = v / diag;
    }
  }
}

std::vector<double> cholesky_solve(const std::vector<double>& l, int n,
                                   const std::vector<double>& b) {
  std::vector<double> x = b;
  for (int i = 0; i < n; ++i) {
    double v = x[static_cast<std::size_t>(i)];
    for (int k = 0; k < i; ++k) v -= l[static_cast<std::size_t>(i) * n + k] * x[static_cast<std::size_t>(k)];
    x[static_cast<std::size_t>(i)] = v / l[static_cast<std::size_t>(i) * n + i];
  }
  for (int i = n - 1; i >= 0; --i) {
    double v = x[static_cast<std::size_t>(i)];
    for (int k = i + 1; k < n; ++k) v -= l[static_cast<std::size_t>(k) * n + i] * x[static_cast<std::size_t>(k)];
    x[static_cast<std::size_t>(i)] = v / l[static_cast<std::size_t>(i) * n + i];
  }
  return x;
}

}  // namespace lcsb
