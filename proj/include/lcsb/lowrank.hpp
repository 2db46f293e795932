#pragma once

#include <vector>

#include "lcsb/types.hpp"

namespace lcsb {

// Top-k right singular vectors and values of a curve matrix. Rows of
// `components` are orthonormal and sorted by nonincreasing singular value;
// each row's sign is fixed by forcing its largest-magnitude entry positive,
// making the decomposition a pure function of the input.
struct SvdBasis {
  int k = 0;
  int e_max = 0;
  std::vector<double> components;       // k x e_max, row-major
  std::vector<double> singular_values;  // length k, nonincreasing

  const double* row(int i) const { return components.data() + static_cast<std::size_t>(i) * e_max; }
};

// Computed via symmetric Jacobi eigen-decomposition of the Gram matrix S^T S.
SvdBasis truncated_svd(const std::vector<LearningCurve>& curves, int k);

std::vector<double> compress(const LearningCurve& curve, const SvdBasis& basis);

// coeffs^T * components, clipped to [0,1].
LearningCurve decompress(const std::vector<double>& coeffs, const SvdBasis& basis);

// Reconstruction using only the first `rank` coefficients of a wider basis.
LearningCurve decompress_with_rank(const std::vector<double>& coeffs, const SvdBasis& basis,
                                   int rank);

// Picks the rank whose reconstructions of individual validation curves are
// closest to the per-architecture validation mean curves. Each group holds
// the curves of one architecture (>= 2 seeds). Ties go to the smaller k.
int select_rank(const std::vector<LearningCurve>& train_curves,
                const std::vector<std::vector<LearningCurve>>& val_groups, int k_max);

constexpr int kDefaultRankCap = 20;
constexpr int kFallbackRank = 6;

namespace detail {
// Eigenvalues (descending) and matching eigenvectors (columns) of a dense
// symmetric matrix, by cyclic Jacobi rotations.
void symmetric_eigen(std::vector<double>& a, int n, std::vector<double>& eigenvalues,
                     std::vector<double>& eigenvectors);
}  // namespace detail

}  // namespace lcsb
