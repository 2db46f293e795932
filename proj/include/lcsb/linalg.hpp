#pragma once

#include <vector>

namespace lcsb {

// In-place Cholesky factorization of a symmetric positive-definite matrix
// (row-major n x n); lower triangle holds L on return. Throws DataError if
// the matrix is not positive definite.
void cholesky_factor(std::vector<double>& a, int n);

// Solves L L^T x = b given the factor from cholesky_factor.
std::vector<double> cholesky_solve(const std::vector<double>& l, int n,
                                   const std::vector<double>& b);

}  // namespace lcsb
