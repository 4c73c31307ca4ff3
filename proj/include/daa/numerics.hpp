#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "daa/matrix.hpp"
#include "daa/random.hpp"

namespace daa {

/// Vertices of a regular (k-1)-simplex: k rows in R^(k-1), unit edge length,
/// centroid at the origin.
struct SimplexCoords {
  std::size_t k = 0;
  Matrix coords;  // k x (k-1)
};

/// Deterministic regular simplex built from the Helmert basis of the
/// sum-zero subspace of R^k, scaled to unit edge length. Throws
/// InvalidArgument for k == 0.
SimplexCoords simplex_vertices(std::size_t k);

/// One Dirichlet(alpha) draw: independent Gamma(alpha_j) variates normalized
/// by their sum.
std::vector<double> dirichlet_sample(std::span<const double> alpha, RandomSource& rng);

/// Softmax of every row, stabilized by subtracting the row maximum.
Matrix row_softmax(const Matrix& logits);

/// True when every row is non-negative (>= -tol) and sums to 1 within tol.
bool is_row_stochastic(const Matrix& w, double tol);
/// Largest violation of the row-stochastic constraints (negativity or |sum - 1|).
double row_stochastic_residual(const Matrix& w);

struct PcaResult {
  Matrix components;                     // d x p, orthonormal rows
  Matrix projected;                      // n x d
  std::vector<double> explained_variance;  // d eigenvalues, non-increasing
  std::vector<double> explained_ratio;     // explained_variance / total variance
  std::vector<double> mean;              // column means of the input
};

/// Centered PCA through a cyclic-Jacobi eigendecomposition of the sample
/// covariance (divisor n - 1). Requires n >= 2 and 1 <= d <= min(n, p).
PcaResult pca(const Matrix& x, std::size_t d);

/// Projects rows onto an existing PCA basis.
Matrix pca_project(const PcaResult& basis, const Matrix& x);

struct SymmetricEigen {
  std::vector<double> values;  // descending
  Matrix vectors;              // columns are eigenvectors
};

/// Cyclic Jacobi rotations; stops when the off-diagonal Frobenius norm drops
/// below tol or after max_sweeps.
SymmetricEigen jacobi_eigen(const Matrix& symmetric, double tol = 1e-12, int max_sweeps = 100);

}  // namespace daa
