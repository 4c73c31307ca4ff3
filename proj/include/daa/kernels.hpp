#pragma once

// Data-parallel inner loops. Every kernel has a serial reference version kept
// for testing and benchmarking; the OpenMP versions parallelize over output
// rows only, so each output element is computed by exactly the same sequence
// of floating-point operations and results are bit-identical for any thread
// count.

#include <cstddef>
#include <span>

#include "daa/matrix.hpp"

namespace daa::kernels {

/// Name of the environment variable read by set_threads_from_env().
inline constexpr const char* kThreadsEnvVar = "DAA_NUM_THREADS";

/// Applies DAA_NUM_THREADS (default 1) to the OpenMP runtime. Returns the
/// thread count in effect.
int set_threads_from_env();
int max_threads();

// c = a * b, with c already sized a.rows x b.cols.
void matmul_serial(const Matrix& a, const Matrix& b, Matrix& c);
void matmul_omp(const Matrix& a, const Matrix& b, Matrix& c);

// out[i] = squared norm of row i of (x - a * z).
void row_residuals_serial(const Matrix& x, const Matrix& a, const Matrix& z, std::span<double> out);
void row_residuals_omp(const Matrix& x, const Matrix& a, const Matrix& z, std::span<double> out);

/// Options for the per-row simplex-constrained least-squares solver.
struct SimplexLsqOptions {
  std::size_t max_iters = 50;
  /// Stop once the Frank-Wolfe duality gap falls below this value.
  double gap_tol = 1e-14;
};

// For every row i, minimize ||x_i - w_i z||^2 over w_i on the probability
// simplex, warm-started from the current contents of w (n x k). Away-step
// Frank-Wolfe with exact line search, using the Gram matrix z z^T.
void simplex_lsq_rows_serial(const Matrix& x, const Matrix& z, Matrix& w, const SimplexLsqOptions& opts);
void simplex_lsq_rows_omp(const Matrix& x, const Matrix& z, Matrix& w, const SimplexLsqOptions& opts);

}  // namespace daa::kernels
