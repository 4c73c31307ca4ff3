#include "daa/kernels.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <string>
#include <vector>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace daa::kernels {

int set_threads_from_env() {
  int threads = 1;
  if (const char* env = std::getenv(kThreadsEnvVar); env != nullptr && *env != '\0') {
    try {
      threads = std::max(1, std::stoi(env));
    } catch (const std::exception&) {
      threads = 1;
    }
  }
#if defined(_OPENMP)
  omp_set_num_threads(threads);
#endif
  return max_threads();
}

int max_threads() {
#if defined(_OPENMP)
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace {

inline void matmul_row(const Matrix& a, const Matrix& b, Matrix& c, std::size_t i) {
  const std::size_t inner = a.cols();
  const std::size_t m = b.cols();
  double* out = c.data() + i * m;
  std::fill(out, out + m, 0.0);
  const double* ai = a.data() + i * inner;
  for (std::size_t l = 0; l < inner; ++l) {
    const double s = ai[l];
    const double* bl = b.data() + l * m;
    for (std::size_t j = 0; j < m; ++j) out[j] += s * bl[j];
  }
}

inline double row_residual(const Matrix& x, const Matrix& a, const Matrix& z, std::size_t i) {
  const std::size_t p = x.cols();
  const std::size_t k = a.cols();
  double total = 0.0;
  for (std::size_t c = 0; c < p; ++c) {
    double fit = 0.0;
    for (std::size_t j = 0; j < k; ++j) fit += a(i, j) * z(j, c);
    const double r = x(i, c) - fit;
    total += r * r;
  }
  return total;
}

// Away-step Frank-Wolfe on one row. gram = z z^T (k x k), lin = z x_i^T (k).
// The objective is w gram w^T - 2 w.lin + const; `half_grad` is gram w - lin.
void solve_simplex_row(const Matrix& gram, std::span<const double> lin, std::span<double> w,
                       std::vector<double>& q, const SimplexLsqOptions& opts) {
  const std::size_t k = w.size();
  for (std::size_t j = 0; j < k; ++j) {
    double s = 0.0;
    for (std::size_t l = 0; l < k; ++l) s += gram(j, l) * w[l];
    q[j] = s;
  }
  for (std::size_t it = 0; it < opts.max_iters; ++it) {
    std::size_t s = 0;
    std::size_t v = k;
    double g_s = std::numeric_limits<double>::infinity();
    double g_v = -std::numeric_limits<double>::infinity();
    double g_w = 0.0;
    double w_q = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double g = q[j] - lin[j];
      g_w += g * w[j];
      w_q += w[j] * q[j];
      if (g < g_s) {
        g_s = g;
        s = j;
      }
      if (w[j] > 0.0 && g > g_v) {
        g_v = g;
        v = j;
      }
    }
    const double fw_gap = g_w - g_s;
    if (!(fw_gap > opts.gap_tol)) break;
    const double away_gap = (v < k) ? g_v - g_w : 0.0;

    if (fw_gap >= away_gap || v == k || w[v] >= 1.0) {
      const double curv = gram(s, s) - 2.0 * q[s] + w_q;
      double gamma = curv > 0.0 ? fw_gap / curv : 1.0;
      gamma = std::clamp(gamma, 0.0, 1.0);
      for (std::size_t j = 0; j < k; ++j) {
        w[j] *= (1.0 - gamma);
        q[j] = (1.0 - gamma) * q[j] + gamma * gram(j, s);
      }
      w[s] += gamma;
    } else {
      const double gamma_max = w[v] / (1.0 - w[v]);
      const double curv = w_q - 2.0 * q[v] + gram(v, v);
      double gamma = curv > 0.0 ? away_gap / curv : gamma_max;
      const bool drop = gamma >= gamma_max;
      gamma = std::clamp(gamma, 0.0, gamma_max);
      for (std::size_t j = 0; j < k; ++j) {
        w[j] *= (1.0 + gamma);
        q[j] = (1.0 + gamma) * q[j] - gamma * gram(j, v);
      }
      w[v] -= gamma;
      if (drop) w[v] = 0.0;
    }
  }
  double sum = 0.0;
  for (double& x : w) {
    if (x < 0.0) x = 0.0;
    sum += x;
  }
  for (double& x : w) x /= sum;
}

Matrix gram_of(const Matrix& z) {
  const std::size_t k = z.rows();
  Matrix g(k, k);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t b = a; b < k; ++b) {
      const double v = dot(z.row(a), z.row(b));
      g(a, b) = v;
      g(b, a) = v;
    }
  return g;
}

inline void simplex_row_task(const Matrix& x, const Matrix& z, const Matrix& gram, Matrix& w,
                             std::size_t i, std::vector<double>& lin, std::vector<double>& q,
                             const SimplexLsqOptions& opts) {
  for (std::size_t j = 0; j < z.rows(); ++j) lin[j] = dot(z.row(j), x.row(i));
  solve_simplex_row(gram, lin, w.row(i), q, opts);
}

}  // namespace

void matmul_serial(const Matrix& a, const Matrix& b, Matrix& c) {
  for (std::size_t i = 0; i < a.rows(); ++i) matmul_row(a, b, c, i);
}

void matmul_omp(const Matrix& a, const Matrix& b, Matrix& c) {
  const auto n = static_cast<std::ptrdiff_t>(a.rows());
#pragma omp parallel for schedule(static) if (n * static_cast<std::ptrdiff_t>(a.cols() * b.cols()) > 32768)
  for (std::ptrdiff_t i = 0; i < n; ++i) matmul_row(a, b, c, static_cast<std::size_t>(i));
}

void row_residuals_serial(const Matrix& x, const Matrix& a, const Matrix& z, std::span<double> out) {
  for (std::size_t i = 0; i < x.rows(); ++i) out[i] = row_residual(x, a, z, i);
}

void row_residuals_omp(const Matrix& x, const Matrix& a, const Matrix& z, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(x.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = row_residual(x, a, z, static_cast<std::size_t>(i));
}

void simplex_lsq_rows_serial(const Matrix& x, const Matrix& z, Matrix& w, const SimplexLsqOptions& opts) {
  const Matrix gram = gram_of(z);
  std::vector<double> lin(z.rows()), q(z.rows());
  for (std::size_t i = 0; i < x.rows(); ++i) simplex_row_task(x, z, gram, w, i, lin, q, opts);
}

void simplex_lsq_rows_omp(const Matrix& x, const Matrix& z, Matrix& w, const SimplexLsqOptions& opts) {
  const Matrix gram = gram_of(z);
  const auto n = static_cast<std::ptrdiff_t>(x.rows());
#pragma omp parallel
  {
    std::vector<double> lin(z.rows()), q(z.rows());
#pragma omp for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i)
      simplex_row_task(x, z, gram, w, static_cast<std::size_t>(i), lin, q, opts);
  }
}

}  // namespace daa::kernels
