#include "daa/linear_aa.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "daa/error.hpp"
#include "daa/numerics.hpp"

namespace daa {

std::string to_string(LinearInit init) {
  return init == LinearInit::FurthestSum ? "furthest-sum" : "random-rows";
}

LinearInit linear_init_from_string(const std::string& s) {
  if (s == "furthest-sum") return LinearInit::FurthestSum;
  if (s == "random-rows") return LinearInit::RandomRows;
  throw InvalidArgument("unknown linear init '" + s + "' (expected furthest-sum or random-rows)");
}

void LinearFitOptions::validate() const {
  if (max_outer_iters == 0) throw InvalidArgument("max_outer_iters must be >= 1");
  if (fw_inner_iters == 0) throw InvalidArgument("fw_inner_iters must be >= 1");
  if (!(rel_tol > 0.0)) throw InvalidArgument("rel_tol must be > 0");
}

double rss(const Matrix& x, const Matrix& a, const Matrix& b) {
  if (a.rows() != x.rows() || b.cols() != x.rows() || a.cols() != b.rows()) {
    throw ShapeError("rss: X " + x.shape_string() + ", A " + a.shape_string() + ", B " + b.shape_string() +
                     " do not conform");
  }
  const Matrix z = matmul(b, x);
  std::vector<double> per_row(x.rows());
  kernels::row_residuals_omp(x, a, z, per_row);
  return std::accumulate(per_row.begin(), per_row.end(), 0.0);
}

namespace {

double sq_dist(std::span<const double> u, std::span<const double> v) {
  double s = 0.0;
  for (std::size_t c = 0; c < u.size(); ++c) {
    const double d = u[c] - v[c];
    s += d * d;
  }
  return s;
}

std::vector<std::size_t> furthest_points(const Matrix& x, std::size_t k) {
  const std::size_t n = x.rows();
  std::vector<double> mean(x.cols(), 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < x.cols(); ++c) mean[c] += x(i, c);
  for (double& m : mean) m /= static_cast<double>(n);

  std::vector<double> min_d(n);
  for (std::size_t i = 0; i < n; ++i) min_d[i] = sq_dist(x.row(i), mean);
  std::vector<std::size_t> chosen;
  chosen.reserve(k);
  while (chosen.size() < k) {
    const auto next = static_cast<std::size_t>(std::max_element(min_d.begin(), min_d.end()) - min_d.begin());
    chosen.push_back(next);
    for (std::size_t i = 0; i < n; ++i) {
      const double d = sq_dist(x.row(i), x.row(next));
      min_d[i] = chosen.size() == 1 ? d : std::min(min_d[i], d);
    }
    min_d[next] = -1.0;
  }
  return chosen;
}

std::vector<std::size_t> random_rows(std::size_t n, std::size_t k, RandomSource& rng) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

// Minimize ||b x - target||^2 over b on the n-simplex by away-step
// Frank-Wolfe, warm-started from b (a row of B). `z` holds b x on entry and
// on exit.
void solve_b_row(const Matrix& x, std::span<const double> target, std::span<double> b, std::span<double> z,
                 std::size_t iters) {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < n; ++i)
    if (b[i] > 0.0) active.push_back(i);

  std::vector<double> resid(p);
  std::vector<double> grad(n);
  std::vector<double> dir(p);
  for (std::size_t it = 0; it < iters; ++it) {
    for (std::size_t c = 0; c < p; ++c) resid[c] = z[c] - target[c];
    const Matrix rv(p, 1, resid);
    Matrix g(n, 1);
    kernels::matmul_omp(x, rv, g);
    std::copy(g.values().begin(), g.values().end(), grad.begin());

    const auto s = static_cast<std::size_t>(std::min_element(grad.begin(), grad.end()) - grad.begin());
    std::size_t v = active.front();
    for (std::size_t i : active)
      if (grad[i] > grad[v]) v = i;
    const double g_b = dot(z, resid);
    const double fw_gap = g_b - grad[s];
    if (!(fw_gap > 1e-15 * (1.0 + std::abs(g_b)))) break;
    const double away_gap = grad[v] - g_b;

    if (fw_gap >= away_gap || b[v] >= 1.0) {
      for (std::size_t c = 0; c < p; ++c) dir[c] = x(s, c) - z[c];
      const double curv = dot(dir, dir);
      const double gamma = curv > 0.0 ? std::clamp(fw_gap / curv, 0.0, 1.0) : 0.0;
      if (gamma == 0.0) break;
      for (std::size_t i : active) b[i] *= (1.0 - gamma);
      if (b[s] == 0.0) active.push_back(s);
      b[s] += gamma;
      for (std::size_t c = 0; c < p; ++c) z[c] += gamma * dir[c];
      if (gamma == 1.0) {
        for (std::size_t i : active)
          if (i != s) b[i] = 0.0;
        active.assign(1, s);
      }
    } else {
      for (std::size_t c = 0; c < p; ++c) dir[c] = z[c] - x(v, c);
      const double curv = dot(dir, dir);
      const double gamma_max = b[v] / (1.0 - b[v]);
      double gamma = curv > 0.0 ? away_gap / curv : gamma_max;
      const bool drop = gamma >= gamma_max;
      gamma = std::clamp(gamma, 0.0, gamma_max);
      if (gamma == 0.0) break;
      for (std::size_t i : active) b[i] *= (1.0 + gamma);
      b[v] -= gamma;
      for (std::size_t c = 0; c < p; ++c) z[c] += gamma * dir[c];
      if (drop) {
        b[v] = 0.0;
        active.erase(std::find(active.begin(), active.end(), v));
      }
    }
  }

  double sum = 0.0;
  for (std::size_t i : active) {
    if (b[i] < 0.0) b[i] = 0.0;
    sum += b[i];
  }
  std::fill(z.begin(), z.end(), 0.0);
  for (std::size_t i : active) {
    b[i] /= sum;
    for (std::size_t c = 0; c < p; ++c) z[c] += b[i] * x(i, c);
  }
}

void b_step(const Matrix& x, const Matrix& a, Matrix& b, Matrix& z, std::size_t iters) {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  const std::size_t k = a.cols();
  for (std::size_t j = 0; j < k; ++j) {
    double s_j = 0.0;
    std::vector<double> xt_a(p, 0.0);
    std::vector<double> at_a(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const double aij = a(i, j);
      if (aij == 0.0) continue;
      s_j += aij * aij;
      for (std::size_t c = 0; c < p; ++c) xt_a[c] += aij * x(i, c);
      for (std::size_t l = 0; l < k; ++l) at_a[l] += aij * a(i, l);
    }
    // An archetype no point uses has a flat objective; leave it in place.
    if (s_j <= 1e-300) continue;
    // target = (X^T a_j - Z^T A^T a_j) / s_j + z_j: the least-squares
    // position of z_j with every other archetype held fixed.
    std::vector<double> target(p);
    for (std::size_t c = 0; c < p; ++c) {
      double zt = 0.0;
      for (std::size_t l = 0; l < k; ++l) zt += z(l, c) * at_a[l];
      target[c] = (xt_a[c] - zt) / s_j + z(j, c);
    }
    solve_b_row(x, target, b.row(j), z.row(j), iters);
  }
}

}  // namespace

LinearAAModel fit_linear_aa(const Matrix& x, std::size_t k, const LinearFitOptions& opts, RandomSource& rng) {
  opts.validate();
  const std::size_t n = x.rows();
  if (n == 0) throw InvalidArgument("fit_linear_aa: empty data");
  if (k == 0) throw InvalidArgument("fit_linear_aa: k must be >= 1");
  if (k > n) throw InvalidArgument("fit_linear_aa: k=" + std::to_string(k) + " exceeds n=" + std::to_string(n));
  if (!x.all_finite()) throw DataError("fit_linear_aa: data contains non-finite values");

  const std::vector<std::size_t> seeds =
      opts.init == LinearInit::FurthestSum ? furthest_points(x, k) : random_rows(n, k, rng);

  LinearAAModel m;
  m.b = Matrix(k, n);
  for (std::size_t j = 0; j < k; ++j) m.b(j, seeds[j]) = 1.0;
  m.z = x.select_rows(seeds);
  m.a = Matrix(n, k, 1.0 / static_cast<double>(k));

  const kernels::SimplexLsqOptions a_opts{opts.fw_inner_iters, 1e-15};
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < opts.max_outer_iters; ++it) {
    kernels::simplex_lsq_rows_omp(x, m.z, m.a, a_opts);
    b_step(x, m.a, m.b, m.z, opts.fw_inner_iters);
    const double cur = rss(x, m.a, m.b);
    if (!std::isfinite(cur)) throw NumericalError("fit_linear_aa: RSS became non-finite");
    m.rss_history.push_back(cur);
    if (cur <= 0.0 || (std::isfinite(prev) && prev - cur < opts.rel_tol * prev)) {
      m.converged = true;
      break;
    }
    prev = cur;
  }
  return m;
}

LinearAAModel fit_linear_aa(const Matrix& x, std::size_t k, const LinearFitOptions& opts) {
  RandomSource rng(opts.seed);
  return fit_linear_aa(x, k, opts, rng);
}

Matrix simplex_weights(const Matrix& vertices, const Matrix& x, std::size_t max_iters) {
  if (x.cols() != vertices.cols()) {
    throw ShapeError("simplex_weights: points " + x.shape_string() + " vs vertices " + vertices.shape_string());
  }
  if (vertices.rows() == 0) throw InvalidArgument("simplex_weights: no vertices");
  Matrix w(x.rows(), vertices.rows(), 1.0 / static_cast<double>(vertices.rows()));
  // Zero gap tolerance: iterate until the duality gap stops being positive in
  // floating point, so hull-membership residuals sit at rounding level.
  kernels::simplex_lsq_rows_omp(x, vertices, w, {max_iters, 0.0});
  return w;
}

Matrix transform(const LinearAAModel& model, const Matrix& x_new, std::size_t max_iters) {
  return simplex_weights(model.z, x_new, max_iters);
}

Matrix reconstruct(const LinearAAModel& model, const Matrix& x) {
  if (x.rows() != model.a.rows() || x.cols() != model.z.cols()) {
    throw ShapeError("reconstruct: data " + x.shape_string() + " does not match model (A " + model.a.shape_string() +
                     ", Z " + model.z.shape_string() + ")");
  }
  return matmul(model.a, model.z);
}

}  // namespace daa
