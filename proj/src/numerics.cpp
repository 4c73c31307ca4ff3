#include "daa/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "daa/error.hpp"

namespace daa {

SimplexCoords simplex_vertices(std::size_t k) {
  if (k == 0) throw InvalidArgument("simplex_vertices: k must be >= 1");
  // Helmert basis vector j (1-based) of the sum-zero subspace:
  // (1, ..., 1, -j, 0, ..., 0) / sqrt(j (j + 1)) with j leading ones.
  // Vertex i is e_i expressed in that basis; edges have length sqrt(2) there.
  SimplexCoords s{k, Matrix(k, k - 1)};
  const double edge_scale = 1.0 / std::sqrt(2.0);
  for (std::size_t j = 1; j < k; ++j) {
    const double norm = std::sqrt(static_cast<double>(j * (j + 1)));
    for (std::size_t i = 0; i < k; ++i) {
      double h = 0.0;
      if (i < j) {
        h = 1.0;
      } else if (i == j) {
        h = -static_cast<double>(j);
      }
      s.coords(i, j - 1) = edge_scale * h / norm;
    }
  }
  return s;
}

std::vector<double> dirichlet_sample(std::span<const double> alpha, RandomSource& rng) {
  if (alpha.empty()) throw InvalidArgument("dirichlet_sample: empty concentration vector");
  for (double a : alpha)
    if (!(a > 0.0) || !std::isfinite(a)) throw InvalidArgument("dirichlet_sample: alpha entries must be > 0");
  std::vector<double> w(alpha.size());
  double sum = 0.0;
  for (std::size_t j = 0; j < alpha.size(); ++j) {
    w[j] = rng.gamma(alpha[j]);
    sum += w[j];
  }
  if (!(sum > 0.0)) {
    // Every Gamma draw underflowed (tiny alpha); fall back to a uniformly chosen vertex.
    std::fill(w.begin(), w.end(), 0.0);
    w[rng.below(w.size())] = 1.0;
    return w;
  }
  for (double& v : w) v /= sum;
  return w;
}

Matrix row_softmax(const Matrix& logits) {
  if (!logits.all_finite()) throw InvalidArgument("row_softmax: non-finite logits");
  Matrix out(logits.rows(), logits.cols());
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    auto in = logits.row(r);
    auto o = out.row(r);
    const double mx = *std::max_element(in.begin(), in.end());
    double sum = 0.0;
    for (std::size_t c = 0; c < in.size(); ++c) {
      o[c] = std::exp(in[c] - mx);
      sum += o[c];
    }
    for (double& v : o) v /= sum;
  }
  return out;
}

double row_stochastic_residual(const Matrix& w) {
  double worst = 0.0;
  for (std::size_t r = 0; r < w.rows(); ++r) {
    double sum = 0.0;
    for (double v : w.row(r)) {
      sum += v;
      worst = std::max(worst, -v);
    }
    worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

bool is_row_stochastic(const Matrix& w, double tol) { return row_stochastic_residual(w) <= tol; }

SymmetricEigen jacobi_eigen(const Matrix& symmetric, double tol, int max_sweeps) {
  const std::size_t n = symmetric.rows();
  if (symmetric.cols() != n) throw ShapeError("jacobi_eigen: matrix is " + symmetric.shape_string());
  Matrix a = symmetric;
  Matrix v = Matrix::identity(n);
  const double scale = std::max(std::sqrt(squared_norm(a)), 1e-300);

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  for (int sweep = 0; sweep < max_sweeps && off_norm() > tol * scale; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t r = 0; r < n; ++r) {
          const double arp = a(r, p);
          const double arq = a(r, q);
          a(r, p) = c * arp - s * arq;
          a(r, q) = s * arp + c * arq;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double apr = a(p, r);
          const double aqr = a(q, r);
          a(p, r) = c * apr - s * aqr;
          a(q, r) = s * apr + c * aqr;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double vrp = v(r, p);
          const double vrq = v(r, q);
          v(r, p) = c * vrp - s * vrq;
          v(r, q) = s * vrp + c * vrq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
  SymmetricEigen out{std::vector<double>(n), Matrix(n, n)};
  for (std::size_t c = 0; c < n; ++c) {
    out.values[c] = a(order[c], order[c]);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = v(r, order[c]);
  }
  return out;
}

PcaResult pca(const Matrix& x, std::size_t d) {
  const std::size_t n = x.rows();
  const std::size_t p = x.cols();
  if (n < 2) throw InvalidArgument("pca: need at least 2 rows");
  if (d == 0 || d > std::min(n, p)) {
    throw InvalidArgument("pca: d=" + std::to_string(d) + " outside [1, " + std::to_string(std::min(n, p)) + "]");
  }
  PcaResult res;
  res.mean.assign(p, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < p; ++c) res.mean[c] += x(i, c);
  for (double& m : res.mean) m /= static_cast<double>(n);

  Matrix cov(p, p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t a = 0; a < p; ++a) {
      const double da = x(i, a) - res.mean[a];
      for (std::size_t b = a; b < p; ++b) cov(a, b) += da * (x(i, b) - res.mean[b]);
    }
  }
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = a; b < p; ++b) {
      cov(a, b) /= static_cast<double>(n - 1);
      cov(b, a) = cov(a, b);
    }

  const SymmetricEigen eig = jacobi_eigen(cov);
  double total = 0.0;
  for (double ev : eig.values) total += std::max(ev, 0.0);

  res.components = Matrix(d, p);
  for (std::size_t c = 0; c < d; ++c) {
    // Sign convention: the largest-magnitude loading is positive.
    std::size_t arg = 0;
    for (std::size_t r = 1; r < p; ++r)
      if (std::abs(eig.vectors(r, c)) > std::abs(eig.vectors(arg, c))) arg = r;
    const double sign = eig.vectors(arg, c) < 0.0 ? -1.0 : 1.0;
    for (std::size_t r = 0; r < p; ++r) res.components(c, r) = sign * eig.vectors(r, c);
    const double ev = std::max(eig.values[c], 0.0);
    res.explained_variance.push_back(ev);
    res.explained_ratio.push_back(total > 0.0 ? ev / total : 0.0);
  }
  res.projected = pca_project(res, x);
  return res;
}

Matrix pca_project(const PcaResult& basis, const Matrix& x) {
  const std::size_t p = basis.components.cols();
  if (x.cols() != p) throw ShapeError("pca_project: data is " + x.shape_string() + ", basis has " + std::to_string(p) + " columns");
  const std::size_t d = basis.components.rows();
  Matrix out(x.rows(), d);
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t c = 0; c < d; ++c) {
      double s = 0.0;
      for (std::size_t r = 0; r < p; ++r) s += (x(i, r) - basis.mean[r]) * basis.components(c, r);
      out(i, c) = s;
    }
  return out;
}

}  // namespace daa
