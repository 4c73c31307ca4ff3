#include "daa/synthdata.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "daa/error.hpp"
#include "daa/numerics.hpp"

namespace daa {

namespace {

constexpr double kMinSeparationFraction = 0.5;
constexpr int kMaxPlacementAttempts = 100000;

Matrix place_latent_archetypes(std::size_t k, double spread, RandomSource& rng) {
  const std::size_t d = k - 1;
  Matrix pts(k, d);
  for (int attempt = 0; attempt < kMaxPlacementAttempts; ++attempt) {
    for (double& v : pts.values()) v = spread * rng.uniform();
    bool ok = true;
    for (std::size_t a = 0; a < k && ok; ++a)
      for (std::size_t b = a + 1; b < k && ok; ++b) {
        double s = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
          const double diff = pts(a, c) - pts(b, c);
          s += diff * diff;
        }
        ok = std::sqrt(s) >= kMinSeparationFraction * spread;
      }
    if (ok) return pts;
  }
  throw InvalidArgument("generate_archetype_data: could not place " + std::to_string(k) +
                        " separated archetypes in the latent cube");
}

}  // namespace

Matrix random_orthonormal_rows(std::size_t rows, std::size_t cols, RandomSource& rng) {
  if (rows > cols) throw InvalidArgument("random_orthonormal_rows: rows exceed cols");
  Matrix q(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (;;) {
      auto v = q.row(r);
      for (double& e : v) e = rng.normal();
      // Modified Gram-Schmidt, applied twice for stability.
      for (int pass = 0; pass < 2; ++pass)
        for (std::size_t prev = 0; prev < r; ++prev) {
          const double proj = dot(v, q.row(prev));
          for (std::size_t c = 0; c < cols; ++c) v[c] -= proj * q(prev, c);
        }
      const double norm = std::sqrt(dot(v, v));
      if (norm > 1e-8) {
        for (double& e : v) e /= norm;
        break;
      }
    }
  }
  return q;
}

GeneratedData generate_archetype_data(std::size_t n, std::size_t k, std::size_t p, double sigma2, double alpha,
                                      RandomSource& rng, double spread) {
  if (k == 0) throw InvalidArgument("generate_archetype_data: k must be >= 1");
  if (n < k) throw InvalidArgument("generate_archetype_data: n must be >= k");
  if (p + 1 < k) throw InvalidArgument("generate_archetype_data: p must be >= k-1");
  if (!(sigma2 >= 0.0) || !std::isfinite(sigma2)) throw InvalidArgument("generate_archetype_data: sigma2 must be >= 0");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidArgument("generate_archetype_data: alpha must be > 0");

  if (!(spread > 0.0) || !std::isfinite(spread)) throw InvalidArgument("generate_archetype_data: spread must be > 0");

  GeneratedData out;
  SyntheticTruth& t = out.truth;
  t.sigma2 = sigma2;
  const Matrix latent = place_latent_archetypes(k, spread, rng);
  t.embedding = random_orthonormal_rows(k - 1, p, rng);
  t.z_true = matmul(latent, t.embedding);

  const std::vector<double> conc(k, alpha);
  const double sd = std::sqrt(sigma2);
  t.a_true = Matrix(n, k);
  out.x = Matrix(n, p);
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<double> a = dirichlet_sample(conc, rng);
    std::copy(a.begin(), a.end(), t.a_true.row(i).begin());
    for (std::size_t c = 0; c < p; ++c) {
      double mean = 0.0;
      for (std::size_t j = 0; j < k; ++j) mean += a[j] * t.z_true(j, c);
      out.x(i, c) = mean + sd * rng.normal();
    }
  }

  // Plant the exact archetypes at k distinct random rows.
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t j = 0; j < k; ++j) {
    const auto r = j + static_cast<std::size_t>(rng.below(n - j));
    std::swap(idx[j], idx[r]);
  }
  t.archetype_rows.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k));
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t row = t.archetype_rows[j];
    std::copy(t.z_true.row(j).begin(), t.z_true.row(j).end(), out.x.row(row).begin());
    for (std::size_t l = 0; l < k; ++l) t.a_true(row, l) = (l == j) ? 1.0 : 0.0;
  }
  return out;
}

Matrix apply_curvature(const Matrix& x, std::size_t dim) {
  if (dim >= x.cols()) {
    throw InvalidArgument("apply_curvature: column " + std::to_string(dim) + " out of range for " + x.shape_string());
  }
  Matrix out = x;
  for (std::size_t i = 0; i < x.rows(); ++i) out(i, dim) = std::exp(x(i, dim));
  return out;
}

std::size_t most_curved_dim(const Matrix& z_true) {
  if (z_true.rows() == 0 || z_true.cols() == 0) throw InvalidArgument("most_curved_dim: empty archetype matrix");
  std::size_t best = 0;
  double best_range = -1.0;
  for (std::size_t c = 0; c < z_true.cols(); ++c) {
    double lo = z_true(0, c), hi = z_true(0, c);
    for (std::size_t j = 1; j < z_true.rows(); ++j) {
      lo = std::min(lo, z_true(j, c));
      hi = std::max(hi, z_true(j, c));
    }
    const double range = std::exp(hi) - std::exp(lo);
    if (range > best_range) {
      best_range = range;
      best = c;
    }
  }
  return best;
}

Matrix observed_archetypes(const SyntheticTruth& truth) {
  return truth.curved_dim ? apply_curvature(truth.z_true, *truth.curved_dim) : truth.z_true;
}

Matrix synth_side_information(const Matrix& a_true, std::span<const double> w, double noise_sd, RandomSource& rng) {
  if (w.size() != a_true.cols()) {
    throw ShapeError("synth_side_information: weight length " + std::to_string(w.size()) + " vs k=" +
                     std::to_string(a_true.cols()));
  }
  if (!(noise_sd >= 0.0) || !std::isfinite(noise_sd)) throw InvalidArgument("synth_side_information: noise_sd must be >= 0");
  Matrix y(a_true.rows(), 1);
  for (std::size_t i = 0; i < a_true.rows(); ++i) {
    y(i, 0) = dot(a_true.row(i), w);
    if (noise_sd > 0.0) y(i, 0) += noise_sd * rng.normal();
  }
  return y;
}

}  // namespace daa
