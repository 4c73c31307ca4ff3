#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "daa/kernels.hpp"
#include "daa/matrix.hpp"
#include "daa/random.hpp"

namespace daa {

enum class LinearInit {
  // Greedy farthest-point selection: start from the point farthest from the
  // data mean, then repeatedly add the point with the largest minimum distance
  // to the points already chosen. Independent of row order.
  FurthestSum,
  // k distinct rows drawn uniformly with the fit's RandomSource.
  RandomRows,
};

std::string to_string(LinearInit init);
LinearInit linear_init_from_string(const std::string& s);

struct LinearFitOptions {
  std::size_t max_outer_iters = 200;
  std::size_t fw_inner_iters = 50;
  /// Stop when an outer iteration improves RSS by less than rel_tol * RSS.
  double rel_tol = 1e-6;
  LinearInit init = LinearInit::FurthestSum;
  std::uint64_t seed = 0;

  /// Throws InvalidArgument on zero counts or non-positive tolerance.
  void validate() const;
};

/// Fitted linear archetype model X ~ A B X = A Z.
struct LinearAAModel {
  Matrix a;  // n x k, row-stochastic mixture weights
  Matrix b;  // k x n, row-stochastic construction weights
  Matrix z;  // k x p archetypes, z = b x
  std::vector<double> rss_history;  // one entry per outer iteration
  bool converged = false;

  std::size_t k() const noexcept { return z.rows(); }
};

/// Residual sum of squares ||X - A B X||_F^2.
double rss(const Matrix& x, const Matrix& a, const Matrix& b);

/// Alternating Frank-Wolfe fit of k archetypes (A-step over each row of A on
/// the k-simplex, then B-step over each row of B on the n-simplex).
LinearAAModel fit_linear_aa(const Matrix& x, std::size_t k, const LinearFitOptions& opts, RandomSource& rng);
/// Same, with a RandomSource seeded from opts.seed.
LinearAAModel fit_linear_aa(const Matrix& x, std::size_t k, const LinearFitOptions& opts);

/// Row-stochastic weights w minimizing ||x_i - w_i vertices||^2 per row, i.e.
/// the Euclidean projection of each point onto the polytope spanned by the
/// rows of `vertices`.
Matrix simplex_weights(const Matrix& vertices, const Matrix& x, std::size_t max_iters = 2000);

/// Mixture weights of new points with respect to the fitted archetypes.
Matrix transform(const LinearAAModel& model, const Matrix& x_new, std::size_t max_iters = 2000);

/// A Z for the data the model was fitted on (x is used to check shapes only).
Matrix reconstruct(const LinearAAModel& model, const Matrix& x);

}  // namespace daa
