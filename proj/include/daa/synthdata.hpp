#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "daa/matrix.hpp"
#include "daa/random.hpp"

namespace daa {

/// Ground truth behind a generated data set.
struct SyntheticTruth {
  Matrix z_true;     // k x p archetypes (before any curvature)
  Matrix a_true;     // n x k mixture weights
  double sigma2 = 0.0;
  Matrix embedding;  // (k-1) x p, orthonormal rows
  std::optional<std::size_t> curved_dim;
  std::vector<std::size_t> archetype_rows;  // rows of X that hold the exact archetypes
};

struct GeneratedData {
  Matrix x;
  SyntheticTruth truth;
};

/// Side length of the latent cube the archetypes are drawn from.
inline constexpr double kDefaultArchetypeSpread = 5.0;

/// Draws data from the probabilistic archetype model: archetypes placed in
/// [0,spread]^(k-1) with pairwise distance >= spread/2 and embedded into R^p
/// through a random orthonormal map, a_i ~ Dir(alpha 1), x_i ~ N(a_i Z, sigma2 I).
/// k random rows of X hold the exact archetypes; their positions are listed
/// in truth.archetype_rows.
GeneratedData generate_archetype_data(std::size_t n, std::size_t k, std::size_t p, double sigma2, double alpha,
                                      RandomSource& rng, double spread = kDefaultArchetypeSpread);

/// Column whose exponential separates the archetypes most, i.e. the argmax
/// over columns of exp(max_j z_jc) - exp(min_j z_jc).
std::size_t most_curved_dim(const Matrix& z_true);

/// Copy of x with column `dim` replaced by its exponential.
Matrix apply_curvature(const Matrix& x, std::size_t dim);

/// Archetypes expressed in the curved space (truth.z_true with the curvature
/// applied when truth.curved_dim is set).
Matrix observed_archetypes(const SyntheticTruth& truth);

/// y_i = a_i . w + N(0, noise_sd^2), as an n x 1 matrix.
Matrix synth_side_information(const Matrix& a_true, std::span<const double> w, double noise_sd, RandomSource& rng);

/// Random (rows x cols) matrix with orthonormal rows (Gram-Schmidt on
/// Gaussian rows). Requires rows <= cols.
Matrix random_orthonormal_rows(std::size_t rows, std::size_t cols, RandomSource& rng);

}  // namespace daa
