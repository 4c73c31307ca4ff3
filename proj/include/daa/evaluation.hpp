#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "daa/deep_aa.hpp"
#include "daa/linear_aa.hpp"
#include "daa/matrix.hpp"

namespace daa {

struct RecoveryScore {
  std::vector<std::size_t> permutation;  // learned row permutation[j] is matched to truth row j
  double rmse = 0.0;                     // root mean per-coordinate squared error
  std::vector<double> per_archetype_distance;  // Euclidean, in truth row order
};

/// Largest k accepted by match_archetypes (the search is exhaustive).
inline constexpr std::size_t kMaxMatchK = 10;

/// Best one-to-one matching of learned archetypes to the truth.
RecoveryScore match_archetypes(const Matrix& learned, const Matrix& truth);

struct SelectionCurve {
  std::vector<std::size_t> ks;
  std::vector<double> scores;
  std::optional<std::size_t> knee;
};

/// Point of maximum perpendicular distance from the chord joining the first
/// and last min-max normalized points. None when the curve is linear within 1e-9.
std::optional<std::size_t> knee_point(const std::vector<std::size_t>& ks, const std::vector<double>& scores);
std::optional<std::size_t> knee_point(const SelectionCurve& curve);

enum class FitterKind { Linear, Deep };

enum class SweepMetric {
  FeatureMae,   // held-out reconstruction MAE of X
  SideInfoMae,  // held-out MAE of the side information (deep fitter only)
};

struct SweepOptions {
  FitterKind fitter = FitterKind::Linear;
  LinearFitOptions linear;
  DeepAAConfig deep;  // template; k and seed are set per entry
  SweepMetric metric = SweepMetric::FeatureMae;
  std::uint64_t seed = 0;
  double test_fraction = 0.1;
};

/// Seeded train/test split of row indices.
struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};
Split split_rows(std::size_t n, double test_fraction, std::uint64_t seed);

/// Fits every k on the training split and scores the held-out split.
SelectionCurve selection_sweep(const Matrix& x, const Matrix* y, const std::vector<std::size_t>& ks,
                               const SweepOptions& opts);

/// Row-wise maximum of the projected mixture weights.
std::vector<double> dominant_weights(const DeepAAModel& model, const Matrix& x);

/// Deterministic reconstruction through the latent means (no sampling).
Decoded reconstruct_deep(const DeepAAModel& model, const Matrix& x);

double mean_absolute_error(const Matrix& a, const Matrix& b);
double mean_squared_error(const Matrix& a, const Matrix& b);

}  // namespace daa
