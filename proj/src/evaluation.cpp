#include "daa/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "daa/error.hpp"
#include "daa/random.hpp"

namespace daa {

namespace {

constexpr std::uint64_t kStreamSplit = 0x5157;

double fit_and_score(const Matrix& x_train, const Matrix* y_train, const Matrix& x_test, const Matrix* y_test,
                     std::size_t k, std::uint64_t seed, const SweepOptions& opts) {
  if (opts.fitter == FitterKind::Linear) {
    LinearFitOptions lo = opts.linear;
    lo.seed = seed;
    const LinearAAModel m = fit_linear_aa(x_train, k, lo);
    return mean_absolute_error(matmul(transform(m, x_test), m.z), x_test);
  }
  DeepAAConfig cfg = opts.deep;
  cfg.k = k;
  cfg.seed = seed;
  if (opts.metric == SweepMetric::SideInfoMae) cfg.use_side_info = true;
  const TrainResult r = train(x_train, y_train, cfg);
  const Decoded d = reconstruct_deep(r.model, x_test);
  if (opts.metric == SweepMetric::SideInfoMae) return mean_absolute_error(*d.y_hat, *y_test);
  return mean_absolute_error(d.x_hat, x_test);
}

}  // namespace

RecoveryScore match_archetypes(const Matrix& learned, const Matrix& truth) {
  require_same_shape(learned, truth, "match_archetypes");
  const std::size_t k = truth.rows();
  if (k == 0) throw InvalidArgument("match_archetypes: no archetypes");
  if (k > kMaxMatchK) {
    throw InvalidArgument("match_archetypes: k=" + std::to_string(k) + " exceeds the supported maximum of " +
                          std::to_string(kMaxMatchK));
  }
  Matrix cost(k, k);
  for (std::size_t l = 0; l < k; ++l)
    for (std::size_t j = 0; j < k; ++j) {
      double s = 0.0;
      for (std::size_t c = 0; c < truth.cols(); ++c) s += (learned(l, c) - truth(j, c)) * (learned(l, c) - truth(j, c));
      cost(l, j) = s;
    }
  std::vector<std::size_t> perm(k);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<std::size_t> best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) s += cost(perm[j], j);
    if (s < best_cost) {
      best_cost = s;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  RecoveryScore r;
  r.permutation = best;
  r.rmse = std::sqrt(best_cost / static_cast<double>(truth.size()));
  for (std::size_t j = 0; j < k; ++j) r.per_archetype_distance.push_back(std::sqrt(cost(best[j], j)));
  return r;
}

std::optional<std::size_t> knee_point(const std::vector<std::size_t>& ks, const std::vector<double>& scores) {
  if (ks.size() != scores.size()) throw ShapeError("knee_point: ks and scores differ in length");
  if (ks.size() < 3) throw InvalidArgument("knee_point: needs at least 3 points");
  for (std::size_t i = 1; i < ks.size(); ++i)
    if (ks[i] <= ks[i - 1]) throw InvalidArgument("knee_point: ks must be strictly increasing");
  for (double s : scores)
    if (!std::isfinite(s)) throw InvalidArgument("knee_point: scores must be finite");

  const auto [smin, smax] = std::minmax_element(scores.begin(), scores.end());
  const double srange = *smax - *smin;
  if (!(srange > 0.0)) return std::nullopt;
  const double k0 = static_cast<double>(ks.front());
  const double krange = static_cast<double>(ks.back()) - k0;
  const std::size_t n = ks.size();
  std::vector<double> u(n), v(n);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = (static_cast<double>(ks[i]) - k0) / krange;
    v[i] = (scores[i] - *smin) / srange;
  }
  // Signed distance to the chord; the knee is the point furthest on either side.
  const double du = u[n - 1] - u[0];
  const double dv = v[n - 1] - v[0];
  const double len = std::hypot(du, dv);
  std::size_t best = 0;
  double best_dist = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double dist = std::abs(du * (v[i] - v[0]) - dv * (u[i] - u[0])) / len;
    if (dist > best_dist) {
      best_dist = dist;
      best = i;
    }
  }
  if (best_dist <= 1e-9) return std::nullopt;
  return ks[best];
}

std::optional<std::size_t> knee_point(const SelectionCurve& curve) { return knee_point(curve.ks, curve.scores); }

Split split_rows(std::size_t n, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw InvalidArgument("split_rows: test_fraction must be in (0, 1)");
  const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
  if (n_test == 0 || n_test >= n) {
    throw InvalidArgument("split_rows: " + std::to_string(n) + " rows are too few for a train/test split");
  }
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  RandomSource rng(derive_seed(seed, kStreamSplit));
  rng.shuffle(idx);
  Split s;
  s.test.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_test));
  s.train.assign(idx.begin() + static_cast<std::ptrdiff_t>(n_test), idx.end());
  std::sort(s.test.begin(), s.test.end());
  std::sort(s.train.begin(), s.train.end());
  return s;
}

SelectionCurve selection_sweep(const Matrix& x, const Matrix* y, const std::vector<std::size_t>& ks,
                               const SweepOptions& opts) {
  if (ks.empty()) throw InvalidArgument("selection_sweep: no k values");
  for (std::size_t i = 1; i < ks.size(); ++i)
    if (ks[i] <= ks[i - 1]) throw InvalidArgument("selection_sweep: ks must be strictly increasing");
  const bool side = opts.metric == SweepMetric::SideInfoMae;
  if (side && opts.fitter != FitterKind::Deep) {
    throw InvalidArgument("selection_sweep: the side-information metric needs the deep fitter");
  }
  const bool use_y = opts.fitter == FitterKind::Deep && (side || opts.deep.use_side_info);
  if (use_y && (y == nullptr || y->rows() != x.rows())) {
    throw InvalidArgument("selection_sweep: side information is required and must match the data rows");
  }

  const Split split = split_rows(x.rows(), opts.test_fraction, opts.seed);
  const Matrix x_train = x.select_rows(split.train);
  const Matrix x_test = x.select_rows(split.test);
  Matrix y_train, y_test;
  if (use_y) {
    y_train = y->select_rows(split.train);
    y_test = y->select_rows(split.test);
  }

  SelectionCurve curve;
  for (std::size_t k : ks) {
    double score = 0.0;
    try {
      score = fit_and_score(x_train, use_y ? &y_train : nullptr, x_test, use_y ? &y_test : nullptr, k,
                            derive_seed(opts.seed, k), opts);
    } catch (const InvalidArgument& e) {
      throw InvalidArgument("k=" + std::to_string(k) + ": " + e.what());
    } catch (const NumericalError& e) {
      throw NumericalError("k=" + std::to_string(k) + ": " + e.what());
    }
    curve.ks.push_back(k);
    curve.scores.push_back(score);
  }
  if (curve.ks.size() >= 3) curve.knee = knee_point(curve);
  return curve;
}

std::vector<double> dominant_weights(const DeepAAModel& model, const Matrix& x) {
  const Projection p = project(model, x);
  std::vector<double> out(p.a.rows());
  for (std::size_t i = 0; i < p.a.rows(); ++i) {
    const auto row = p.a.row(i);
    out[i] = *std::max_element(row.begin(), row.end());
  }
  return out;
}

Decoded reconstruct_deep(const DeepAAModel& model, const Matrix& x) { return decode_latent(model, project(model, x).mu); }

double mean_absolute_error(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "mean_absolute_error");
  if (a.size() == 0) throw InvalidArgument("mean_absolute_error: empty matrices");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a.values()[i] - b.values()[i]);
  return s / static_cast<double>(a.size());
}

double mean_squared_error(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "mean_squared_error");
  if (a.size() == 0) throw InvalidArgument("mean_squared_error: empty matrices");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a.values()[i] - b.values()[i]) * (a.values()[i] - b.values()[i]);
  return s / static_cast<double>(a.size());
}

}  // namespace daa
