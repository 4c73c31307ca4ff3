#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "daa/adam.hpp"
#include "daa/autodiff.hpp"
#include "daa/matrix.hpp"
#include "daa/numerics.hpp"
#include "daa/random.hpp"

namespace daa {

enum class PriorKind {
  StandardNormal,         // p(t) = N(0, I), closed-form KL
  DirichletHierarchical,  // m ~ Dir(1), t ~ N(m Z_fixed, I), Monte-Carlo KL
};

std::string to_string(PriorKind prior);
PriorKind prior_from_string(const std::string& s);

struct DeepAAConfig {
  std::size_t k = 3;  // archetypes; latent dimension is k - 1
  std::vector<std::size_t> encoder_widths{64, 64};
  std::vector<std::size_t> decoder_x_widths{64, 64};
  std::vector<std::size_t> decoder_y_widths{64, 64};
  double lambda = 1.0;     // side-information weight
  double nu = 1.0;         // reconstruction weight
  double at_weight = 10.0;
  double kl_weight = 1.0;
  PriorKind prior = PriorKind::StandardNormal;
  std::size_t mc_samples = 16;  // Dirichlet prior only
  std::size_t epochs = 20;
  std::size_t batch_size = 100;
  double learning_rate = 1e-3;
  std::uint64_t seed = 0;
  bool use_side_info = false;
  /// Learn one global log-variance per decoder branch instead of fixing it to 1.
  bool learn_decoder_variance = false;
  /// lambda is multiplied by lambda_growth every lambda_growth_every steps.
  double lambda_growth = 1.0;
  std::size_t lambda_growth_every = 500;
  /// Train on z-scored features (statistics stored in the model).
  bool standardize = true;

  std::size_t latent_dim() const noexcept { return k - 1; }
  /// Throws InvalidArgument when an invariant (k >= 2, batch >= k, weights >= 0, ...) fails.
  void validate() const;
};

/// Per-term loss breakdown. Every field is the weighted contribution, so
/// reconstruction + side_info + kl + archetype == total.
struct LossParts {
  double reconstruction = 0.0;
  double side_info = 0.0;
  double kl = 0.0;
  double archetype = 0.0;
  double total = 0.0;
};

struct EpochRecord {
  LossParts mean;          // batch average over the epoch
  double seconds = 0.0;    // wall clock; not part of the serialized history
};

struct TrainReport {
  std::uint64_t seed = 0;
  std::vector<EpochRecord> epochs;
};

/// Deep archetype model: encoder (phi), side-information decoder (theta),
/// reconstruction decoder (psi) and the fixed latent simplex.
struct DeepAAModel {
  DeepAAConfig config;
  SimplexCoords z_fixed;
  ParamStore params;
  std::size_t input_dim = 0;  // p
  std::size_t side_dim = 0;   // q (0 without side information)
  // Feature standardization: x_std = (x - x_mean) / x_scale.
  std::vector<double> x_mean, x_scale, y_mean, y_scale;
};

/// Fresh model with seeded weights. Standardization statistics come from
/// x / y when config.standardize is set (y may be empty without side info).
DeepAAModel init_deep_model(const DeepAAConfig& config, const Matrix& x, const Matrix* y);

struct Encoding {
  Matrix a;      // m x k, rows on the k-simplex
  Matrix b;      // k x m, rows on the m-simplex
  Matrix sigma;  // m x (k-1), positive
};

/// Full encoder pass on a batch. Throws InvalidArgument when m < k.
Encoding encode(const DeepAAModel& model, const Matrix& x_batch);

/// mu = A Z_fixed.
Matrix latent_means(const Matrix& a, const SimplexCoords& z_fixed);

/// ||Z_fixed - B A Z_fixed||_F^2.
double archetype_loss(const Matrix& a, const Matrix& b, const SimplexCoords& z_fixed);

/// Closed-form batch-mean KL(N(mu, diag sigma^2) || N(0, I)).
double kl_standard_normal(const Matrix& mu, const Matrix& sigma);

/// Monte-Carlo batch-mean KL(q(t|x_i) || p(t)) for the hierarchical Dirichlet
/// prior. Draws S = mc_samples Dirichlet(1) mixtures (prior centers m_s Z) and
/// S standard-normal vectors eps_l, both shared across the batch; then
///   KL_i ~ (1/S) sum_l [log q(t_il) - log((1/S) sum_s N(t_il; m_s Z, I))],
/// t_il = mu_i + sigma_i * eps_l.
double kl_dirichlet_hierarchical(const Matrix& mu, const Matrix& sigma, const SimplexCoords& z_fixed,
                                 std::size_t mc_samples, RandomSource& rng);

/// Objective on one batch (noise drawn from rng). y_batch is required iff
/// config.use_side_info. `lambda_scale` multiplies config.lambda (schedules).
LossParts total_loss(const DeepAAModel& model, const Matrix& x_batch, const Matrix* y_batch, RandomSource& rng,
                     double lambda_scale = 1.0);

/// Noise for one loss evaluation: reparametrization draws for the decoders
/// and, for the Dirichlet prior, the shared Monte-Carlo draws.
struct LossNoise {
  Matrix eps;      // m x (k-1)
  Matrix centers;  // S x (k-1) prior centers m_s Z_fixed (Dirichlet prior only)
  Matrix eps_kl;   // S x (k-1) (Dirichlet prior only)
};

/// Reusable loss graph for one model architecture. evaluate() takes
/// standardized batches (see standardize_x / standardize_y).
class LossEvaluator {
 public:
  explicit LossEvaluator(const DeepAAModel& model);

  LossNoise draw_noise(std::size_t m, RandomSource& rng) const;

  /// Forward pass, plus gradients for every parameter when `grads` is non-null.
  LossParts evaluate(const DeepAAModel& model, const Matrix& x_std, const Matrix* y_std, const LossNoise& noise,
                     double lambda_scale, GradMap* grads);

  /// Encoder outputs of the most recent evaluate().
  const Matrix& last_a() const { return graph_.value(a_); }
  const Matrix& last_b() const { return graph_.value(b_); }
  const Matrix& last_mu() const { return graph_.value(mu_); }

 private:
  ad::Graph graph_;
  Matrix z_;  // copy of Z_fixed
  std::size_t k_ = 0;
  PriorKind prior_ = PriorKind::StandardNormal;
  std::size_t mc_samples_ = 0;
  bool side_ = false;
  ad::NodeId a_ = 0, b_ = 0, mu_ = 0, centers_ = 0;
  ad::NodeId rec_ = 0, side_term_ = 0, kl_ = 0, at_ = 0, total_ = 0;
};

Matrix standardize_x(const DeepAAModel& model, const Matrix& x);
Matrix standardize_y(const DeepAAModel& model, const Matrix& y);

struct TrainResult {
  DeepAAModel model;
  TrainReport report;
};

/// Called after every epoch with the current model and the 0-based epoch index.
using EpochCallback = std::function<void(const DeepAAModel&, std::size_t)>;

/// Adam on shuffled mini-batches for config.epochs epochs. A trailing batch
/// smaller than k is skipped.
TrainResult train(const Matrix& x, const Matrix* y, const DeepAAConfig& config, const EpochCallback& on_epoch = {});

struct Projection {
  Matrix a;   // n x k
  Matrix mu;  // n x (k-1)
};

/// Per-point mixture weights and latent means (no batch coupling).
Projection project(const DeepAAModel& model, const Matrix& x);

struct Decoded {
  Matrix x_hat;                 // rows x p, original feature units
  std::optional<Matrix> y_hat;  // rows x q when the model has side information
};

/// Decodes latent points t (rows x (k-1)) through both decoder branches.
Decoded decode_latent(const DeepAAModel& model, const Matrix& t);

/// Decodes t = weights Z_fixed. Weights must lie on the simplex within 1e-6.
Decoded decode_mixture(const DeepAAModel& model, std::span<const double> weights);

struct InterpolationPath {
  Matrix latent;  // steps x (k-1)
  Decoded decoded;
};

/// Evenly spaced decodes along the latent segment from w_start Z to w_end Z.
InterpolationPath interpolate(const DeepAAModel& model, std::span<const double> w_start,
                              std::span<const double> w_end, std::size_t steps);

/// Throws InvalidArgument unless w is a k-vector on the simplex within tol.
void require_simplex_weights(std::span<const double> w, std::size_t k, double tol = 1e-6);

}  // namespace daa
