#include "daa/deep_aa.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "daa/error.hpp"

namespace daa {

using ad::Graph;
using ad::NodeId;

namespace {

constexpr double kLogSigmaMin = -13.0;
constexpr double kLogSigmaMax = 5.0;
constexpr double kConstraintTol = 1e-9;

// Seed streams derived from config.seed.
constexpr std::uint64_t kStreamInit = 1;
constexpr std::uint64_t kStreamShuffle = 2;
constexpr std::uint64_t kStreamNoise = 3;

std::string layer_name(const std::string& prefix, const std::string& layer, const char* part) {
  return prefix + "." + layer + "." + part;
}

void add_dense(ParamStore& store, const std::string& prefix, const std::string& layer, std::size_t in,
               std::size_t out, double gain, RandomSource& rng) {
  // Uniform with variance gain / fan_in (gain 2 for ReLU layers).
  const double bound = std::sqrt(3.0 * gain / static_cast<double>(in));
  Matrix w(in, out);
  for (double& v : w.values()) v = bound * (2.0 * rng.uniform() - 1.0);
  store.add(layer_name(prefix, layer, "w"), std::move(w));
  store.add(layer_name(prefix, layer, "b"), Matrix(1, out));
}

NodeId dense(Graph& g, NodeId in, const std::string& prefix, const std::string& layer) {
  return g.affine(in, g.leaf(layer_name(prefix, layer, "w")), g.leaf(layer_name(prefix, layer, "b")));
}

NodeId hidden_stack(Graph& g, NodeId in, const std::string& prefix, std::size_t layers) {
  NodeId h = in;
  for (std::size_t i = 0; i < layers; ++i) h = g.relu(dense(g, h, prefix, std::to_string(i)));
  return h;
}

struct EncoderNodes {
  NodeId a = 0;
  NodeId b = 0;  // k x m
  NodeId log_sigma = 0;
  NodeId sigma = 0;
};

EncoderNodes build_encoder(Graph& g, const DeepAAConfig& c, NodeId x) {
  const NodeId h = hidden_stack(g, x, "enc", c.encoder_widths.size());
  EncoderNodes e;
  e.a = g.row_softmax(dense(g, h, "enc", "a"));
  e.b = g.transpose(g.col_softmax(dense(g, h, "enc", "b")));
  e.log_sigma = g.clamp(dense(g, h, "enc", "s"), kLogSigmaMin, kLogSigmaMax);
  e.sigma = g.exp(e.log_sigma);
  return e;
}

NodeId build_decoder(Graph& g, NodeId t, const std::string& prefix, std::size_t layers) {
  return dense(g, hidden_stack(g, t, prefix, layers), prefix, "out");
}

// Batch-mean of per-row squared error, or its learned-variance form
// sum((x - x_hat)^2) / v + dim * log v with v = exp(logvar).
NodeId squared_error_term(Graph& g, NodeId pred, NodeId target, std::size_t dim, bool learn_variance,
                          const std::string& prefix) {
  const NodeId sse = g.mean(g.row_sum(g.square(g.sub(pred, target))));
  if (!learn_variance) return sse;
  const NodeId logvar = g.leaf(prefix + ".logvar");
  return g.add(g.scalar_mul(g.exp(g.scale(logvar, -1.0)), sse), g.scale(logvar, static_cast<double>(dim)));
}

NodeId standard_normal_kl(Graph& g, NodeId mu, NodeId sigma, NodeId log_sigma) {
  const NodeId quad = g.scale(g.add(g.square(mu), g.square(sigma)), 0.5);
  return g.mean(g.row_sum(g.add_scalar(g.sub(quad, log_sigma), -0.5)));
}

// Monte-Carlo KL against the hierarchical Dirichlet prior. eps_kl holds the S
// shared noise rows tiled once per batch row (row i*S + l is eps_l).
NodeId dirichlet_kl(Graph& g, NodeId mu, NodeId sigma, NodeId log_sigma, NodeId eps_kl, NodeId centers,
                    std::size_t samples) {
  const NodeId t = g.reparam(g.repeat_rows(mu, samples), g.repeat_rows(sigma, samples), eps_kl);
  const NodeId log_prior = g.row_logsumexp(g.scale(g.pairwise_sq_dist(t, centers), -0.5));
  const NodeId entropy_part = g.add(g.mean(g.row_sum(log_sigma)), g.scale(g.mean(g.row_sum(g.square(eps_kl))), 0.5));
  return g.add_scalar(g.scale(g.add(entropy_part, g.mean(log_prior)), -1.0), std::log(static_cast<double>(samples)));
}

Matrix tile_rows(const Matrix& block, std::size_t times) {
  Matrix out(block.rows() * times, block.cols());
  for (std::size_t i = 0; i < times; ++i)
    for (std::size_t l = 0; l < block.rows(); ++l)
      std::copy(block.row(l).begin(), block.row(l).end(), out.row(i * block.rows() + l).begin());
  return out;
}

Matrix draw_normal(std::size_t rows, std::size_t cols, RandomSource& rng) {
  Matrix m(rows, cols);
  for (double& v : m.values()) v = rng.normal();
  return m;
}

Matrix draw_prior_centers(const Matrix& z, std::size_t samples, RandomSource& rng) {
  const std::vector<double> ones(z.rows(), 1.0);
  Matrix mix(samples, z.rows());
  for (std::size_t s = 0; s < samples; ++s) {
    const auto w = dirichlet_sample(ones, rng);
    std::copy(w.begin(), w.end(), mix.row(s).begin());
  }
  return matmul(mix, z);
}

ad::Bindings bind_params(const DeepAAModel& model) {
  ad::Bindings b;
  for (const auto& p : model.params.params()) b.bind(p.name, p.value);
  return b;
}

void check_finite(const Matrix& m, const char* what) {
  if (!m.all_finite()) throw NumericalError(std::string(what) + " produced non-finite values");
}

Matrix unstandardize(const Matrix& v, const std::vector<double>& mean, const std::vector<double>& scale) {
  Matrix out = v;
  for (std::size_t i = 0; i < v.rows(); ++i)
    for (std::size_t c = 0; c < v.cols(); ++c) out(i, c) = v(i, c) * scale[c] + mean[c];
  return out;
}

Matrix apply_standardize(const Matrix& v, const std::vector<double>& mean, const std::vector<double>& scale,
                         const char* what) {
  if (v.cols() != mean.size()) {
    throw ShapeError(std::string(what) + ": data has " + std::to_string(v.cols()) + " columns, model expects " +
                     std::to_string(mean.size()));
  }
  Matrix out = v;
  for (std::size_t i = 0; i < v.rows(); ++i)
    for (std::size_t c = 0; c < v.cols(); ++c) out(i, c) = (v(i, c) - mean[c]) / scale[c];
  return out;
}

void column_stats(const Matrix& v, bool enabled, std::vector<double>& mean, std::vector<double>& scale) {
  mean.assign(v.cols(), 0.0);
  scale.assign(v.cols(), 1.0);
  if (!enabled || v.rows() < 2) return;
  const auto n = static_cast<double>(v.rows());
  for (std::size_t c = 0; c < v.cols(); ++c) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.rows(); ++i) s += v(i, c);
    mean[c] = s / n;
    double ss = 0.0;
    for (std::size_t i = 0; i < v.rows(); ++i) ss += (v(i, c) - mean[c]) * (v(i, c) - mean[c]);
    const double sd = std::sqrt(ss / (n - 1.0));
    scale[c] = sd > 1e-12 ? sd : 1.0;
  }
}

}  // namespace

std::string to_string(PriorKind prior) {
  return prior == PriorKind::StandardNormal ? "standard-normal" : "dirichlet-hierarchical";
}

PriorKind prior_from_string(const std::string& s) {
  if (s == "standard-normal") return PriorKind::StandardNormal;
  if (s == "dirichlet-hierarchical") return PriorKind::DirichletHierarchical;
  throw InvalidArgument("unknown prior '" + s + "' (expected standard-normal or dirichlet-hierarchical)");
}

void DeepAAConfig::validate() const {
  if (k < 2) throw InvalidArgument("deep AA needs k >= 2");
  if (batch_size < k) throw InvalidArgument("batch_size must be >= k");
  for (double w : {lambda, nu, at_weight, kl_weight})
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidArgument("loss weights must be finite and >= 0");
  if (!(learning_rate > 0.0)) throw InvalidArgument("learning_rate must be > 0");
  if (prior == PriorKind::DirichletHierarchical && mc_samples == 0) throw InvalidArgument("mc_samples must be >= 1");
  if (!(lambda_growth > 0.0) || lambda_growth_every == 0) throw InvalidArgument("invalid lambda schedule");
  for (const auto* widths : {&encoder_widths, &decoder_x_widths, &decoder_y_widths})
    for (std::size_t w : *widths)
      if (w == 0) throw InvalidArgument("layer widths must be >= 1");
}

DeepAAModel init_deep_model(const DeepAAConfig& config, const Matrix& x, const Matrix* y) {
  config.validate();
  if (x.cols() == 0) throw InvalidArgument("init_deep_model: data has no features");
  if (config.use_side_info && (y == nullptr || y->cols() == 0)) {
    throw InvalidArgument("init_deep_model: use_side_info requires side information");
  }
  DeepAAModel m;
  m.config = config;
  m.z_fixed = simplex_vertices(config.k);
  m.input_dim = x.cols();
  m.side_dim = config.use_side_info ? y->cols() : 0;
  column_stats(x, config.standardize, m.x_mean, m.x_scale);
  if (config.use_side_info) column_stats(*y, config.standardize, m.y_mean, m.y_scale);

  RandomSource rng(derive_seed(config.seed, kStreamInit));
  const std::size_t d = config.latent_dim();
  std::size_t in = m.input_dim;
  for (std::size_t i = 0; i < config.encoder_widths.size(); ++i) {
    add_dense(m.params, "enc", std::to_string(i), in, config.encoder_widths[i], 2.0, rng);
    in = config.encoder_widths[i];
  }
  add_dense(m.params, "enc", "a", in, config.k, 1.0, rng);
  add_dense(m.params, "enc", "b", in, config.k, 1.0, rng);
  add_dense(m.params, "enc", "s", in, d, 1.0, rng);

  auto add_decoder = [&](const std::string& prefix, const std::vector<std::size_t>& widths, std::size_t out) {
    std::size_t fan = d;
    for (std::size_t i = 0; i < widths.size(); ++i) {
      add_dense(m.params, prefix, std::to_string(i), fan, widths[i], 2.0, rng);
      fan = widths[i];
    }
    add_dense(m.params, prefix, "out", fan, out, 1.0, rng);
    if (config.learn_decoder_variance) m.params.add(prefix + ".logvar", Matrix(1, 1));
  };
  add_decoder("dec_x", config.decoder_x_widths, m.input_dim);
  if (config.use_side_info) add_decoder("dec_y", config.decoder_y_widths, m.side_dim);
  return m;
}

Matrix standardize_x(const DeepAAModel& model, const Matrix& x) {
  return apply_standardize(x, model.x_mean, model.x_scale, "standardize_x");
}

Matrix standardize_y(const DeepAAModel& model, const Matrix& y) {
  return apply_standardize(y, model.y_mean, model.y_scale, "standardize_y");
}

Matrix latent_means(const Matrix& a, const SimplexCoords& z_fixed) {
  if (a.cols() != z_fixed.k) {
    throw ShapeError("latent_means: weights " + a.shape_string() + " vs " + std::to_string(z_fixed.k) + " vertices");
  }
  return matmul(a, z_fixed.coords);
}

double archetype_loss(const Matrix& a, const Matrix& b, const SimplexCoords& z_fixed) {
  if (a.cols() != z_fixed.k || b.rows() != z_fixed.k || b.cols() != a.rows()) {
    throw ShapeError("archetype_loss: A " + a.shape_string() + ", B " + b.shape_string() + ", k=" +
                     std::to_string(z_fixed.k));
  }
  const Matrix z_pred = matmul(matmul(b, a), z_fixed.coords);
  const double d = frobenius_distance(z_fixed.coords, z_pred);
  return d * d;
}

double kl_standard_normal(const Matrix& mu, const Matrix& sigma) {
  require_same_shape(mu, sigma, "kl_standard_normal");
  if (mu.rows() == 0) throw InvalidArgument("kl_standard_normal: empty batch");
  double total = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double m = mu.values()[i];
    const double s = sigma.values()[i];
    if (!(s > 0.0)) throw InvalidArgument("kl_standard_normal: sigma must be > 0");
    total += 0.5 * (m * m + s * s - 1.0) - std::log(s);
  }
  return total / static_cast<double>(mu.rows());
}

double kl_dirichlet_hierarchical(const Matrix& mu, const Matrix& sigma, const SimplexCoords& z_fixed,
                                 std::size_t mc_samples, RandomSource& rng) {
  require_same_shape(mu, sigma, "kl_dirichlet_hierarchical");
  if (mc_samples == 0) throw InvalidArgument("kl_dirichlet_hierarchical: mc_samples must be >= 1");
  if (mu.cols() != z_fixed.coords.cols()) {
    throw ShapeError("kl_dirichlet_hierarchical: latent dim " + std::to_string(mu.cols()) + " vs simplex dim " +
                     std::to_string(z_fixed.coords.cols()));
  }
  for (double s : sigma.values())
    if (!(s > 0.0)) throw InvalidArgument("kl_dirichlet_hierarchical: sigma must be > 0");

  const Matrix centers = draw_prior_centers(z_fixed.coords, mc_samples, rng);
  const Matrix eps = draw_normal(mc_samples, mu.cols(), rng);
  const Matrix eps_tiled = tile_rows(eps, mu.rows());

  Graph g;
  const NodeId mu_n = g.leaf("mu");
  const NodeId sigma_n = g.leaf("sigma");
  const NodeId eps_n = g.leaf("eps");
  const NodeId c_n = g.constant(centers);
  const NodeId kl = dirichlet_kl(g, mu_n, sigma_n, g.log(sigma_n), eps_n, c_n, mc_samples);
  ad::Bindings b;
  b.bind("mu", mu).bind("sigma", sigma).bind("eps", eps_tiled);
  g.forward(b);
  return g.scalar(kl);
}

LossEvaluator::LossEvaluator(const DeepAAModel& model)
    : z_(model.z_fixed.coords),
      k_(model.config.k),
      prior_(model.config.prior),
      mc_samples_(model.config.mc_samples),
      side_(model.config.use_side_info) {
  const DeepAAConfig& c = model.config;
  Graph& g = graph_;
  const NodeId x = g.leaf("in.x");
  const NodeId eps = g.leaf("in.eps");
  const NodeId lambda = g.leaf("in.lambda");
  const NodeId z = g.constant(z_);

  const EncoderNodes e = build_encoder(g, c, x);
  a_ = e.a;
  b_ = e.b;
  mu_ = g.matmul(e.a, z);
  const NodeId z_pred = g.matmul(g.matmul(e.b, e.a), z);
  at_ = g.sum(g.square(g.sub(z, z_pred)));

  if (prior_ == PriorKind::StandardNormal) {
    kl_ = standard_normal_kl(g, mu_, e.sigma, e.log_sigma);
  } else {
    centers_ = g.constant(Matrix(mc_samples_, c.latent_dim()));
    kl_ = dirichlet_kl(g, mu_, e.sigma, e.log_sigma, g.leaf("in.eps_kl"), centers_, mc_samples_);
  }

  const NodeId t = g.reparam(mu_, e.sigma, eps);
  const NodeId x_hat = build_decoder(g, t, "dec_x", c.decoder_x_widths.size());
  rec_ = squared_error_term(g, x_hat, x, model.input_dim, c.learn_decoder_variance, "dec_x");

  NodeId total = g.scale(rec_, c.nu);
  if (side_) {
    const NodeId y = g.leaf("in.y");
    const NodeId y_hat = build_decoder(g, t, "dec_y", c.decoder_y_widths.size());
    side_term_ = g.scalar_mul(lambda, squared_error_term(g, y_hat, y, model.side_dim, c.learn_decoder_variance, "dec_y"));
    total = g.add(total, side_term_);
  }
  total = g.add(total, g.scale(kl_, c.kl_weight));
  total_ = g.add(total, g.scale(at_, c.at_weight));
}

LossNoise LossEvaluator::draw_noise(std::size_t m, RandomSource& rng) const {
  LossNoise n;
  n.eps = draw_normal(m, k_ - 1, rng);
  if (prior_ == PriorKind::DirichletHierarchical) {
    n.centers = draw_prior_centers(z_, mc_samples_, rng);
    n.eps_kl = draw_normal(mc_samples_, k_ - 1, rng);
  }
  return n;
}

LossParts LossEvaluator::evaluate(const DeepAAModel& model, const Matrix& x_std, const Matrix* y_std,
                                  const LossNoise& noise, double lambda_scale, GradMap* grads) {
  const DeepAAConfig& c = model.config;
  if (x_std.rows() < k_) {
    throw InvalidArgument("loss: batch of " + std::to_string(x_std.rows()) + " rows is smaller than k=" +
                          std::to_string(k_));
  }
  if (side_ && y_std == nullptr) throw InvalidArgument("loss: side information required (use_side_info is set)");
  if (side_ && y_std->rows() != x_std.rows()) throw ShapeError("loss: x and y batches differ in rows");

  ad::Bindings b = bind_params(model);
  const Matrix lambda(1, 1, c.lambda * lambda_scale);
  Matrix eps_tiled;
  b.bind("in.x", x_std).bind("in.eps", noise.eps).bind("in.lambda", lambda);
  if (side_) b.bind("in.y", *y_std);
  if (prior_ == PriorKind::DirichletHierarchical) {
    graph_.set_constant(centers_, noise.centers);
    eps_tiled = tile_rows(noise.eps_kl, x_std.rows());
    b.bind("in.eps_kl", eps_tiled);
  }
  graph_.forward(b);

  LossParts parts;
  parts.reconstruction = c.nu * graph_.scalar(rec_);
  parts.side_info = side_ ? graph_.scalar(side_term_) : 0.0;
  parts.kl = c.kl_weight * graph_.scalar(kl_);
  parts.archetype = c.at_weight * graph_.scalar(at_);
  parts.total = graph_.scalar(total_);
  if (!std::isfinite(parts.total)) throw NumericalError("loss is not finite");

  if (grads != nullptr) {
    graph_.backward(total_);
    grads->clear();
    for (const auto& p : model.params.params()) (*grads)[p.name] = graph_.grad(graph_.find_leaf(p.name));
  }
  return parts;
}

LossParts total_loss(const DeepAAModel& model, const Matrix& x_batch, const Matrix* y_batch, RandomSource& rng,
                     double lambda_scale) {
  if (model.config.use_side_info && y_batch == nullptr) {
    throw InvalidArgument("total_loss: side information required (use_side_info is set)");
  }
  LossEvaluator eval(model);
  const LossNoise noise = eval.draw_noise(x_batch.rows(), rng);
  const Matrix x_std = standardize_x(model, x_batch);
  Matrix y_std;
  if (model.config.use_side_info) y_std = standardize_y(model, *y_batch);
  return eval.evaluate(model, x_std, model.config.use_side_info ? &y_std : nullptr, noise, lambda_scale, nullptr);
}

TrainResult train(const Matrix& x, const Matrix* y, const DeepAAConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  const std::size_t n = x.rows();
  if (n < config.batch_size) {
    throw InvalidArgument("train: n=" + std::to_string(n) + " is smaller than batch_size=" +
                          std::to_string(config.batch_size));
  }
  if (!x.all_finite()) throw DataError("train: data contains non-finite values");
  if (config.use_side_info) {
    if (y == nullptr) throw InvalidArgument("train: use_side_info requires side information");
    if (y->rows() != n) throw ShapeError("train: x has " + std::to_string(n) + " rows, y has " + std::to_string(y->rows()));
  }

  TrainResult res{init_deep_model(config, x, config.use_side_info ? y : nullptr), {}};
  DeepAAModel& model = res.model;
  res.report.seed = config.seed;
  const Matrix x_std = standardize_x(model, x);
  Matrix y_std;
  if (config.use_side_info) y_std = standardize_y(model, *y);

  RandomSource shuffle_rng(derive_seed(config.seed, kStreamShuffle));
  RandomSource noise_rng(derive_seed(config.seed, kStreamNoise));
  LossEvaluator eval(model);
  const AdamOptions adam{config.learning_rate};
  GradMap grads;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    shuffle_rng.shuffle(order);
    LossParts sum;
    std::size_t batches = 0;
    for (std::size_t lo = 0; lo < n; lo += config.batch_size) {
      const std::size_t hi = std::min(n, lo + config.batch_size);
      if (hi - lo < config.k) continue;
      const std::span<const std::size_t> idx(order.data() + lo, hi - lo);
      const Matrix xb = x_std.select_rows(idx);
      Matrix yb;
      if (config.use_side_info) yb = y_std.select_rows(idx);
      const double lambda_scale = std::pow(
          config.lambda_growth, static_cast<double>(model.params.step() / config.lambda_growth_every));
      const LossNoise noise = eval.draw_noise(xb.rows(), noise_rng);
      const LossParts parts =
          eval.evaluate(model, xb, config.use_side_info ? &yb : nullptr, noise, lambda_scale, &grads);
      const double residual = std::max(row_stochastic_residual(eval.last_a()), row_stochastic_residual(eval.last_b()));
      if (residual > kConstraintTol) {
        throw NumericalError("train: encoder weights violate the simplex constraints (residual " +
                             std::to_string(residual) + ")");
      }
      adam_step(model.params, grads, adam);
      sum.reconstruction += parts.reconstruction;
      sum.side_info += parts.side_info;
      sum.kl += parts.kl;
      sum.archetype += parts.archetype;
      sum.total += parts.total;
      ++batches;
    }
    for (const auto& p : model.params.params()) check_finite(p.value, "train: parameter update");
    EpochRecord rec;
    const double inv = batches ? 1.0 / static_cast<double>(batches) : 0.0;
    rec.mean = {sum.reconstruction * inv, sum.side_info * inv, sum.kl * inv, sum.archetype * inv, sum.total * inv};
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    res.report.epochs.push_back(rec);
    if (on_epoch) on_epoch(model, epoch);
  }
  return res;
}

Encoding encode(const DeepAAModel& model, const Matrix& x_batch) {
  if (x_batch.rows() < model.config.k) {
    throw InvalidArgument("encode: batch of " + std::to_string(x_batch.rows()) + " rows is smaller than k=" +
                          std::to_string(model.config.k));
  }
  const Matrix x_std = standardize_x(model, x_batch);
  Graph g;
  const EncoderNodes e = build_encoder(g, model.config, g.leaf("in.x"));
  ad::Bindings b = bind_params(model);
  b.bind("in.x", x_std);
  g.forward(b);
  return {g.value(e.a), g.value(e.b), g.value(e.sigma)};
}

Projection project(const DeepAAModel& model, const Matrix& x) {
  if (x.rows() == 0) throw InvalidArgument("project: no rows");
  const Matrix x_std = standardize_x(model, x);
  Graph g;
  const NodeId h = hidden_stack(g, g.leaf("in.x"), "enc", model.config.encoder_widths.size());
  const NodeId a = g.row_softmax(dense(g, h, "enc", "a"));
  ad::Bindings b = bind_params(model);
  b.bind("in.x", x_std);
  g.forward(b);
  Projection p{g.value(a), {}};
  p.mu = latent_means(p.a, model.z_fixed);
  return p;
}

Decoded decode_latent(const DeepAAModel& model, const Matrix& t) {
  const std::size_t d = model.config.latent_dim();
  if (t.cols() != d) throw ShapeError("decode_latent: latent points " + t.shape_string() + ", expected dim " + std::to_string(d));
  Graph g;
  const NodeId tn = g.leaf("in.t");
  const NodeId xh = build_decoder(g, tn, "dec_x", model.config.decoder_x_widths.size());
  NodeId yh = 0;
  if (model.config.use_side_info) yh = build_decoder(g, tn, "dec_y", model.config.decoder_y_widths.size());
  ad::Bindings b = bind_params(model);
  b.bind("in.t", t);
  g.forward(b);
  Decoded out{unstandardize(g.value(xh), model.x_mean, model.x_scale), std::nullopt};
  if (model.config.use_side_info) out.y_hat = unstandardize(g.value(yh), model.y_mean, model.y_scale);
  return out;
}

void require_simplex_weights(std::span<const double> w, std::size_t k, double tol) {
  if (w.size() != k) {
    throw InvalidArgument("mixture weights: expected " + std::to_string(k) + " entries, got " + std::to_string(w.size()));
  }
  double s = 0.0;
  for (double v : w) {
    if (!std::isfinite(v) || v < -tol) throw InvalidArgument("mixture weights: entries must be non-negative");
    s += v;
  }
  if (std::abs(s - 1.0) > tol) throw InvalidArgument("mixture weights: must sum to 1 (got " + std::to_string(s) + ")");
}

Decoded decode_mixture(const DeepAAModel& model, std::span<const double> weights) {
  require_simplex_weights(weights, model.config.k);
  return decode_latent(model, latent_means(Matrix::row_vector(weights), model.z_fixed));
}

InterpolationPath interpolate(const DeepAAModel& model, std::span<const double> w_start, std::span<const double> w_end,
                              std::size_t steps) {
  if (steps < 2) throw InvalidArgument("interpolate: steps must be >= 2");
  require_simplex_weights(w_start, model.config.k);
  require_simplex_weights(w_end, model.config.k);
  const Matrix t0 = latent_means(Matrix::row_vector(w_start), model.z_fixed);
  const Matrix t1 = latent_means(Matrix::row_vector(w_end), model.z_fixed);
  InterpolationPath path;
  path.latent = Matrix(steps, t0.cols());
  for (std::size_t s = 0; s < steps; ++s) {
    const double alpha = static_cast<double>(s) / static_cast<double>(steps - 1);
    for (std::size_t c = 0; c < t0.cols(); ++c) path.latent(s, c) = (1.0 - alpha) * t0(0, c) + alpha * t1(0, c);
  }
  path.decoded = decode_latent(model, path.latent);
  return path;
}

}  // namespace daa
