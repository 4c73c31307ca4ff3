#pragma once

// Finite-difference check of the full deep AA objective with the noise held
// fixed, so the loss is a deterministic function of the parameters.

#include <algorithm>
#include <cmath>
#include <string>

#include "daa/deep_aa.hpp"
#include "test_util.hpp"

namespace daa::test {

struct LossGradResult {
  double max_rel_error = 0.0;
  std::string worst_param;
};

// Tiny model: k=3, one hidden layer of width 4, batch of 5, side information on.
inline LossGradResult loss_gradcheck(PriorKind prior, bool learn_variance, std::uint64_t seed) {
  RandomSource rng(seed);
  const Matrix x = random_matrix(5, 3, rng);
  const Matrix y = random_matrix(5, 1, rng);
  DeepAAConfig c;
  c.k = 3;
  c.encoder_widths = c.decoder_x_widths = c.decoder_y_widths = {4};
  c.batch_size = 5;
  c.prior = prior;
  c.mc_samples = 4;
  c.use_side_info = true;
  c.learn_decoder_variance = learn_variance;
  c.seed = seed;
  DeepAAModel m = init_deep_model(c, x, &y);
  LossEvaluator eval(m);
  const LossNoise noise = eval.draw_noise(5, rng);
  const Matrix xs = standardize_x(m, x), ys = standardize_y(m, y);
  const double lambda_scale = 1.3;
  GradMap grads;
  eval.evaluate(m, xs, &ys, noise, lambda_scale, &grads);

  LossGradResult res;
  const double h = 1e-5;
  for (auto& p : m.params.params()) {
    const Matrix& g = grads.at(p.name);
    double diff = 0.0, ng = 0.0, nf = 0.0;
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double orig = p.value.values()[i];
      p.value.values()[i] = orig + h;
      const double up = eval.evaluate(m, xs, &ys, noise, lambda_scale, nullptr).total;
      p.value.values()[i] = orig - h;
      const double down = eval.evaluate(m, xs, &ys, noise, lambda_scale, nullptr).total;
      p.value.values()[i] = orig;
      const double fd = (up - down) / (2 * h);
      diff += std::pow(fd - g.values()[i], 2);
      ng += g.values()[i] * g.values()[i];
      nf += fd * fd;
    }
    const double rel = std::sqrt(diff) / std::max({std::sqrt(ng), std::sqrt(nf), 1e-6});
    if (rel >= res.max_rel_error) {
      res.max_rel_error = rel;
      res.worst_param = p.name;
    }
  }
  return res;
}

}  // namespace daa::test
