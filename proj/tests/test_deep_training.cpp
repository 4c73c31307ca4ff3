// Multi-seed training checks on the curved three-archetype data set.
#include <doctest.h>

#include <cstdio>
#include <vector>

#include "daa/deep_aa.hpp"
#include "daa/synthdata.hpp"

using namespace daa;

namespace {

struct Run {
  Matrix x;
  GeneratedData gen;
  std::size_t curved = 0;
  DeepAAModel init;
  TrainResult trained;
};

Run run_seed(std::uint64_t seed) {
  Run r;
  RandomSource rng(seed);
  r.gen = generate_archetype_data(10000, 3, 8, 0.05, 1.0, rng);
  r.curved = most_curved_dim(r.gen.truth.z_true);
  r.x = apply_curvature(r.gen.x, r.curved);
  DeepAAConfig c;
  c.seed = seed;
  r.init = init_deep_model(c, r.x, nullptr);
  r.trained = train(r.x, nullptr, c);
  return r;
}

const std::vector<Run>& runs() {
  static const std::vector<Run> all = [] {
    std::vector<Run> v;
    for (std::uint64_t s = 1; s <= 5; ++s) v.push_back(run_seed(s));
    return v;
  }();
  return all;
}

Matrix first_rows(const Matrix& x, std::size_t m) {
  std::vector<std::size_t> idx(m);
  for (std::size_t i = 0; i < m; ++i) idx[i] = i;
  return x.select_rows(idx);
}

}  // namespace

TEST_CASE("training lowers the mean total loss") {
  for (const Run& r : runs()) {
    const auto& e = r.trained.report.epochs;
    REQUIRE(e.size() == 20);
    CHECK(e.back().mean.total < e.front().mean.total);
  }
}

TEST_CASE("archetype loss is pulled below 1% of its initial value") {
  double before = 0.0, after = 0.0;
  for (const Run& r : runs()) {
    const Matrix batch = first_rows(r.x, 100);
    const Encoding e0 = encode(r.init, batch);
    const Encoding e1 = encode(r.trained.model, batch);
    before += archetype_loss(e0.a, e0.b, r.init.z_fixed);
    after += archetype_loss(e1.a, e1.b, r.trained.model.z_fixed);
  }
  std::printf("archetype loss, mean over seeds: %.3e -> %.3e\n", before / 5, after / 5);
  CHECK(after < 0.01 * before);
}

TEST_CASE("interpolating between the curved-coordinate extremes is monotone") {
  int monotone = 0;
  for (const Run& r : runs()) {
    const Matrix observed = apply_curvature(r.gen.truth.z_true, r.curved);
    std::size_t lo = 0, hi = 0;
    for (std::size_t j = 1; j < 3; ++j) {
      if (observed(j, r.curved) < observed(lo, r.curved)) lo = j;
      if (observed(j, r.curved) > observed(hi, r.curved)) hi = j;
    }
    // Latent vertex each extreme archetype is assigned to.
    const Projection p = project(r.trained.model, r.x.select_rows(
                                                      std::vector<std::size_t>{r.gen.truth.archetype_rows[lo],
                                                                               r.gen.truth.archetype_rows[hi]}));
    auto vertex = [&](std::size_t row) {
      std::size_t best = 0;
      for (std::size_t j = 1; j < 3; ++j)
        if (p.a(row, j) > p.a(row, best)) best = j;
      return best;
    };
    const std::size_t vlo = vertex(0), vhi = vertex(1);
    if (vlo == vhi) continue;
    std::vector<double> from(3, 0.0), to(3, 0.0);
    from[vlo] = 1.0;
    to[vhi] = 1.0;
    const InterpolationPath path = interpolate(r.trained.model, from, to, 21);
    bool ok = true;
    for (std::size_t s = 1; s < 21; ++s) ok = ok && path.decoded.x_hat(s, r.curved) > path.decoded.x_hat(s - 1, r.curved);
    monotone += ok;
  }
  std::printf("monotone interpolation in %d/5 seeds\n", monotone);
  CHECK(monotone >= 3);
}

TEST_CASE("identical seeds give identical reports and parameters") {
  const Run again = run_seed(2);
  const Run& first = runs()[1];
  REQUIRE(again.trained.report.epochs.size() == first.trained.report.epochs.size());
  for (std::size_t e = 0; e < first.trained.report.epochs.size(); ++e) {
    const LossParts& a = first.trained.report.epochs[e].mean;
    const LossParts& b = again.trained.report.epochs[e].mean;
    CHECK(a.total == b.total);
    CHECK(a.reconstruction == b.reconstruction);
    CHECK(a.kl == b.kl);
    CHECK(a.archetype == b.archetype);
  }
  for (std::size_t i = 0; i < first.trained.model.params.params().size(); ++i)
    CHECK(first.trained.model.params.params()[i].value == again.trained.model.params.params()[i].value);
}
