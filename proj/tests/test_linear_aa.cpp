#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "daa/error.hpp"
#include "daa/evaluation.hpp"
#include "daa/linear_aa.hpp"
#include "daa/numerics.hpp"
#include "daa/synthdata.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace daa;

namespace {

void check_model_invariants(const LinearAAModel& m, const Matrix& x) {
  CHECK(row_stochastic_residual(m.a) < 1e-9);
  CHECK(row_stochastic_residual(m.b) < 1e-9);
  for (double v : m.a.values()) CHECK(v >= -1e-12);
  for (double v : m.b.values()) CHECK(v >= -1e-12);
  CHECK(test::max_abs_diff(m.z, matmul(m.b, x)) < 1e-9);
  for (std::size_t i = 1; i < m.rss_history.size(); ++i) CHECK(m.rss_history[i] <= m.rss_history[i - 1] + 1e-9);
}

}  // namespace

TEST_SUITE("rss") {
  TEST_CASE("identity factors reconstruct exactly") {
    const Matrix x{{1, 2}, {3, -1}, {0.5, 4}};
    CHECK(rss(x, Matrix::identity(3), Matrix::identity(3)) == 0.0);
  }
  TEST_CASE("k=1 with uniform B is the total scatter") {
    const Matrix x{{1, 2}, {3, -1}, {0.5, 4}, {2, 2}};
    const double r = rss(x, Matrix(4, 1, 1.0), Matrix(1, 4, 0.25));
    CHECK(r == doctest::Approx(oracle::total_scatter(x)).epsilon(1e-12));
  }
  TEST_CASE("random instance matches the element-wise expansion") {
    RandomSource rng(31);
    const Matrix x = test::random_matrix(4, 2, rng);
    const Matrix a = test::random_stochastic(4, 2, rng);
    const Matrix b = test::random_stochastic(2, 4, rng);
    CHECK(std::abs(rss(x, a, b) - oracle::rss_expanded(x, a, b)) < 1e-12);
  }
  TEST_CASE("shape mismatch throws") { CHECK_THROWS_AS(rss(Matrix(4, 2), Matrix(4, 2), Matrix(2, 3)), ShapeError); }
}

TEST_SUITE("fit_linear_aa") {
  TEST_CASE("repeated distinct points are recovered exactly") {
    const Matrix pts{{0, 0, 1}, {3, 0, 0}, {0, 2, 0.5}};
    std::vector<std::size_t> rows;
    for (int r = 0; r < 20; ++r)
      for (std::size_t j = 0; j < 3; ++j) rows.push_back(j);
    const Matrix x = pts.select_rows(rows);
    const LinearAAModel m = fit_linear_aa(x, 3, LinearFitOptions{});
    CHECK(m.rss_history.back() < 1e-6);
    CHECK(match_archetypes(m.z, pts).rmse < 1e-3);
    check_model_invariants(m, x);
  }
  TEST_CASE("k=1 gives the data mean") {
    RandomSource rng(32);
    const Matrix x = test::random_matrix(40, 3, rng);
    const LinearAAModel m = fit_linear_aa(x, 1, LinearFitOptions{});
    for (std::size_t c = 0; c < 3; ++c) {
      double mean = 0.0;
      for (std::size_t i = 0; i < 40; ++i) mean += x(i, c);
      CHECK(std::abs(m.z(0, c) - mean / 40.0) < 1e-6);
    }
  }
  TEST_CASE("five-point k=2 instance is within 1% of the grid optimum") {
    const Matrix x = oracle::five_point_instance();
    const LinearAAModel m = fit_linear_aa(x, 2, LinearFitOptions{});
    const double best = oracle::grid_rss_k2(x, 200);
    CHECK(m.rss_history.back() <= best * 1.01);
    check_model_invariants(m, x);
  }
  TEST_CASE("invalid k") {
    const Matrix x(3, 2, 1.0);
    CHECK_THROWS_AS(fit_linear_aa(x, 0, LinearFitOptions{}), InvalidArgument);
    CHECK_THROWS_AS(fit_linear_aa(x, 4, LinearFitOptions{}), InvalidArgument);
  }
  TEST_CASE("invalid options") {
    LinearFitOptions o;
    o.rel_tol = 0.0;
    CHECK_THROWS_AS(o.validate(), InvalidArgument);
    o = LinearFitOptions{};
    o.max_outer_iters = 0;
    CHECK_THROWS_AS(o.validate(), InvalidArgument);
  }
  TEST_CASE("invariants on noisy synthetic data, both initializations") {
    RandomSource rng(33);
    const GeneratedData g = generate_archetype_data(300, 4, 5, 0.05, 1.0, rng);
    for (LinearInit init : {LinearInit::FurthestSum, LinearInit::RandomRows}) {
      LinearFitOptions o;
      o.init = init;
      o.seed = 3;
      check_model_invariants(fit_linear_aa(g.x, 4, o), g.x);
    }
  }
  TEST_CASE("RSS is non-increasing in k") {
    RandomSource rng(34);
    const GeneratedData g = generate_archetype_data(200, 3, 4, 0.1, 1.0, rng);
    double prev = INFINITY;
    for (std::size_t k = 1; k <= 5; ++k) {
      LinearFitOptions o;
      o.seed = 7;
      o.rel_tol = 1e-9;
      o.max_outer_iters = 1000;
      const double r = fit_linear_aa(g.x, k, o).rss_history.back();
      CHECK(r <= prev * (1.0 + 1e-6) + 1e-6);
      prev = r;
    }
  }
  TEST_CASE("row permutation gives the same archetypes") {
    RandomSource rng(35);
    const GeneratedData g = generate_archetype_data(150, 3, 4, 0.02, 1.0, rng);
    std::vector<std::size_t> perm(150);
    std::iota(perm.begin(), perm.end(), 0);
    RandomSource prng(1);
    prng.shuffle(perm);
    LinearFitOptions o;
    o.rel_tol = 1e-12;
    o.max_outer_iters = 2000;
    const LinearAAModel a = fit_linear_aa(g.x, 3, o);
    const LinearAAModel b = fit_linear_aa(g.x.select_rows(perm), 3, o);
    CHECK(match_archetypes(a.z, b.z).rmse < 1e-6);
  }
  TEST_CASE("same seed gives identical models") {
    RandomSource rng(36);
    const GeneratedData g = generate_archetype_data(200, 3, 4, 0.05, 1.0, rng);
    LinearFitOptions o;
    o.init = LinearInit::RandomRows;
    o.seed = 99;
    const LinearAAModel a = fit_linear_aa(g.x, 3, o);
    const LinearAAModel b = fit_linear_aa(g.x, 3, o);
    CHECK(a.z == b.z);
    CHECK(a.a == b.a);
    CHECK(a.rss_history == b.rss_history);
  }
  TEST_CASE("init names round trip") {
    CHECK(linear_init_from_string(to_string(LinearInit::FurthestSum)) == LinearInit::FurthestSum);
    CHECK(linear_init_from_string(to_string(LinearInit::RandomRows)) == LinearInit::RandomRows);
    CHECK_THROWS_AS(linear_init_from_string("kmeans"), InvalidArgument);
  }
}

TEST_SUITE("transform") {
  const Matrix tri{{0, 0}, {2, 0}, {0, 2}};

  LinearAAModel model_with(const Matrix& z) {
    LinearAAModel m;
    m.z = z;
    return m;
  }

  TEST_CASE("archetype maps to its one-hot weight") {
    const Matrix w = transform(model_with(tri), tri);
    CHECK(test::max_abs_diff(w, Matrix::identity(3)) < 1e-4);
  }
  TEST_CASE("midpoint of two archetypes") {
    const Matrix w = transform(model_with(tri), Matrix{{1, 0}});
    CHECK(std::abs(w(0, 0) - 0.5) < 1e-3);
    CHECK(std::abs(w(0, 1) - 0.5) < 1e-3);
    CHECK(std::abs(w(0, 2)) < 1e-3);
  }
  TEST_CASE("outside points match the grid-search projection") {
    const Matrix outside{{3, 3}, {-1, -2}, {2.5, -0.5}, {-0.7, 1.1}};
    const Matrix w = transform(model_with(tri), outside);
    for (std::size_t i = 0; i < outside.rows(); ++i) {
      const std::vector<double> g = oracle::grid_projection_weights(tri, outside.row(i), 2000);
      for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(w(i, j) - g[j]) < 1e-3);
    }
  }
  TEST_CASE("wrong column count throws") {
    CHECK_THROWS_AS(transform(model_with(tri), Matrix(2, 3)), ShapeError);
  }
}

TEST_SUITE("reconstruct") {
  TEST_CASE("one-hot weights give archetype rows") {
    LinearAAModel m;
    m.z = Matrix{{1, 2}, {3, 4}};
    m.a = Matrix{{0, 1}, {1, 0}};
    m.b = Matrix(2, 2);
    CHECK(reconstruct(m, Matrix(2, 2)) == Matrix{{3, 4}, {1, 2}});
  }
  TEST_CASE("reconstruction error equals rss") {
    RandomSource rng(37);
    const GeneratedData g = generate_archetype_data(100, 3, 4, 0.05, 1.0, rng);
    const LinearAAModel m = fit_linear_aa(g.x, 3, LinearFitOptions{});
    const double d = frobenius_distance(reconstruct(m, g.x), g.x);
    CHECK(std::abs(d * d - rss(g.x, m.a, m.b)) < 1e-12 * std::max(1.0, d * d));
  }
  TEST_CASE("noise-free data is reconstructed almost exactly") {
    RandomSource rng(38);
    const GeneratedData g = generate_archetype_data(400, 3, 6, 0.0, 1.0, rng);
    const LinearAAModel m = fit_linear_aa(g.x, 3, LinearFitOptions{});
    const Matrix r = reconstruct(m, g.x);
    for (std::size_t i = 0; i < g.x.rows(); ++i) {
      double s = 0.0;
      for (std::size_t c = 0; c < g.x.cols(); ++c) s += (r(i, c) - g.x(i, c)) * (r(i, c) - g.x(i, c));
      CHECK(std::sqrt(s) < 1e-3);
    }
  }
}
