#include <doctest.h>

#include <cmath>
#include <vector>

#include "daa/error.hpp"
#include "daa/linear_aa.hpp"
#include "daa/numerics.hpp"
#include "daa/synthdata.hpp"
#include "test_util.hpp"

using namespace daa;

TEST_SUITE("generate_archetype_data") {
  TEST_CASE("shapes of the reference setup") {
    RandomSource rng(1);
    const GeneratedData g = generate_archetype_data(10000, 3, 8, 0.05, 1.0, rng);
    CHECK(g.x.rows() == 10000);
    CHECK(g.x.cols() == 8);
    CHECK(g.truth.z_true.rows() == 3);
    CHECK(g.truth.z_true.cols() == 8);
    CHECK(g.truth.a_true.rows() == 10000);
    CHECK(g.truth.embedding.rows() == 2);
    CHECK(g.truth.sigma2 == 0.05);
    CHECK(row_stochastic_residual(g.truth.a_true) < 1e-9);
  }
  TEST_CASE("embedding rows are orthonormal") {
    RandomSource rng(2);
    const GeneratedData g = generate_archetype_data(50, 5, 9, 0.05, 1.0, rng);
    const Matrix gram = matmul(g.truth.embedding, g.truth.embedding.transpose());
    CHECK(test::max_abs_diff(gram, Matrix::identity(4)) < 1e-12);
  }
  TEST_CASE("archetype rows hold the exact archetypes") {
    RandomSource rng(3);
    const GeneratedData g = generate_archetype_data(500, 3, 8, 0.05, 1.0, rng);
    REQUIRE(g.truth.archetype_rows.size() == 3);
    for (std::size_t j = 0; j < 3; ++j) {
      const std::size_t r = g.truth.archetype_rows[j];
      for (std::size_t c = 0; c < 8; ++c) CHECK(g.x(r, c) == g.truth.z_true(j, c));
      CHECK(g.truth.a_true(r, j) == 1.0);
    }
  }
  TEST_CASE("archetypes are separated by at least half the spread") {
    RandomSource rng(4);
    for (double spread : {1.0, 5.0}) {
      const GeneratedData g = generate_archetype_data(10, 4, 6, 0.0, 1.0, rng, spread);
      for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = a + 1; b < 4; ++b) {
          double s = 0.0;
          for (std::size_t c = 0; c < 6; ++c) s += std::pow(g.truth.z_true(a, c) - g.truth.z_true(b, c), 2);
          CHECK(std::sqrt(s) >= 0.5 * spread - 1e-12);
        }
    }
  }
  TEST_CASE("noise-free rows lie in the archetype hull") {
    RandomSource rng(5);
    const GeneratedData g = generate_archetype_data(300, 3, 8, 0.0, 1.0, rng);
    const Matrix w = simplex_weights(g.truth.z_true, g.x);
    const Matrix r = matmul(w, g.truth.z_true);
    for (std::size_t i = 0; i < g.x.rows(); ++i) {
      double s = 0.0;
      for (std::size_t c = 0; c < 8; ++c) s += std::pow(r(i, c) - g.x(i, c), 2);
      CHECK(s < 1e-9);
    }
  }
  TEST_CASE("mixture weights average to 1/k") {
    RandomSource rng(6);
    const GeneratedData g = generate_archetype_data(100000, 3, 3, 0.0, 1.0, rng);
    for (std::size_t j = 0; j < 3; ++j) {
      double m = 0.0;
      for (std::size_t i = 0; i < g.truth.a_true.rows(); ++i) m += g.truth.a_true(i, j);
      CHECK(std::abs(m / 100000.0 - 1.0 / 3.0) < 0.01);
    }
  }
  TEST_CASE("noise variance matches sigma2") {
    RandomSource rng(7);
    const GeneratedData g = generate_archetype_data(20000, 3, 5, 0.05, 1.0, rng);
    const Matrix mean = matmul(g.truth.a_true, g.truth.z_true);
    double s = 0.0;
    for (std::size_t i = 0; i < g.x.size(); ++i) s += std::pow(g.x.values()[i] - mean.values()[i], 2);
    CHECK(std::abs(s / g.x.size() - 0.05) < 0.002);
  }
  TEST_CASE("same seed gives identical data") {
    RandomSource a(8), b(8);
    const GeneratedData ga = generate_archetype_data(400, 3, 8, 0.05, 1.0, a);
    const GeneratedData gb = generate_archetype_data(400, 3, 8, 0.05, 1.0, b);
    CHECK(ga.x == gb.x);
    CHECK(ga.truth.a_true == gb.truth.a_true);
    CHECK(ga.truth.archetype_rows == gb.truth.archetype_rows);
  }
  TEST_CASE("single noise-free archetype repeats one row") {
    RandomSource rng(9);
    const GeneratedData g = generate_archetype_data(5, 1, 2, 0.0, 1.0, rng);
    for (std::size_t i = 1; i < 5; ++i)
      for (std::size_t c = 0; c < 2; ++c) CHECK(g.x(i, c) == g.x(0, c));
  }
  TEST_CASE("invalid parameters") {
    RandomSource rng(10);
    CHECK_THROWS_AS(generate_archetype_data(10, 0, 3, 0.1, 1.0, rng), InvalidArgument);
    CHECK_THROWS_AS(generate_archetype_data(10, 5, 3, 0.1, 1.0, rng), InvalidArgument);
    CHECK_THROWS_AS(generate_archetype_data(10, 3, 3, -0.1, 1.0, rng), InvalidArgument);
    CHECK_THROWS_AS(generate_archetype_data(10, 3, 3, 0.1, 0.0, rng), InvalidArgument);
    CHECK_THROWS_AS(generate_archetype_data(2, 3, 3, 0.1, 1.0, rng), InvalidArgument);
    CHECK_THROWS_AS(generate_archetype_data(10, 3, 3, 0.1, 1.0, rng, 0.0), InvalidArgument);
  }
}

TEST_SUITE("apply_curvature") {
  TEST_CASE("zeros become ones") {
    const Matrix c = apply_curvature(Matrix(4, 3), 1);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(c(i, 0) == 0.0);
      CHECK(c(i, 1) == 1.0);
      CHECK(c(i, 2) == 0.0);
    }
  }
  TEST_CASE("order preserving and invertible") {
    Matrix x(61, 2);
    for (std::size_t i = 0; i < 61; ++i) x(i, 1) = -3.0 + 0.1 * static_cast<double>(i);
    const Matrix c = apply_curvature(x, 1);
    for (std::size_t i = 1; i < 61; ++i) CHECK(c(i, 1) > c(i - 1, 1));
    for (std::size_t i = 0; i < 61; ++i) CHECK(std::abs(std::log(c(i, 1)) - x(i, 1)) < 1e-12);
  }
  TEST_CASE("column out of range") { CHECK_THROWS_AS(apply_curvature(Matrix(2, 3), 3), InvalidArgument); }
  TEST_CASE("most curved column and observed archetypes") {
    const Matrix z{{0.0, 1.0, -2.0}, {0.5, 3.0, 2.0}};
    CHECK(most_curved_dim(z) == 1);  // e^3 - e^1 beats e^2 - e^-2
    SyntheticTruth t;
    t.z_true = z;
    CHECK(observed_archetypes(t) == z);
    t.curved_dim = 1;
    CHECK(observed_archetypes(t)(1, 1) == std::exp(3.0));
  }
}

TEST_SUITE("synth_side_information") {
  RandomSource rng0(11);
  const Matrix a = test::random_stochastic(50, 3, rng0);

  TEST_CASE("unit weight selects a column") {
    RandomSource rng(12);
    const std::vector<double> w{0.0, 1.0, 0.0};
    const Matrix y = synth_side_information(a, w, 0.0, rng);
    for (std::size_t i = 0; i < a.rows(); ++i) CHECK(y(i, 0) == a(i, 1));
  }
  TEST_CASE("constant weight gives a constant") {
    RandomSource rng(13);
    const std::vector<double> w{2.5, 2.5, 2.5};
    const Matrix y = synth_side_information(a, w, 0.0, rng);
    for (std::size_t i = 0; i < a.rows(); ++i) CHECK(y(i, 0) == doctest::Approx(2.5).epsilon(1e-14));
  }
  TEST_CASE("noise variance") {
    RandomSource rng(14), wr(15);
    const Matrix big = test::random_stochastic(100000, 3, wr);
    const std::vector<double> w{0.2, -1.0, 3.0};
    const Matrix y = synth_side_information(big, w, 0.05, rng);
    double s = 0.0, s2 = 0.0;
    for (std::size_t i = 0; i < big.rows(); ++i) {
      const double r = y(i, 0) - dot(big.row(i), w);
      s += r;
      s2 += r * r;
    }
    const double n = static_cast<double>(big.rows());
    const double var = s2 / n - (s / n) * (s / n);
    CHECK(std::abs(var - 0.0025) < 0.1 * 0.0025);
  }
  TEST_CASE("length mismatch") {
    RandomSource rng(16);
    const std::vector<double> w{1.0, 2.0};
    CHECK_THROWS_AS(synth_side_information(a, w, 0.0, rng), ShapeError);
  }
}
