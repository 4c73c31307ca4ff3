#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include <unistd.h>

#include "daa/error.hpp"
#include "daa/io.hpp"
#include "daa/synthdata.hpp"
#include "test_util.hpp"

using namespace daa;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("daa_io_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

}  // namespace

TEST_CASE("format_double round trips exactly") {
  RandomSource rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double v = std::ldexp(rng.normal(), static_cast<int>(rng.below(200)) - 100);
    CHECK(std::stod(io::format_double(v)) == v);
  }
  CHECK(io::format_double(0.1) == "0.1");
}

TEST_CASE("dataset round trip with and without side information") {
  TempDir dir;
  RandomSource rng(2);
  const Matrix x = test::random_matrix(7, 3, rng);
  const Matrix y = test::random_matrix(7, 1, rng);
  io::write_dataset(dir.path / "a.csv", x, &y);
  const io::Dataset d = io::read_dataset(dir.path / "a.csv");
  CHECK(d.x == x);
  REQUIRE(d.y.has_value());
  CHECK(*d.y == y);
  io::write_dataset(dir.path / "b.csv", x);
  CHECK_FALSE(io::read_dataset(dir.path / "b.csv").y.has_value());
}

TEST_CASE("malformed datasets are data errors") {
  TempDir dir;
  const fs::path p = dir.path / "bad.csv";
  spit(p, "f0,f1\n1,2\n3\n");
  CHECK_THROWS_AS(io::read_dataset(p), DataError);
  spit(p, "f0,f1\n1,abc\n");
  CHECK_THROWS_AS(io::read_dataset(p), DataError);
  spit(p, "f0,f1\n1,nan\n");
  CHECK_THROWS_AS(io::read_dataset(p), DataError);
  spit(p, "a,b\n1,2\n");
  CHECK_THROWS_AS(io::read_dataset(p), DataError);
  spit(p, "f0,f1\n");
  CHECK_THROWS_AS(io::read_dataset(p), DataError);
  CHECK_THROWS_AS(io::read_dataset(dir.path / "missing.csv"), DataError);
}

TEST_CASE("truth round trip") {
  TempDir dir;
  RandomSource rng(3);
  GeneratedData g = generate_archetype_data(50, 3, 4, 0.05, 1.0, rng);
  g.truth.curved_dim = 2;
  io::write_truth(dir.path / "t.json", g.truth, 42);
  const SyntheticTruth t = io::read_truth(dir.path / "t.json");
  CHECK(t.z_true == g.truth.z_true);
  CHECK(t.a_true == g.truth.a_true);
  CHECK(t.embedding == g.truth.embedding);
  CHECK(t.archetype_rows == g.truth.archetype_rows);
  CHECK(t.curved_dim == g.truth.curved_dim);
  CHECK(t.sigma2 == g.truth.sigma2);
}

TEST_CASE("linear model round trip is bit exact") {
  TempDir dir;
  RandomSource rng(4);
  const Matrix x = test::random_matrix(40, 3, rng);
  LinearFitOptions o;
  o.seed = 5;
  const LinearAAModel m = fit_linear_aa(x, 3, o);
  io::save_linear_model(dir.path / "m.json", m, o);
  const LinearAAModel back = io::load_linear_model(dir.path / "m.json");
  CHECK(back.a == m.a);
  CHECK(back.b == m.b);
  CHECK(back.z == m.z);
  CHECK(back.rss_history == m.rss_history);
  io::save_linear_model(dir.path / "m2.json", back, o);
  CHECK(slurp(dir.path / "m.json") == slurp(dir.path / "m2.json"));
  CHECK(io::file_format(dir.path / "m.json") == io::kLinearModelFormat);
}

TEST_CASE("deep model round trip is bit exact") {
  TempDir dir;
  RandomSource rng(6);
  const Matrix x = test::random_matrix(30, 4, rng);
  const Matrix y = test::random_matrix(30, 1, rng);
  DeepAAConfig c;
  c.use_side_info = true;
  c.learn_decoder_variance = true;
  c.prior = PriorKind::DirichletHierarchical;
  c.epochs = 1;
  c.batch_size = 10;
  c.encoder_widths = {5, 6};
  const DeepAAModel m = train(x, &y, c).model;
  io::save_deep_model(dir.path / "d.json", m);
  const DeepAAModel back = io::load_deep_model(dir.path / "d.json");
  CHECK(back.params.step() == m.params.step());
  for (std::size_t i = 0; i < m.params.params().size(); ++i) {
    CHECK(back.params.params()[i].value == m.params.params()[i].value);
    CHECK(back.params.params()[i].m == m.params.params()[i].m);
    CHECK(back.params.params()[i].v == m.params.params()[i].v);
  }
  CHECK(back.x_mean == m.x_mean);
  CHECK(back.y_scale == m.y_scale);
  CHECK(project(back, x).a == project(m, x).a);
  io::save_deep_model(dir.path / "d2.json", back);
  CHECK(slurp(dir.path / "d.json") == slurp(dir.path / "d2.json"));
}

TEST_CASE("model files refuse a mismatched format") {
  TempDir dir;
  RandomSource rng(7);
  const Matrix x = test::random_matrix(20, 3, rng);
  LinearFitOptions o;
  io::save_linear_model(dir.path / "m.json", fit_linear_aa(x, 2, o), o);
  std::string text = slurp(dir.path / "m.json");
  const auto pos = text.find(io::kLinearModelFormat);
  REQUIRE(pos != std::string::npos);
  text.replace(pos, std::string(io::kLinearModelFormat).size(), "daa-linear-model/2");
  spit(dir.path / "v2.json", text);
  CHECK_THROWS_AS(io::load_linear_model(dir.path / "v2.json"), DataError);
  // A linear file is not a deep model.
  CHECK_THROWS_AS(io::load_deep_model(dir.path / "m.json"), DataError);
  spit(dir.path / "junk.json", "{not json");
  CHECK_THROWS_AS(io::load_linear_model(dir.path / "junk.json"), DataError);
}

TEST_CASE("history files") {
  TempDir dir;
  TrainReport r;
  r.epochs.resize(2);
  r.epochs[0].mean = {1.5, 0.0, 0.25, 0.125, 1.875};
  r.epochs[0].seconds = 3.0;
  r.epochs[1].mean = {1.0, 0.0, 0.25, 0.0, 1.25};
  io::write_deep_history(dir.path / "h.csv", r);
  const std::string h = slurp(dir.path / "h.csv");
  CHECK(h.rfind("epoch,reconstruction,side_info,kl,archetype,total\n", 0) == 0);
  CHECK(h.find("\n1,1.5,0,0.25,0.125,1.875\n") != std::string::npos);
  io::write_linear_history(dir.path / "l.csv", {3.0, 2.5});
  CHECK(slurp(dir.path / "l.csv") == "iteration,rss\n1,3\n2,2.5\n");
}

TEST_CASE("config files") {
  io::RunConfig cfg;
  io::apply_config_text(R"({"k": 4, "seed": 9, "epochs": 3, "prior": "dirichlet-hierarchical",
                            "encoder_widths": [16, 8], "lambda": 2.5, "init": "random-rows"})",
                        cfg);
  CHECK(cfg.deep.k == 4);
  CHECK(cfg.linear.seed == 9);
  CHECK(cfg.deep.seed == 9);
  CHECK(cfg.deep.epochs == 3);
  CHECK(cfg.deep.prior == PriorKind::DirichletHierarchical);
  CHECK(cfg.deep.encoder_widths == std::vector<std::size_t>{16, 8});
  CHECK(cfg.deep.lambda == 2.5);
  CHECK(cfg.linear.init == LinearInit::RandomRows);
  CHECK_THROWS_AS(io::apply_config_text(R"({"kk": 3})", cfg), InvalidArgument);
  CHECK_THROWS_AS(io::apply_config_text(R"({"k": "three"})", cfg), InvalidArgument);
  CHECK_THROWS_AS(io::apply_config_text(R"({"k": -3})", cfg), InvalidArgument);
  CHECK_THROWS_AS(io::apply_config_text("[1, 2]", cfg), InvalidArgument);
  CHECK_THROWS_AS(io::apply_config_text("{", cfg), DataError);
}
