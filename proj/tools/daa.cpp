// daa: command-line front end for linear and deep archetypal analysis.
//
// Exit codes: 0 success, 2 usage error, 3 data or parse error, 4 numerical failure.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "daa/deep_aa.hpp"
#include "daa/error.hpp"
#include "daa/evaluation.hpp"
#include "daa/io.hpp"
#include "daa/kernels.hpp"
#include "daa/linear_aa.hpp"
#include "daa/numerics.hpp"
#include "daa/synthdata.hpp"

namespace fs = std::filesystem;
using namespace daa;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  std::string data;
  std::string model;
};

void add_common(CLI::App* cmd, Common& c, bool data, bool model) {
  cmd->add_option("--config", c.config, "Flat JSON config file (keys mirror the fit options)");
  cmd->add_option("--seed", c.seed, "Random seed (overrides the config file)");
  cmd->add_option("--out", c.out, "Output directory")->capture_default_str();
  if (data) cmd->add_option("--data", c.data, "Data set CSV (f0..f{p-1}[,y])")->required();
  if (model) cmd->add_option("--model", c.model, "Model JSON")->required();
}

io::RunConfig load_config(const Common& c) {
  io::RunConfig cfg;
  if (!c.config.empty()) io::apply_config_file(c.config, cfg);
  if (c.seed) cfg.linear.seed = cfg.deep.seed = *c.seed;
  return cfg;
}

fs::path out_dir(const Common& c) {
  fs::path dir(c.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

std::vector<double> parse_weights(const std::string& text) {
  std::vector<double> w;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      w.push_back(std::stod(cell, &used));
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw InvalidArgument("'" + cell + "' is not a number in weight list '" + text + "'");
    }
  }
  return w;
}

std::vector<std::string> feature_header(std::size_t p, const std::string& prefix = "f") {
  std::vector<std::string> h;
  for (std::size_t c = 0; c < p; ++c) h.push_back(prefix + std::to_string(c));
  return h;
}

Matrix hstack(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) throw ShapeError("hstack: " + a.shape_string() + " vs " + b.shape_string());
  Matrix out(a.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t c = 0; c < a.cols(); ++c) out(i, c) = a(i, c);
    for (std::size_t c = 0; c < b.cols(); ++c) out(i, a.cols() + c) = b(i, c);
  }
  return out;
}

// Points and vertices projected on the leading principal axes of the points,
// with a leading 0/1 column marking the vertices.
void write_pca_scatter(const fs::path& path, const Matrix& points, const Matrix& vertices, std::size_t max_dims,
                       const std::vector<double>* extra, const std::string& extra_name) {
  const std::size_t d = std::min({max_dims, points.cols(), points.rows()});
  if (d == 0 || points.rows() < 2) return;
  const PcaResult basis = pca(points, d);
  const Matrix vp = pca_project(basis, vertices);
  std::vector<std::string> header{"is_vertex"};
  for (std::size_t c = 0; c < d; ++c) header.push_back("pc" + std::to_string(c + 1));
  if (extra) header.push_back(extra_name);
  Matrix rows(points.rows() + vertices.rows(), header.size());
  for (std::size_t i = 0; i < points.rows(); ++i) {
    for (std::size_t c = 0; c < d; ++c) rows(i, 1 + c) = basis.projected(i, c);
    if (extra) rows(i, 1 + d) = (*extra)[i];
  }
  for (std::size_t j = 0; j < vertices.rows(); ++j) {
    const std::size_t r = points.rows() + j;
    rows(r, 0) = 1.0;
    for (std::size_t c = 0; c < d; ++c) rows(r, 1 + c) = vp(j, c);
    if (extra) rows(r, 1 + d) = 1.0;
  }
  io::write_table(path, header, rows);
}

Matrix vertex_decodes(const DeepAAModel& model) {
  const std::size_t k = model.config.k;
  Matrix out(k, model.input_dim);
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<double> w(k, 0.0);
    w[j] = 1.0;
    const Decoded d = decode_mixture(model, w);
    std::copy(d.x_hat.row(0).begin(), d.x_hat.row(0).end(), out.row(j).begin());
  }
  return out;
}

void write_recovery(const fs::path& path, const RecoveryScore& r) {
  Matrix rows(r.permutation.size(), 3);
  for (std::size_t j = 0; j < r.permutation.size(); ++j) {
    rows(j, 0) = static_cast<double>(j);
    rows(j, 1) = static_cast<double>(r.permutation[j]);
    rows(j, 2) = r.per_archetype_distance[j];
  }
  io::write_table(path, {"truth_archetype", "learned_archetype", "distance"}, rows);
}

// ---- gen ----------------------------------------------------------------

struct GenArgs {
  Common common;
  std::size_t n = 10000, k = 3, p = 8;
  double sigma2 = 0.05, alpha = 1.0, spread = kDefaultArchetypeSpread;
  bool curved = false;
  std::optional<std::size_t> curved_dim;
  bool side_info = false;
  std::string side_weights;
  double side_noise = 0.05;
};

int cmd_gen(const GenArgs& a) {
  const io::RunConfig cfg = load_config(a.common);
  const std::uint64_t seed = cfg.deep.seed;
  RandomSource rng(seed);
  GeneratedData g = generate_archetype_data(a.n, a.k, a.p, a.sigma2, a.alpha, rng, a.spread);
  if (a.curved) {
    g.truth.curved_dim = a.curved_dim ? *a.curved_dim : most_curved_dim(g.truth.z_true);
    g.x = apply_curvature(g.x, *g.truth.curved_dim);
  } else if (a.curved_dim) {
    throw InvalidArgument("--curved-dim needs --curved");
  }
  std::optional<Matrix> y;
  if (a.side_info) {
    std::vector<double> w;
    if (a.side_weights.empty()) {
      for (std::size_t j = 0; j < a.k; ++j) w.push_back(static_cast<double>(j + 1) / static_cast<double>(a.k));
    } else {
      w = parse_weights(a.side_weights);
    }
    RandomSource side_rng(derive_seed(seed, 0x51de));
    y = synth_side_information(g.truth.a_true, w, a.side_noise, side_rng);
  }
  const fs::path dir = out_dir(a.common);
  io::write_dataset(dir / "data.csv", g.x, y ? &*y : nullptr);
  io::write_truth(dir / "truth.json", g.truth, seed);
  std::cout << "wrote " << g.x.rows() << " x " << g.x.cols() << " data set to " << (dir / "data.csv").string() << '\n';
  return 0;
}

// ---- fit-linear -----------------------------------------------------------

struct FitLinearArgs {
  Common common;
  std::optional<std::size_t> k;
};

int cmd_fit_linear(const FitLinearArgs& a) {
  io::RunConfig cfg = load_config(a.common);
  const std::size_t k = a.k ? *a.k : cfg.deep.k;
  const io::Dataset d = io::read_dataset(a.common.data);
  const LinearAAModel m = fit_linear_aa(d.x, k, cfg.linear);
  const fs::path dir = out_dir(a.common);
  io::save_linear_model(dir / "model.json", m, cfg.linear);
  io::write_linear_history(dir / "history.csv", m.rss_history);
  io::write_table(dir / "archetypes.csv", feature_header(d.x.cols()), m.z);
  io::write_table(dir / "weights.csv", feature_header(k, "a"), m.a);
  write_pca_scatter(dir / "scatter.csv", d.x, m.z, 3, nullptr, "");
  const double final_rss = m.rss_history.empty() ? rss(d.x, m.a, m.b) : m.rss_history.back();
  std::cout << "k=" << k << " iterations=" << m.rss_history.size() << " converged=" << (m.converged ? "yes" : "no")
            << " RSS=" << io::format_double(final_rss) << '\n';
  return 0;
}

// ---- fit-deep -------------------------------------------------------------

struct FitDeepArgs {
  Common common;
  std::optional<std::size_t> k, epochs;
  std::optional<std::string> prior;
  bool side_info = false;
};

DeepAAConfig deep_config(const io::RunConfig& cfg, const std::optional<std::size_t>& k,
                         const std::optional<std::size_t>& epochs, const std::optional<std::string>& prior) {
  DeepAAConfig c = cfg.deep;
  if (k) c.k = *k;
  if (epochs) c.epochs = *epochs;
  if (prior) c.prior = prior_from_string(*prior);
  return c;
}

int cmd_fit_deep(const FitDeepArgs& a) {
  const io::RunConfig cfg = load_config(a.common);
  DeepAAConfig c = deep_config(cfg, a.k, a.epochs, a.prior);
  if (a.side_info) c.use_side_info = true;
  const io::Dataset d = io::read_dataset(a.common.data);
  if (c.use_side_info && !d.y) throw DataError(a.common.data + ": side information requested but there is no y column");
  const TrainResult r = train(d.x, d.y ? &*d.y : nullptr, c);
  const fs::path dir = out_dir(a.common);
  io::save_deep_model(dir / "model.json", r.model);
  io::write_deep_history(dir / "history.csv", r.report);

  const Projection p = project(r.model, d.x);
  io::write_table(dir / "weights.csv", feature_header(c.k, "a"), p.a);
  io::write_table(dir / "archetypes.csv", feature_header(d.x.cols()), vertex_decodes(r.model));
  std::vector<double> dominant(p.a.rows());
  for (std::size_t i = 0; i < p.a.rows(); ++i) dominant[i] = *std::max_element(p.a.row(i).begin(), p.a.row(i).end());
  write_pca_scatter(dir / "latent_scatter.csv", p.mu, r.model.z_fixed.coords, 2, &dominant, "dominant_weight");

  if (r.report.epochs.empty()) {
    std::cout << "k=" << c.k << " epochs=0 (initialized model only)\n";
  } else {
    const LossParts& l = r.report.epochs.back().mean;
    std::cout << "k=" << c.k << " epochs=" << r.report.epochs.size() << " loss=" << io::format_double(l.total)
              << " reconstruction=" << io::format_double(l.reconstruction)
              << " side_info=" << io::format_double(l.side_info) << " kl=" << io::format_double(l.kl)
              << " archetype=" << io::format_double(l.archetype) << '\n';
  }
  return 0;
}

// ---- select-k -------------------------------------------------------------

struct SelectArgs {
  Common common;
  std::string ks = "2,3,4,5,6";
  std::string fitter = "linear";
  std::string metric = "features";
  std::optional<std::size_t> epochs;
};

int cmd_select_k(const SelectArgs& a) {
  const io::RunConfig cfg = load_config(a.common);
  std::vector<std::size_t> ks;
  for (double v : parse_weights(a.ks)) {
    if (!(v >= 1.0) || v != std::floor(v)) throw InvalidArgument("--ks must list positive integers");
    ks.push_back(static_cast<std::size_t>(v));
  }
  SweepOptions o;
  o.linear = cfg.linear;
  o.deep = deep_config(cfg, std::nullopt, a.epochs, std::nullopt);
  o.seed = cfg.deep.seed;
  if (a.fitter == "linear") {
    o.fitter = FitterKind::Linear;
  } else if (a.fitter == "deep") {
    o.fitter = FitterKind::Deep;
  } else {
    throw InvalidArgument("--fitter must be linear or deep");
  }
  if (a.metric == "features") {
    o.metric = SweepMetric::FeatureMae;
  } else if (a.metric == "side-info") {
    o.metric = SweepMetric::SideInfoMae;
  } else {
    throw InvalidArgument("--metric must be features or side-info");
  }
  const io::Dataset d = io::read_dataset(a.common.data);
  const SelectionCurve curve = selection_sweep(d.x, d.y ? &*d.y : nullptr, ks, o);
  Matrix rows(curve.ks.size(), 3);
  for (std::size_t i = 0; i < curve.ks.size(); ++i) {
    rows(i, 0) = static_cast<double>(curve.ks[i]);
    rows(i, 1) = curve.scores[i];
    rows(i, 2) = (curve.knee && *curve.knee == curve.ks[i]) ? 1.0 : 0.0;
    std::cout << "k=" << curve.ks[i] << " score=" << io::format_double(curve.scores[i]) << '\n';
  }
  io::write_table(out_dir(a.common) / "selection.csv", {"k", "score", "is_knee"}, rows);
  std::cout << "knee=" << (curve.knee ? std::to_string(*curve.knee) : "none") << '\n';
  return 0;
}

// ---- eval -----------------------------------------------------------------

struct EvalArgs {
  Common common;
  std::string truth;
  std::size_t bins = 10;
};

int cmd_eval(const EvalArgs& a) {
  const io::Dataset d = io::read_dataset(a.common.data);
  const std::optional<SyntheticTruth> truth =
      a.truth.empty() ? std::nullopt : std::optional<SyntheticTruth>(io::read_truth(a.truth));
  const fs::path dir = out_dir(a.common);
  const std::string format = io::file_format(a.common.model);

  Matrix archetypes;
  if (format == io::kLinearModelFormat) {
    const LinearAAModel m = io::load_linear_model(a.common.model);
    if (m.z.cols() != d.x.cols()) throw ShapeError("model has " + std::to_string(m.z.cols()) + " features, data has " + std::to_string(d.x.cols()));
    archetypes = m.z;
    const Matrix w = transform(m, d.x);
    std::cout << "reconstruction_mae=" << io::format_double(mean_absolute_error(matmul(w, m.z), d.x)) << '\n';
  } else if (format == io::kDeepModelFormat) {
    const DeepAAModel m = io::load_deep_model(a.common.model);
    if (a.bins == 0) throw InvalidArgument("--bins must be >= 1");
    archetypes = vertex_decodes(m);
    const std::vector<double> dom = dominant_weights(m, d.x);
    const double lo = 1.0 / static_cast<double>(m.config.k);
    const double width = (1.0 - lo) / static_cast<double>(a.bins);
    Matrix hist(a.bins, 3);
    for (std::size_t b = 0; b < a.bins; ++b) {
      hist(b, 0) = lo + width * static_cast<double>(b);
      hist(b, 1) = lo + width * static_cast<double>(b + 1);
    }
    for (double v : dom) {
      auto b = static_cast<std::size_t>(std::max(0.0, (v - lo) / width));
      hist(std::min(b, a.bins - 1), 2) += 1.0;
    }
    io::write_table(dir / "dominant_weights.csv", {"bin_lo", "bin_hi", "count"}, hist);
    std::cout << "reconstruction_mae=" << io::format_double(mean_absolute_error(reconstruct_deep(m, d.x).x_hat, d.x))
              << '\n';
    if (truth) {
      const Matrix rows = d.x.select_rows(truth->archetype_rows);
      const Projection p = project(m, rows);
      for (std::size_t j = 0; j < rows.rows(); ++j) {
        const auto r = p.a.row(j);
        const auto best = std::max_element(r.begin(), r.end());
        std::cout << "truth_archetype " << j << ": dominant weight " << io::format_double(*best) << " on archetype "
                  << (best - r.begin()) << '\n';
      }
    }
  } else {
    throw DataError(a.common.model + ": unsupported model format '" + format + "'");
  }

  if (truth) {
    const RecoveryScore r = match_archetypes(archetypes, observed_archetypes(*truth));
    write_recovery(dir / "recovery.csv", r);
    std::cout << "recovery_rmse=" << io::format_double(r.rmse) << '\n';
  }
  return 0;
}

// ---- explore / interpolate -------------------------------------------------

std::vector<std::string> decoded_header(const DeepAAModel& m) {
  auto h = feature_header(m.input_dim);
  if (m.config.use_side_info) h.emplace_back("y");
  return h;
}

Matrix decoded_rows(const Decoded& d) { return d.y_hat ? hstack(d.x_hat, *d.y_hat) : d.x_hat; }

struct ExploreArgs {
  Common common;
  std::string weights;
};

int cmd_explore(const ExploreArgs& a) {
  const std::vector<double> w = parse_weights(a.weights);
  const std::string format = io::file_format(a.common.model);
  Matrix rows;
  std::vector<std::string> header;
  if (format == io::kLinearModelFormat) {
    const LinearAAModel m = io::load_linear_model(a.common.model);
    require_simplex_weights(w, m.k());
    rows = matmul(Matrix::row_vector(w), m.z);
    header = feature_header(m.z.cols());
  } else {
    const DeepAAModel m = io::load_deep_model(a.common.model);
    rows = decoded_rows(decode_mixture(m, w));
    header = decoded_header(m);
  }
  io::write_table(out_dir(a.common) / "explore.csv", header, rows);
  for (std::size_t c = 0; c < header.size(); ++c) std::cout << (c ? "," : "") << header[c];
  std::cout << '\n';
  for (std::size_t c = 0; c < rows.cols(); ++c) std::cout << (c ? "," : "") << io::format_double(rows(0, c));
  std::cout << '\n';
  return 0;
}

struct InterpolateArgs {
  Common common;
  std::string from, to;
  std::size_t steps = 10;
};

int cmd_interpolate(const InterpolateArgs& a) {
  const DeepAAModel m = io::load_deep_model(a.common.model);
  const InterpolationPath path = interpolate(m, parse_weights(a.from), parse_weights(a.to), a.steps);
  const fs::path dir = out_dir(a.common);
  io::write_table(dir / "interpolation.csv", decoded_header(m), decoded_rows(path.decoded));
  io::write_table(dir / "interpolation_latent.csv", feature_header(path.latent.cols(), "t"), path.latent);
  std::cout << "wrote " << a.steps << " interpolation steps to " << (dir / "interpolation.csv").string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  kernels::set_threads_from_env();

  CLI::App app{"Linear and deep archetypal analysis"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate a synthetic archetype data set");
  add_common(g, gen.common, false, false);
  g->add_option("--n", gen.n, "Number of rows")->capture_default_str();
  g->add_option("--k", gen.k, "Number of true archetypes")->capture_default_str();
  g->add_option("--p", gen.p, "Ambient dimension")->capture_default_str();
  g->add_option("--sigma2", gen.sigma2, "Observation noise variance")->capture_default_str();
  g->add_option("--alpha", gen.alpha, "Dirichlet concentration")->capture_default_str();
  g->add_option("--spread", gen.spread, "Side length of the latent archetype cube")->capture_default_str();
  g->add_flag("--curved", gen.curved, "Apply an exponential to one coordinate");
  g->add_option("--curved-dim", gen.curved_dim, "Coordinate to curve (default: the one separating archetypes most)");
  g->add_flag("--side-info", gen.side_info, "Add a side-information column y = a.w + noise");
  g->add_option("--side-weights", gen.side_weights, "Comma-separated w (default j/k for j = 1..k)");
  g->add_option("--side-noise", gen.side_noise, "Side-information noise sd")->capture_default_str();

  FitLinearArgs fl;
  auto* l = app.add_subcommand("fit-linear", "Fit linear archetypal analysis");
  add_common(l, fl.common, true, false);
  l->add_option("--k", fl.k, "Number of archetypes (default from config, else 3)");

  FitDeepArgs fd;
  auto* dcmd = app.add_subcommand("fit-deep", "Train deep archetypal analysis");
  add_common(dcmd, fd.common, true, false);
  dcmd->add_option("--k", fd.k, "Number of archetypes");
  dcmd->add_option("--epochs", fd.epochs, "Training epochs");
  dcmd->add_option("--prior", fd.prior, "standard-normal or dirichlet-hierarchical");
  dcmd->add_flag("--side-info", fd.side_info, "Train the side-information decoder on the y column");

  SelectArgs sk;
  auto* s = app.add_subcommand("select-k", "Sweep k and locate the knee of the held-out error curve");
  add_common(s, sk.common, true, false);
  s->add_option("--ks", sk.ks, "Comma-separated, strictly increasing k values")->capture_default_str();
  s->add_option("--fitter", sk.fitter, "linear or deep")->capture_default_str();
  s->add_option("--metric", sk.metric, "features or side-info")->capture_default_str();
  s->add_option("--epochs", sk.epochs, "Training epochs per k (deep fitter)");

  EvalArgs ev;
  auto* e = app.add_subcommand("eval", "Score a model against data and optional ground truth");
  add_common(e, ev.common, true, true);
  e->add_option("--truth", ev.truth, "Truth JSON written by gen");
  e->add_option("--bins", ev.bins, "Dominant-weight histogram bins")->capture_default_str();

  ExploreArgs ex;
  auto* x = app.add_subcommand("explore", "Decode a mixture of archetypes");
  add_common(x, ex.common, false, true);
  x->add_option("--weights", ex.weights, "Comma-separated mixture weights on the simplex")->required();

  InterpolateArgs ip;
  auto* i = app.add_subcommand("interpolate", "Decode a straight latent path between two mixtures");
  add_common(i, ip.common, false, true);
  i->add_option("--from", ip.from, "Start mixture weights")->required();
  i->add_option("--to", ip.to, "End mixture weights")->required();
  i->add_option("--steps", ip.steps, "Number of points on the path (>= 2)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return kExitUsage;
  }

  try {
    if (g->parsed()) return cmd_gen(gen);
    if (l->parsed()) return cmd_fit_linear(fl);
    if (dcmd->parsed()) return cmd_fit_deep(fd);
    if (s->parsed()) return cmd_select_k(sk);
    if (e->parsed()) return cmd_eval(ev);
    if (x->parsed()) return cmd_explore(ex);
    if (i->parsed()) return cmd_interpolate(ip);
  } catch (const DataError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitData;
  } catch (const ShapeError& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitData;
  } catch (const NumericalError& err) {
    std::cerr << "numerical failure: " << err.what() << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& err) {
    std::cerr << "error: " << err.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
