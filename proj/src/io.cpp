#include "daa/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "daa/error.hpp"

namespace daa::io {

using nlohmann::json;

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  return out;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw DataError("write to '" + path.string() + "' failed");
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  cells.push_back(cur);
  return cells;
}

double parse_cell(const std::string& cell, std::size_t line_no, const std::filesystem::path& path) {
  std::size_t b = 0, e = cell.size();
  while (b < e && (cell[b] == ' ' || cell[b] == '\t')) ++b;
  while (e > b && (cell[e - 1] == ' ' || cell[e - 1] == '\t')) --e;
  double v = 0.0;
  const auto res = std::from_chars(cell.data() + b, cell.data() + e, v);
  if (b == e || res.ec != std::errc() || res.ptr != cell.data() + e || !std::isfinite(v)) {
    throw DataError(path.string() + ":" + std::to_string(line_no) + ": '" + cell + "' is not a finite number");
  }
  return v;
}

json matrix_to_json(const Matrix& m) {
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"values", m.values()}};
}

Matrix matrix_from_json(const json& j, const char* what) {
  try {
    const auto rows = j.at("rows").get<std::size_t>();
    const auto cols = j.at("cols").get<std::size_t>();
    auto values = j.at("values").get<std::vector<double>>();
    if (values.size() != rows * cols) throw DataError(std::string(what) + ": value count does not match its shape");
    return Matrix(rows, cols, std::move(values));
  } catch (const json::exception& e) {
    throw DataError(std::string(what) + ": " + e.what());
  }
}

json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(origin + ": invalid JSON (" + e.what() + ")");
  }
}

json load_versioned(const std::filesystem::path& path, const char* format) {
  json j = parse_json(read_text(path), path.string());
  if (!j.is_object() || !j.contains("format") || !j["format"].is_string()) {
    throw DataError(path.string() + ": missing format-version string");
  }
  const auto got = j["format"].get<std::string>();
  if (got != format) {
    throw DataError(path.string() + ": format '" + got + "' does not match the expected '" + format + "'");
  }
  return j;
}

void write_json(const std::filesystem::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(1) << '\n';
  finish(out, path);
}

json config_to_json(const DeepAAConfig& c) {
  return json{{"k", c.k},
              {"encoder_widths", c.encoder_widths},
              {"decoder_x_widths", c.decoder_x_widths},
              {"decoder_y_widths", c.decoder_y_widths},
              {"lambda", c.lambda},
              {"nu", c.nu},
              {"at_weight", c.at_weight},
              {"kl_weight", c.kl_weight},
              {"prior", to_string(c.prior)},
              {"mc_samples", c.mc_samples},
              {"epochs", c.epochs},
              {"batch_size", c.batch_size},
              {"learning_rate", c.learning_rate},
              {"seed", c.seed},
              {"use_side_info", c.use_side_info},
              {"learn_decoder_variance", c.learn_decoder_variance},
              {"lambda_growth", c.lambda_growth},
              {"lambda_growth_every", c.lambda_growth_every},
              {"standardize", c.standardize}};
}

template <typename T>
void assign(const json& v, const std::string& key, T& dst) {
  try {
    dst = v.get<T>();
  } catch (const json::exception&) {
    throw InvalidArgument("config key '" + key + "' has the wrong type");
  }
}

void assign_count(const json& v, const std::string& key, std::size_t& dst) {
  if (!v.is_number_unsigned()) throw InvalidArgument("config key '" + key + "' must be a non-negative integer");
  dst = v.get<std::size_t>();
}

void assign_widths(const json& v, const std::string& key, std::vector<std::size_t>& dst) {
  if (!v.is_array()) throw InvalidArgument("config key '" + key + "' must be an array of layer widths");
  std::vector<std::size_t> w;
  for (const auto& e : v) {
    if (!e.is_number_unsigned()) throw InvalidArgument("config key '" + key + "' must hold non-negative integers");
    w.push_back(e.get<std::size_t>());
  }
  dst = std::move(w);
}

void assign_string_enum(const json& v, const std::string& key, std::string& dst) {
  if (!v.is_string()) throw InvalidArgument("config key '" + key + "' must be a string");
  dst = v.get<std::string>();
}

void apply_key(const std::string& key, const json& v, RunConfig& cfg) {
  DeepAAConfig& d = cfg.deep;
  LinearFitOptions& l = cfg.linear;
  if (key == "k") {
    assign_count(v, key, d.k);
  } else if (key == "seed") {
    if (!v.is_number_unsigned()) throw InvalidArgument("config key 'seed' must be a non-negative integer");
    d.seed = l.seed = v.get<std::uint64_t>();
  } else if (key == "max_outer_iters") {
    assign_count(v, key, l.max_outer_iters);
  } else if (key == "fw_inner_iters") {
    assign_count(v, key, l.fw_inner_iters);
  } else if (key == "rel_tol") {
    assign(v, key, l.rel_tol);
  } else if (key == "init") {
    std::string s;
    assign_string_enum(v, key, s);
    l.init = linear_init_from_string(s);
  } else if (key == "encoder_widths") {
    assign_widths(v, key, d.encoder_widths);
  } else if (key == "decoder_x_widths") {
    assign_widths(v, key, d.decoder_x_widths);
  } else if (key == "decoder_y_widths") {
    assign_widths(v, key, d.decoder_y_widths);
  } else if (key == "lambda") {
    assign(v, key, d.lambda);
  } else if (key == "nu") {
    assign(v, key, d.nu);
  } else if (key == "at_weight") {
    assign(v, key, d.at_weight);
  } else if (key == "kl_weight") {
    assign(v, key, d.kl_weight);
  } else if (key == "prior") {
    std::string s;
    assign_string_enum(v, key, s);
    d.prior = prior_from_string(s);
  } else if (key == "mc_samples") {
    assign_count(v, key, d.mc_samples);
  } else if (key == "epochs") {
    assign_count(v, key, d.epochs);
  } else if (key == "batch_size") {
    assign_count(v, key, d.batch_size);
  } else if (key == "learning_rate") {
    assign(v, key, d.learning_rate);
  } else if (key == "use_side_info") {
    assign(v, key, d.use_side_info);
  } else if (key == "learn_decoder_variance") {
    assign(v, key, d.learn_decoder_variance);
  } else if (key == "lambda_growth") {
    assign(v, key, d.lambda_growth);
  } else if (key == "lambda_growth_every") {
    assign_count(v, key, d.lambda_growth_every);
  } else if (key == "standardize") {
    assign(v, key, d.standardize);
  } else {
    throw InvalidArgument("unknown config key '" + key + "'");
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

Dataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open data file '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + ": empty file");
  const auto header = split_csv_line(line);
  std::size_t p = 0;
  bool has_y = false;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] == "f" + std::to_string(c) && !has_y) {
      ++p;
    } else if (header[c] == "y" && c + 1 == header.size() && !has_y) {
      has_y = true;
    } else {
      throw DataError(path.string() + ": unexpected header column '" + header[c] + "' (expected f0..f{p-1} and optional y)");
    }
  }
  if (p == 0) throw DataError(path.string() + ": no feature columns");

  std::vector<double> xs, ys;
  std::size_t n = 0, line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                      " cells, found " + std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < p; ++c) xs.push_back(parse_cell(cells[c], line_no, path));
    if (has_y) ys.push_back(parse_cell(cells[p], line_no, path));
    ++n;
  }
  if (n == 0) throw DataError(path.string() + ": no data rows");
  Dataset d{Matrix(n, p, std::move(xs)), std::nullopt};
  if (has_y) d.y = Matrix(n, 1, std::move(ys));
  return d;
}

void write_table(const std::filesystem::path& path, const std::vector<std::string>& header, const Matrix& rows) {
  if (header.size() != rows.cols()) {
    throw ShapeError("write_table: " + std::to_string(header.size()) + " header names for " + rows.shape_string());
  }
  auto out = open_out(path);
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "," : "") << header[c];
  out << '\n';
  for (std::size_t i = 0; i < rows.rows(); ++i) {
    for (std::size_t c = 0; c < rows.cols(); ++c) out << (c ? "," : "") << format_double(rows(i, c));
    out << '\n';
  }
  finish(out, path);
}

void write_dataset(const std::filesystem::path& path, const Matrix& x, const Matrix* y) {
  if (y != nullptr && (y->rows() != x.rows() || y->cols() != 1)) {
    throw ShapeError("write_dataset: side information must be " + std::to_string(x.rows()) + "x1, got " +
                     y->shape_string());
  }
  std::vector<std::string> header;
  for (std::size_t c = 0; c < x.cols(); ++c) header.push_back("f" + std::to_string(c));
  Matrix all = x;
  if (y != nullptr) {
    header.emplace_back("y");
    all = Matrix(x.rows(), x.cols() + 1);
    for (std::size_t i = 0; i < x.rows(); ++i) {
      for (std::size_t c = 0; c < x.cols(); ++c) all(i, c) = x(i, c);
      all(i, x.cols()) = (*y)(i, 0);
    }
  }
  write_table(path, header, all);
}

void write_truth(const std::filesystem::path& path, const SyntheticTruth& truth, std::uint64_t seed) {
  json j{{"format", kTruthFormat},
         {"seed", seed},
         {"sigma2", truth.sigma2},
         {"z_true", matrix_to_json(truth.z_true)},
         {"z_observed", matrix_to_json(observed_archetypes(truth))},
         {"a_true", matrix_to_json(truth.a_true)},
         {"embedding", matrix_to_json(truth.embedding)},
         {"archetype_rows", truth.archetype_rows}};
  j["curved_dim"] = truth.curved_dim ? json(*truth.curved_dim) : json(nullptr);
  write_json(path, j);
}

std::string file_format(const std::filesystem::path& path) {
  const json j = parse_json(read_text(path), path.string());
  if (!j.is_object() || !j.contains("format") || !j["format"].is_string()) {
    throw DataError(path.string() + ": missing format-version string");
  }
  return j["format"].get<std::string>();
}

SyntheticTruth read_truth(const std::filesystem::path& path) {
  const json j = load_versioned(path, kTruthFormat);
  SyntheticTruth t;
  try {
    t.sigma2 = j.at("sigma2").get<double>();
    t.archetype_rows = j.at("archetype_rows").get<std::vector<std::size_t>>();
    if (!j.at("curved_dim").is_null()) t.curved_dim = j.at("curved_dim").get<std::size_t>();
    t.z_true = matrix_from_json(j.at("z_true"), "z_true");
    t.a_true = matrix_from_json(j.at("a_true"), "a_true");
    t.embedding = matrix_from_json(j.at("embedding"), "embedding");
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  if (t.curved_dim && *t.curved_dim >= t.z_true.cols()) throw DataError(path.string() + ": curved_dim out of range");
  return t;
}

void save_linear_model(const std::filesystem::path& path, const LinearAAModel& model, const LinearFitOptions& opts) {
  json j{{"format", kLinearModelFormat},
         {"k", model.k()},
         {"options",
          {{"max_outer_iters", opts.max_outer_iters},
           {"fw_inner_iters", opts.fw_inner_iters},
           {"rel_tol", opts.rel_tol},
           {"init", to_string(opts.init)},
           {"seed", opts.seed}}},
         {"converged", model.converged},
         {"rss_history", model.rss_history},
         {"z", matrix_to_json(model.z)},
         {"a", matrix_to_json(model.a)},
         {"b", matrix_to_json(model.b)}};
  write_json(path, j);
}

LinearAAModel load_linear_model(const std::filesystem::path& path) {
  const json j = load_versioned(path, kLinearModelFormat);
  LinearAAModel m;
  try {
    m.converged = j.at("converged").get<bool>();
    m.rss_history = j.at("rss_history").get<std::vector<double>>();
    m.z = matrix_from_json(j.at("z"), "z");
    m.a = matrix_from_json(j.at("a"), "a");
    m.b = matrix_from_json(j.at("b"), "b");
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  if (m.z.rows() == 0 || m.a.cols() != m.z.rows() || m.b.rows() != m.z.rows() || m.b.cols() != m.a.rows()) {
    throw DataError(path.string() + ": inconsistent model shapes");
  }
  return m;
}

void save_deep_model(const std::filesystem::path& path, const DeepAAModel& model) {
  json params = json::array();
  for (const auto& p : model.params.params()) {
    params.push_back({{"name", p.name}, {"value", matrix_to_json(p.value)}, {"m", matrix_to_json(p.m)},
                      {"v", matrix_to_json(p.v)}});
  }
  json j{{"format", kDeepModelFormat},
         {"config", config_to_json(model.config)},
         {"z_fixed", matrix_to_json(model.z_fixed.coords)},
         {"input_dim", model.input_dim},
         {"side_dim", model.side_dim},
         {"x_mean", model.x_mean},
         {"x_scale", model.x_scale},
         {"y_mean", model.y_mean},
         {"y_scale", model.y_scale},
         {"adam_step", model.params.step()},
         {"params", params}};
  write_json(path, j);
}

DeepAAModel load_deep_model(const std::filesystem::path& path) {
  const json j = load_versioned(path, kDeepModelFormat);
  DeepAAModel m;
  try {
    RunConfig rc;
    rc.deep = DeepAAConfig{};
    for (const auto& [key, v] : j.at("config").items()) apply_key(key, v, rc);
    m.config = rc.deep;
    m.config.validate();
    m.input_dim = j.at("input_dim").get<std::size_t>();
    m.side_dim = j.at("side_dim").get<std::size_t>();
    m.x_mean = j.at("x_mean").get<std::vector<double>>();
    m.x_scale = j.at("x_scale").get<std::vector<double>>();
    m.y_mean = j.at("y_mean").get<std::vector<double>>();
    m.y_scale = j.at("y_scale").get<std::vector<double>>();
    for (const auto& p : j.at("params")) {
      const auto name = p.at("name").get<std::string>();
      m.params.add(name, matrix_from_json(p.at("value"), name.c_str()));
      auto& stored = m.params.params().back();
      stored.m = matrix_from_json(p.at("m"), name.c_str());
      stored.v = matrix_from_json(p.at("v"), name.c_str());
    }
    m.params.set_step(j.at("adam_step").get<std::uint64_t>());
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  m.z_fixed = simplex_vertices(m.config.k);
  if (!j.contains("z_fixed") || matrix_from_json(j.at("z_fixed"), "z_fixed") != m.z_fixed.coords) {
    throw DataError(path.string() + ": stored simplex does not match k=" + std::to_string(m.config.k));
  }
  if (m.x_mean.size() != m.input_dim || m.x_scale.size() != m.input_dim || m.y_mean.size() != m.side_dim ||
      m.y_scale.size() != m.side_dim) {
    throw DataError(path.string() + ": standardization statistics do not match the model dimensions");
  }
  // Every parameter the architecture needs must be present with the right shape.
  const Matrix probe_y(2, m.side_dim);
  const DeepAAModel fresh = init_deep_model(m.config, Matrix(2, m.input_dim), &probe_y);
  const auto& want = fresh.params.params();
  const auto& got = m.params.params();
  bool ok = want.size() == got.size();
  for (std::size_t i = 0; ok && i < want.size(); ++i) {
    ok = want[i].name == got[i].name && want[i].value.rows() == got[i].value.rows() &&
         want[i].value.cols() == got[i].value.cols() && got[i].m.rows() == got[i].value.rows() &&
         got[i].m.cols() == got[i].value.cols() && got[i].v.rows() == got[i].value.rows() &&
         got[i].v.cols() == got[i].value.cols();
  }
  if (!ok) throw DataError(path.string() + ": parameters do not match the configured architecture");
  return m;
}

void write_deep_history(const std::filesystem::path& path, const TrainReport& report) {
  Matrix rows(report.epochs.size(), 6);
  for (std::size_t e = 0; e < report.epochs.size(); ++e) {
    const LossParts& l = report.epochs[e].mean;
    rows(e, 0) = static_cast<double>(e + 1);
    rows(e, 1) = l.reconstruction;
    rows(e, 2) = l.side_info;
    rows(e, 3) = l.kl;
    rows(e, 4) = l.archetype;
    rows(e, 5) = l.total;
  }
  write_table(path, {"epoch", "reconstruction", "side_info", "kl", "archetype", "total"}, rows);
}

void write_linear_history(const std::filesystem::path& path, const std::vector<double>& rss_history) {
  Matrix rows(rss_history.size(), 2);
  for (std::size_t i = 0; i < rss_history.size(); ++i) {
    rows(i, 0) = static_cast<double>(i + 1);
    rows(i, 1) = rss_history[i];
  }
  write_table(path, {"iteration", "rss"}, rows);
}

void apply_config_text(const std::string& text, RunConfig& cfg) {
  const json j = parse_json(text, "config");
  if (!j.is_object()) throw InvalidArgument("config must be a flat JSON object");
  for (const auto& [key, v] : j.items()) apply_key(key, v, cfg);
}

void apply_config_file(const std::filesystem::path& path, RunConfig& cfg) {
  apply_config_text(read_text(path), cfg);
}

}  // namespace daa::io
