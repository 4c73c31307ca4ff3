#pragma once

// File formats: CSV data sets and tables, JSON model / truth / config files.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "daa/deep_aa.hpp"
#include "daa/linear_aa.hpp"
#include "daa/matrix.hpp"
#include "daa/synthdata.hpp"

namespace daa::io {

inline constexpr const char* kLinearModelFormat = "daa-linear-model/1";
inline constexpr const char* kDeepModelFormat = "daa-deep-model/1";
inline constexpr const char* kTruthFormat = "daa-truth/1";

struct Dataset {
  Matrix x;                 // n x p, columns f0..f{p-1}
  std::optional<Matrix> y;  // n x 1, column y
};

/// Reads a data set CSV. Throws DataError on I/O or parse failures.
Dataset read_dataset(const std::filesystem::path& path);
void write_dataset(const std::filesystem::path& path, const Matrix& x, const Matrix* y = nullptr);

/// Plain CSV table with a header row; values use shortest round-trip formatting.
void write_table(const std::filesystem::path& path, const std::vector<std::string>& header, const Matrix& rows);

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);

void write_truth(const std::filesystem::path& path, const SyntheticTruth& truth, std::uint64_t seed);
SyntheticTruth read_truth(const std::filesystem::path& path);

/// The format-version string stored in a model or truth file.
std::string file_format(const std::filesystem::path& path);

void save_linear_model(const std::filesystem::path& path, const LinearAAModel& model, const LinearFitOptions& opts);
LinearAAModel load_linear_model(const std::filesystem::path& path);

void save_deep_model(const std::filesystem::path& path, const DeepAAModel& model);
DeepAAModel load_deep_model(const std::filesystem::path& path);

/// Per-epoch weighted loss parts (wall-clock times are left out so reruns are byte-identical).
void write_deep_history(const std::filesystem::path& path, const TrainReport& report);
void write_linear_history(const std::filesystem::path& path, const std::vector<double>& rss_history);

/// Options settable from a flat JSON config file. Keys mirror the field
/// names of LinearFitOptions and DeepAAConfig; `k` and `seed` are shared.
struct RunConfig {
  LinearFitOptions linear;
  DeepAAConfig deep;
};

/// Applies every key of the file on top of `cfg`. Unknown keys and ill-typed
/// values throw InvalidArgument; unreadable files throw DataError.
void apply_config_file(const std::filesystem::path& path, RunConfig& cfg);
/// Same for config text already in memory.
void apply_config_text(const std::string& text, RunConfig& cfg);

}  // namespace daa::io
