#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tdaeeg/classify.hpp"
#include "tdaeeg/signal.hpp"
#include "tdaeeg/types.hpp"
#include "tdaeeg/vectorize.hpp"

namespace tdaeeg::pipeline {

// Every tunable of the pipeline. Keys accepted by set() and the config file
// are the field names below.
struct PipelineConfig {
  std::string dataset;  // CSV list: source_id,path,label (paths relative to the list)
  std::string input;    // single recording, used when no dataset is given
  std::string workdir = "work";
  std::string features;  // default <workdir>/vectorize/features.csv
  std::string report;    // default <workdir>/report.json

  double rate = 128.0;
  double band_low = 0.5;
  double band_high = 50.0;
  int order = 4;
  bool bandpass = true;
  std::vector<std::string> layout;  // empty: take channel names from the file header
  std::vector<std::string> channels = signal::kDefaultChannels;
  double window_sec = 4.0;

  bool auto_params = false;
  int m = 2;
  int tau = 10;
  int bins = 16;
  int max_lag = 30;
  int m_max = 6;
  double rtol = 10.0;
  double atol = 2.0;
  double fnn_threshold = 0.1;
  int estimate_segments = 1;  // per subject, when auto_params is on

  int q = 10;
  int k = 350;  // capped at the cloud size
  int keep = 140;
  int iters = 50;
  std::uint64_t seed = 0;

  std::string bandwidth = "cov10";
  double keep_fraction = 0.99;
  std::string emit_density;  // directory for per-subject density dumps; empty: none

  std::string descriptor = "pi";  // pi | landscape | entropy | betti
  int pi_rows = 20;
  int pi_cols = 20;
  double sigma = 0.0;  // <= 0: persistence range / 20 over all subjects
  double a = 0.0;
  double c = 3.0;
  std::optional<double> t1 = 100.0;  // nullopt: quantile of pooled persistence
  std::optional<double> t2 = 200.0;  // nullopt: 2 * t1
  double t1_quantile = 0.9;
  int grid_n = 50;
  int landscape_k = 5;

  std::string kernel = "rbf";
  double C = 1.0;
  double gamma = 0.0;  // <= 0: 1 / D
  int folds = 10;
  bool grid_search = false;
  bool permute_labels = false;

  int threads = 0;  // 0: hardware concurrency

  // Throws InvalidArgument for unknown keys or unparsable values.
  void set(std::string_view key, std::string_view value);
  std::string get(std::string_view key) const;
  static std::vector<std::string> keys();
  // key = value lines; '#' starts a comment.
  void load(const std::filesystem::path& path);
  std::string to_text() const;
  void validate() const;

  std::filesystem::path dir(std::string_view sub) const;
  std::filesystem::path features_path() const;
  std::filesystem::path report_path() const;
  std::size_t window_samples() const;
};

inline const std::vector<std::string> kStages = {"ingest", "embed", "denoise", "persist",
                                                 "filter", "vectorize", "classify"};

// Runs one stage from its predecessor's files. Failures surface as
// StageError tagged with the stage and the offending file.
void run_stage(const PipelineConfig& config, std::string_view stage);
classify::EvalReport run_pipeline(const PipelineConfig& config);

struct SubjectDiagram {
  std::string source_id;
  int label = -1;
  PersistenceDiagram diagram;
};

// Filtered subject-level diagrams written by the filter stage.
std::vector<SubjectDiagram> load_filtered(const PipelineConfig& config);

struct FeatureTable {
  std::vector<std::string> ids;
  std::size_t cols = 0;
  std::vector<double> values;  // row-major
  std::vector<int> labels;
  std::size_t rows() const noexcept { return ids.size(); }
};

struct VectorizeInfo {
  vec::ImageSpec image;
  vec::WeightParams weights;
  std::vector<double> grid;
};

// Vectorizes every subject with grid, extent and sigma shared across subjects.
FeatureTable vectorize_subjects(std::span<const SubjectDiagram> subjects, const PipelineConfig& config,
                                VectorizeInfo* info = nullptr,
                                std::vector<vec::PersistenceImage>* images = nullptr);
classify::EvalReport classify_table(const FeatureTable& table, const PipelineConfig& config);

void write_features(const std::filesystem::path& path, const FeatureTable& table);
FeatureTable read_features(const std::filesystem::path& path);

struct SweepRow {
  double a = 0, c = 0;
  classify::EvalReport report;
};

// Re-vectorizes and re-classifies the filtered diagrams per (a, c) pair.
std::vector<SweepRow> sweep_weights(const PipelineConfig& config, std::span<const double> a_values,
                                    std::span<const double> c_values);
std::string sweep_table(std::span<const SweepRow> rows);

// Calls fn(i) for i in [0, n) on up to `threads` workers. The exception of
// the lowest failing index is rethrown.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace tdaeeg::pipeline
