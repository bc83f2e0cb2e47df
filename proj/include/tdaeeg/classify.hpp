#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace tdaeeg::classify {

// Row-major N x D feature matrix with binary labels (1 = patient, 0 = control).
struct LabeledDataset {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> features;
  std::vector<int> labels;

  std::span<const double> row(std::size_t i) const { return {features.data() + i * cols, cols}; }
  LabeledDataset subset(std::span<const std::size_t> idx) const;
  void validate() const;          // shape and finiteness
  void require_both_classes() const;
};

enum class Kernel { linear, rbf };

Kernel parse_kernel(std::string_view name);
std::string to_string(Kernel k);

struct SvmParams {
  Kernel kernel = Kernel::rbf;
  double C = 1.0;
  double gamma = 0.0;  // <= 0 selects 1 / D
  double tol = 1e-3;   // KKT violation tolerance
};

// Per-column z-scoring fitted on training data; columns that are constant up
// to rounding are centred only.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer fit(const LabeledDataset& data);
  std::vector<double> apply(std::span<const double> row) const;
};

class SvmModel {
 public:
  // Signed distance-like score; >= 0 predicts the positive class.
  double decision(std::span<const double> raw_features) const;
  std::size_t dimension() const noexcept { return standardizer_.mean.size(); }
  std::size_t support_count() const noexcept { return coef_.size(); }
  const SvmParams& params() const noexcept { return params_; }

 private:
  friend SvmModel train_svm(const LabeledDataset&, const SvmParams&);
  SvmParams params_;
  Standardizer standardizer_;
  std::vector<std::vector<double>> support_;  // standardized
  std::vector<double> coef_;                  // alpha_i * y_i
  double rho_ = 0.0;
};

SvmModel train_svm(const LabeledDataset& data, const SvmParams& params);

std::vector<int> predict(const SvmModel& model, std::span<const double> features, std::size_t rows,
                         std::size_t cols);

struct Confusion {
  std::int64_t tp = 0, fn = 0, fp = 0, tn = 0;

  std::int64_t total() const noexcept { return tp + fn + fp + tn; }
  Confusion& operator+=(const Confusion& o) noexcept;
  void add(int truth, int predicted) noexcept;
  bool operator==(const Confusion&) const = default;
};

struct Metrics {
  double acc = 0, se = 0, sp = 0;
};

// Throws DomainError when a denominator is zero.
Metrics metrics(const Confusion& c);
Metrics metrics(std::int64_t tp, std::int64_t fn, std::int64_t fp, std::int64_t tn);

struct FoldReport {
  Confusion counts;
  double acc = 0;
  std::optional<double> se, sp;
  double C = 0, gamma = 0;
};

struct EvalReport {
  std::optional<Confusion> counts;  // absent for published figures
  Metrics pooled;                   // from pooled confusion counts
  std::optional<Metrics> fold_mean;
  std::vector<FoldReport> folds;
  std::string label;

  void validate() const;
};

nlohmann::json to_json(const EvalReport& r);
EvalReport report_from_json(const nlohmann::json& j);

// "<label> <v1> <v2> <v3>" in percent, columns named by `order`
// (e.g. "acc,sp,se"). Yields a count-free report.
EvalReport parse_metrics_row(std::string_view line, std::string_view order = "acc,sp,se");

struct CvOptions {
  int folds = 10;
  std::uint64_t seed = 0;
  SvmParams svm;
  bool grid_search = false;  // inner 3-fold search over C and gamma
};

// Stratified k-fold cross-validation with a seeded shuffle per class.
EvalReport kfold_cv(const LabeledDataset& data, const CvOptions& opts);

// Fold id per row, stratified by label.
std::vector<int> stratified_folds(std::span<const int> labels, int k, std::uint64_t seed);

}  // namespace tdaeeg::classify
