#include "tdaeeg/classify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "tdaeeg/error.hpp"
#include "tdaeeg/io.hpp"

namespace tdaeeg::classify {

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> idx) const {
  LabeledDataset out;
  out.rows = idx.size();
  out.cols = cols;
  out.features.reserve(idx.size() * cols);
  for (auto i : idx) {
    const auto r = row(i);
    out.features.insert(out.features.end(), r.begin(), r.end());
    out.labels.push_back(labels[i]);
  }
  return out;
}

void LabeledDataset::validate() const {
  if (features.size() != rows * cols) throw InvalidArgument("feature matrix shape mismatch");
  if (labels.size() != rows) throw InvalidArgument("label count differs from row count");
  for (double v : features)
    if (!std::isfinite(v)) throw InvalidArgument("non-finite feature value");
  for (int l : labels)
    if (l != 0 && l != 1) throw InvalidArgument("labels must be 0 or 1");
}

void LabeledDataset::require_both_classes() const {
  const auto pos = std::count(labels.begin(), labels.end(), 1);
  if (pos == 0 || pos == static_cast<std::ptrdiff_t>(labels.size()))
    throw InvalidArgument("training data must contain both classes");
}

Kernel parse_kernel(std::string_view name) {
  if (name == "linear") return Kernel::linear;
  if (name == "rbf") return Kernel::rbf;
  throw InvalidArgument("unknown kernel '" + std::string(name) + "'");
}

std::string to_string(Kernel k) { return k == Kernel::linear ? "linear" : "rbf"; }

Standardizer Standardizer::fit(const LabeledDataset& data) {
  Standardizer s;
  s.mean.assign(data.cols, 0.0);
  s.scale.assign(data.cols, 1.0);
  if (data.rows == 0) return s;
  for (std::size_t i = 0; i < data.rows; ++i)
    for (std::size_t c = 0; c < data.cols; ++c) s.mean[c] += data.row(i)[c];
  for (auto& m : s.mean) m /= static_cast<double>(data.rows);
  const double n = static_cast<double>(data.rows);
  for (std::size_t c = 0; c < data.cols; ++c) {
    double var = 0.0, peak = 0.0;
    for (std::size_t i = 0; i < data.rows; ++i) {
      const double d = data.row(i)[c] - s.mean[c];
      var += d * d;
      peak = std::max(peak, std::abs(data.row(i)[c]));
    }
    const double sd = std::sqrt(var / n);
    // Constant up to rounding, however small the column's magnitude.
    const double noise = 4.0 * n * std::numeric_limits<double>::epsilon() * peak;
    s.scale[c] = sd > noise ? sd : 1.0;
  }
  return s;
}

std::vector<double> Standardizer::apply(std::span<const double> row) const {
  std::vector<double> out(row.size());
  for (std::size_t c = 0; c < row.size(); ++c) out[c] = (row[c] - mean[c]) / scale[c];
  return out;
}

namespace {

double kernel_value(Kernel k, double gamma, std::span<const double> a, std::span<const double> b) {
  if (k == Kernel::linear) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::exp(-gamma * s);
}

constexpr double kTau = 1e-12;

}  // namespace

SvmModel train_svm(const LabeledDataset& data, const SvmParams& params) {
  data.validate();
  data.require_both_classes();
  if (!(params.C > 0.0)) throw InvalidArgument("C must be positive");
  SvmParams p = params;
  if (p.kernel == Kernel::rbf && !(p.gamma > 0.0))
    p.gamma = 1.0 / static_cast<double>(std::max<std::size_t>(data.cols, 1));

  SvmModel model;
  model.params_ = p;
  model.standardizer_ = Standardizer::fit(data);
  const std::size_t n = data.rows;
  std::vector<std::vector<double>> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = model.standardizer_.apply(data.row(i));
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = data.labels[i] == 1 ? 1.0 : -1.0;

  std::vector<double> K(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) K[i * n + j] = K[j * n + i] = kernel_value(p.kernel, p.gamma, x[i], x[j]);
  auto Q = [&](std::size_t i, std::size_t j) { return y[i] * y[j] * K[i * n + j]; };

  // Dual: min 1/2 a'Qa - e'a, 0 <= a <= C, y'a = 0. Working-set selection
  // uses second-order information.
  const double C = p.C;
  std::vector<double> alpha(n, 0.0), G(n, -1.0);
  auto upper = [&](std::size_t t) { return alpha[t] >= C; };
  auto lower = [&](std::size_t t) { return alpha[t] <= 0.0; };
  const std::size_t max_iter = std::max<std::size_t>(10000000, 100 * n);
  for (std::size_t iter = 0; iter < max_iter; ++iter) {
    double gmax = -std::numeric_limits<double>::infinity();
    double gmax2 = -std::numeric_limits<double>::infinity();
    std::ptrdiff_t i = -1, j = -1;
    for (std::size_t t = 0; t < n; ++t) {
      if (y[t] > 0) {
        if (!upper(t) && -G[t] >= gmax) { gmax = -G[t]; i = static_cast<std::ptrdiff_t>(t); }
      } else {
        if (!lower(t) && G[t] >= gmax) { gmax = G[t]; i = static_cast<std::ptrdiff_t>(t); }
      }
    }
    if (i < 0) break;
    const auto ii = static_cast<std::size_t>(i);
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      double grad_diff = 0.0, quad = 0.0;
      if (y[t] > 0) {
        if (lower(t)) continue;
        grad_diff = gmax + G[t];
        gmax2 = std::max(gmax2, G[t]);
        quad = K[ii * n + ii] + K[t * n + t] - 2.0 * y[ii] * Q(ii, t);
      } else {
        if (upper(t)) continue;
        grad_diff = gmax - G[t];
        gmax2 = std::max(gmax2, -G[t]);
        quad = K[ii * n + ii] + K[t * n + t] + 2.0 * y[ii] * Q(ii, t);
      }
      if (grad_diff > 0) {
        const double obj = -(grad_diff * grad_diff) / (quad > 0 ? quad : kTau);
        if (obj <= best) {
          best = obj;
          j = static_cast<std::ptrdiff_t>(t);
        }
      }
    }
    if (gmax + gmax2 < p.tol || j < 0) break;
    const auto jj = static_cast<std::size_t>(j);

    const double old_i = alpha[ii], old_j = alpha[jj];
    if (y[ii] != y[jj]) {
      double quad = K[ii * n + ii] + K[jj * n + jj] + 2.0 * Q(ii, jj);
      if (quad <= 0) quad = kTau;
      const double delta = (-G[ii] - G[jj]) / quad;
      const double diff = alpha[ii] - alpha[jj];
      alpha[ii] += delta;
      alpha[jj] += delta;
      if (diff > 0) {
        if (alpha[jj] < 0) { alpha[jj] = 0; alpha[ii] = diff; }
      } else {
        if (alpha[ii] < 0) { alpha[ii] = 0; alpha[jj] = -diff; }
      }
      if (diff > 0) {
        if (alpha[ii] > C) { alpha[ii] = C; alpha[jj] = C - diff; }
      } else {
        if (alpha[jj] > C) { alpha[jj] = C; alpha[ii] = C + diff; }
      }
    } else {
      double quad = K[ii * n + ii] + K[jj * n + jj] - 2.0 * Q(ii, jj);
      if (quad <= 0) quad = kTau;
      const double delta = (G[ii] - G[jj]) / quad;
      const double sum = alpha[ii] + alpha[jj];
      alpha[ii] -= delta;
      alpha[jj] += delta;
      if (sum > C) {
        if (alpha[ii] > C) { alpha[ii] = C; alpha[jj] = sum - C; }
      } else {
        if (alpha[jj] < 0) { alpha[jj] = 0; alpha[ii] = sum; }
      }
      if (sum > C) {
        if (alpha[jj] > C) { alpha[jj] = C; alpha[ii] = sum - C; }
      } else {
        if (alpha[ii] < 0) { alpha[ii] = 0; alpha[jj] = sum; }
      }
    }
    const double di = alpha[ii] - old_i, dj = alpha[jj] - old_j;
    for (std::size_t t = 0; t < n; ++t) G[t] += Q(ii, t) * di + Q(jj, t) * dj;
  }

  double ub = std::numeric_limits<double>::infinity(), lb = -ub, sum_free = 0.0;
  std::size_t free_count = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * G[t];
    if (upper(t)) {
      if (y[t] < 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else if (lower(t)) {
      if (y[t] > 0) ub = std::min(ub, yg); else lb = std::max(lb, yg);
    } else {
      ++free_count;
      sum_free += yg;
    }
  }
  model.rho_ = free_count > 0 ? sum_free / static_cast<double>(free_count) : (ub + lb) / 2.0;
  for (std::size_t t = 0; t < n; ++t)
    if (alpha[t] > 0.0) {
      model.support_.push_back(std::move(x[t]));
      model.coef_.push_back(alpha[t] * y[t]);
    }
  return model;
}

double SvmModel::decision(std::span<const double> raw) const {
  if (raw.size() != dimension()) throw InvalidArgument("feature dimension mismatch");
  const auto z = standardizer_.apply(raw);
  double s = -rho_;
  for (std::size_t i = 0; i < support_.size(); ++i)
    s += coef_[i] * kernel_value(params_.kernel, params_.gamma, support_[i], z);
  return s;
}

std::vector<int> predict(const SvmModel& model, std::span<const double> features, std::size_t rows,
                         std::size_t cols) {
  if (rows == 0) return {};
  if (cols != model.dimension()) throw InvalidArgument("feature dimension mismatch");
  if (features.size() != rows * cols) throw InvalidArgument("feature matrix shape mismatch");
  std::vector<int> out(rows);
  for (std::size_t i = 0; i < rows; ++i)
    out[i] = model.decision(features.subspan(i * cols, cols)) >= 0.0 ? 1 : 0;
  return out;
}

Confusion& Confusion::operator+=(const Confusion& o) noexcept {
  tp += o.tp;
  fn += o.fn;
  fp += o.fp;
  tn += o.tn;
  return *this;
}

void Confusion::add(int truth, int predicted) noexcept {
  if (truth == 1) (predicted == 1 ? tp : fn)++;
  else (predicted == 1 ? fp : tn)++;
}

Metrics metrics(std::int64_t tp, std::int64_t fn, std::int64_t fp, std::int64_t tn) {
  if (tp < 0 || fn < 0 || fp < 0 || tn < 0) throw InvalidArgument("confusion counts must be >= 0");
  if (tp + fn == 0) throw DomainError("undefined metric: sensitivity has no positive instances");
  if (fp + tn == 0) throw DomainError("undefined metric: specificity has no negative instances");
  Metrics m;
  m.acc = static_cast<double>(tp + tn) / static_cast<double>(tp + fn + fp + tn);
  m.se = static_cast<double>(tp) / static_cast<double>(tp + fn);
  m.sp = static_cast<double>(tn) / static_cast<double>(fp + tn);
  return m;
}

Metrics metrics(const Confusion& c) { return metrics(c.tp, c.fn, c.fp, c.tn); }

void EvalReport::validate() const {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(pooled.acc) || !in_unit(pooled.se) || !in_unit(pooled.sp))
    throw InvalidArgument("report metrics must lie in [0, 1]");
  if (counts) {
    const auto m = metrics(*counts);
    if (std::abs(m.acc - pooled.acc) > 1e-12 || std::abs(m.se - pooled.se) > 1e-12 ||
        std::abs(m.sp - pooled.sp) > 1e-12)
      throw InvalidArgument("report metrics disagree with its confusion counts");
  }
}

namespace {

nlohmann::json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json j;
  if (!r.label.empty()) j["label"] = r.label;
  if (r.counts) {
    j["tp"] = r.counts->tp;
    j["fn"] = r.counts->fn;
    j["fp"] = r.counts->fp;
    j["tn"] = r.counts->tn;
  } else {
    j["tp"] = j["fn"] = j["fp"] = j["tn"] = nullptr;
  }
  j["acc"] = r.pooled.acc;
  j["se"] = r.pooled.se;
  j["sp"] = r.pooled.sp;
  if (r.fold_mean)
    j["fold_mean"] = {{"acc", r.fold_mean->acc}, {"se", r.fold_mean->se}, {"sp", r.fold_mean->sp}};
  j["per_fold"] = nlohmann::json::array();
  for (const auto& f : r.folds)
    j["per_fold"].push_back({{"tp", f.counts.tp}, {"fn", f.counts.fn}, {"fp", f.counts.fp},
                             {"tn", f.counts.tn}, {"acc", f.acc}, {"se", optional_number(f.se)},
                             {"sp", optional_number(f.sp)}, {"C", f.C}, {"gamma", f.gamma}});
  return j;
}

EvalReport report_from_json(const nlohmann::json& j) {
  try {
    EvalReport r;
    if (j.contains("label")) r.label = j.at("label").get<std::string>();
    if (!j.at("tp").is_null()) {
      Confusion c;
      c.tp = j.at("tp").get<std::int64_t>();
      c.fn = j.at("fn").get<std::int64_t>();
      c.fp = j.at("fp").get<std::int64_t>();
      c.tn = j.at("tn").get<std::int64_t>();
      r.counts = c;
    }
    r.pooled = {j.at("acc").get<double>(), j.at("se").get<double>(), j.at("sp").get<double>()};
    if (j.contains("fold_mean"))
      r.fold_mean = Metrics{j["fold_mean"].at("acc").get<double>(), j["fold_mean"].at("se").get<double>(),
                            j["fold_mean"].at("sp").get<double>()};
    if (j.contains("per_fold"))
      for (const auto& f : j.at("per_fold")) {
        FoldReport fr;
        fr.counts = {f.at("tp").get<std::int64_t>(), f.at("fn").get<std::int64_t>(),
                     f.at("fp").get<std::int64_t>(), f.at("tn").get<std::int64_t>()};
        fr.acc = f.at("acc").get<double>();
        if (!f.at("se").is_null()) fr.se = f.at("se").get<double>();
        if (!f.at("sp").is_null()) fr.sp = f.at("sp").get<double>();
        fr.C = f.value("C", 0.0);
        fr.gamma = f.value("gamma", 0.0);
        r.folds.push_back(fr);
      }
    r.validate();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed report JSON: ") + e.what());
  }
}

EvalReport parse_metrics_row(std::string_view line, std::string_view order) {
  std::istringstream in{std::string(line)};
  EvalReport r;
  in >> r.label;
  const auto names = io::split(order, ',');
  for (const auto& name : names) {
    std::string cell;
    if (!(in >> cell)) throw ParseError("metrics row has too few values: '" + std::string(line) + "'");
    const double v = io::parse_double(cell) / 100.0;
    if (name == "acc") r.pooled.acc = v;
    else if (name == "se") r.pooled.se = v;
    else if (name == "sp") r.pooled.sp = v;
    else throw InvalidArgument("unknown metric column '" + name + "'");
  }
  r.validate();
  return r;
}

std::vector<int> stratified_folds(std::span<const int> labels, int k, std::uint64_t seed) {
  if (k < 2) throw InvalidArgument("k-fold CV needs k >= 2");
  std::mt19937_64 rng(seed);
  std::vector<int> fold(labels.size(), -1);
  for (int cls : {1, 0}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] == cls) idx.push_back(i);
    if (idx.size() < static_cast<std::size_t>(k))
      throw InvalidArgument("class " + std::to_string(cls) + " has " + std::to_string(idx.size()) +
                            " members, too small for " + std::to_string(k) + "-fold stratification");
    for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng() % i]);
    for (std::size_t j = 0; j < idx.size(); ++j) fold[idx[j]] = static_cast<int>(j % static_cast<std::size_t>(k));
  }
  return fold;
}

namespace {

SvmParams grid_search(const LabeledDataset& train, const CvOptions& opts) {
  const double d = static_cast<double>(std::max<std::size_t>(train.cols, 1));
  SvmParams best = opts.svm;
  double best_acc = -1.0;
  std::vector<int> folds;
  try {
    folds = stratified_folds(train.labels, 3, opts.seed ^ 0x9e3779b97f4a7c15ULL);
  } catch (const InvalidArgument&) {
    return best;
  }
  const std::vector<double> gammas = opts.svm.kernel == Kernel::rbf
                                         ? std::vector<double>{0.1 / d, 1.0 / d, 10.0 / d}
                                         : std::vector<double>{0.0};
  for (double C : {0.1, 1.0, 10.0})
    for (double g : gammas) {
      SvmParams p = opts.svm;
      p.C = C;
      p.gamma = g;
      std::int64_t correct = 0;
      for (int f = 0; f < 3; ++f) {
        std::vector<std::size_t> tr, te;
        for (std::size_t i = 0; i < train.rows; ++i) (folds[i] == f ? te : tr).push_back(i);
        const auto model = train_svm(train.subset(tr), p);
        for (auto i : te) correct += (model.decision(train.row(i)) >= 0.0 ? 1 : 0) == train.labels[i];
      }
      const double acc = static_cast<double>(correct) / static_cast<double>(train.rows);
      if (acc > best_acc) {
        best_acc = acc;
        best = p;
      }
    }
  return best;
}

}  // namespace

EvalReport kfold_cv(const LabeledDataset& data, const CvOptions& opts) {
  data.validate();
  data.require_both_classes();
  const auto fold = stratified_folds(data.labels, opts.folds, opts.seed);

  EvalReport report;
  Confusion pooled;
  Metrics mean_sum;
  std::size_t se_n = 0, sp_n = 0;
  for (int f = 0; f < opts.folds; ++f) {
    std::vector<std::size_t> tr, te;
    for (std::size_t i = 0; i < data.rows; ++i) (fold[i] == f ? te : tr).push_back(i);
    const auto train = data.subset(tr);
    SvmParams p = opts.grid_search ? grid_search(train, opts) : opts.svm;
    if (p.kernel == Kernel::rbf && !(p.gamma > 0.0)) p.gamma = 1.0 / static_cast<double>(std::max<std::size_t>(data.cols, 1));
    const auto model = train_svm(train, p);
    FoldReport fr;
    fr.C = p.C;
    fr.gamma = p.kernel == Kernel::rbf ? p.gamma : 0.0;
    for (auto i : te) fr.counts.add(data.labels[i], model.decision(data.row(i)) >= 0.0 ? 1 : 0);
    fr.acc = static_cast<double>(fr.counts.tp + fr.counts.tn) / static_cast<double>(fr.counts.total());
    if (fr.counts.tp + fr.counts.fn > 0) {
      fr.se = static_cast<double>(fr.counts.tp) / static_cast<double>(fr.counts.tp + fr.counts.fn);
      mean_sum.se += *fr.se;
      ++se_n;
    }
    if (fr.counts.fp + fr.counts.tn > 0) {
      fr.sp = static_cast<double>(fr.counts.tn) / static_cast<double>(fr.counts.fp + fr.counts.tn);
      mean_sum.sp += *fr.sp;
      ++sp_n;
    }
    mean_sum.acc += fr.acc;
    pooled += fr.counts;
    report.folds.push_back(fr);
  }
  report.counts = pooled;
  report.pooled = metrics(pooled);
  report.fold_mean = Metrics{mean_sum.acc / static_cast<double>(opts.folds),
                             se_n ? mean_sum.se / static_cast<double>(se_n) : 0.0,
                             sp_n ? mean_sum.sp / static_cast<double>(sp_n) : 0.0};
  return report;
}

}  // namespace tdaeeg::classify
