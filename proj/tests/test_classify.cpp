#include <cmath>
#include <random>

#include "doctest.h"
#include "tdaeeg/classify.hpp"
#include "tdaeeg/error.hpp"

using namespace tdaeeg;
using namespace tdaeeg::classify;

namespace {

LabeledDataset clusters(std::size_t per_class, double spread, std::uint64_t seed, std::size_t dim = 2) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, spread);
  LabeledDataset d;
  d.cols = dim;
  for (std::size_t i = 0; i < 2 * per_class; ++i) {
    const int y = i % 2 ? 1 : 0;
    for (std::size_t c = 0; c < dim; ++c) d.features.push_back((y ? 5.0 : -5.0) + g(rng));
    d.labels.push_back(y);
  }
  d.rows = d.labels.size();
  return d;
}

double train_accuracy(const LabeledDataset& d, const SvmModel& m) {
  auto p = predict(m, d.features, d.rows, d.cols);
  int ok = 0;
  for (std::size_t i = 0; i < d.rows; ++i) ok += p[i] == d.labels[i];
  return static_cast<double>(ok) / static_cast<double>(d.rows);
}

LabeledDataset xor_data() {
  LabeledDataset d;
  d.cols = 2;
  d.features = {1, 1, -1, -1, 1, -1, -1, 1};
  d.labels = {1, 1, 0, 0};
  d.rows = 4;
  return d;
}

}  // namespace

TEST_SUITE("classify") {
  TEST_CASE("metrics arithmetic") {
    auto m = metrics(50, 20, 10, 40);
    CHECK(m.acc == doctest::Approx(0.75));
    CHECK(std::abs(m.se - 0.7143) < 1e-4);
    CHECK(m.sp == doctest::Approx(0.8));
    auto p = metrics(7, 0, 0, 9);
    CHECK(p.acc == 1.0);
    CHECK(p.se == 1.0);
    CHECK(p.sp == 1.0);
    CHECK_THROWS_WITH_AS(metrics(0, 5, 0, 0), doctest::Contains("undefined"), DomainError);
  }

  TEST_CASE("accuracy lies between sensitivity and specificity") {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> u(1, 100);
    for (int i = 0; i < 200; ++i) {
      auto m = metrics(u(rng), u(rng), u(rng), u(rng));
      CHECK(m.acc >= std::min(m.se, m.sp) - 1e-12);
      CHECK(m.acc <= std::max(m.se, m.sp) + 1e-12);
    }
  }

  TEST_CASE("separable clusters are learned exactly") {
    auto d = clusters(30, 0.5, 2);
    SvmParams lin;
    lin.kernel = Kernel::linear;
    auto m = train_svm(d, lin);
    CHECK(train_accuracy(d, m) == 1.0);
    CHECK(m.dimension() == 2);
    CHECK(m.support_count() > 0);
  }

  TEST_CASE("xor needs a nonlinear kernel") {
    auto d = xor_data();
    SvmParams lin;
    lin.kernel = Kernel::linear;
    CHECK(train_accuracy(d, train_svm(d, lin)) <= 0.75);
    SvmParams rbf;
    rbf.gamma = 1;
    rbf.C = 10;
    CHECK(train_accuracy(d, train_svm(d, rbf)) == 1.0);
  }

  TEST_CASE("duplicated data gives the same training predictions") {
    auto d = clusters(20, 2.0, 3);
    LabeledDataset dd = d;
    dd.features.insert(dd.features.end(), d.features.begin(), d.features.end());
    dd.labels.insert(dd.labels.end(), d.labels.begin(), d.labels.end());
    dd.rows *= 2;
    auto a = predict(train_svm(d, {}), d.features, d.rows, d.cols);
    auto b = predict(train_svm(dd, {}), d.features, d.rows, d.cols);
    CHECK(a == b);
  }

  TEST_CASE("prediction is invariant to positive column scaling") {
    auto d = clusters(25, 3.0, 4, 3);
    LabeledDataset s = d;
    const double scale[3] = {1e-3, 7.0, 250.0};
    for (std::size_t i = 0; i < s.features.size(); ++i) s.features[i] *= scale[i % 3];
    auto a = predict(train_svm(d, {}), d.features, d.rows, d.cols);
    auto b = predict(train_svm(s, {}), s.features, s.rows, s.cols);
    CHECK(a == b);
  }

  TEST_CASE("predict edge cases") {
    auto d = clusters(10, 0.5, 5);
    auto m = train_svm(d, {});
    CHECK(predict(m, {}, 0, 2).empty());
    std::vector<double> three{1, 2, 3};
    CHECK_THROWS_AS(predict(m, three, 1, 3), InvalidArgument);
  }

  TEST_CASE("training input errors") {
    auto d = clusters(10, 0.5, 6);
    LabeledDataset one = d;
    for (auto& y : one.labels) y = 1;
    CHECK_THROWS_AS(train_svm(one, {}), InvalidArgument);
    LabeledDataset bad = d;
    bad.features[3] = std::nan("");
    CHECK_THROWS_AS(train_svm(bad, {}), InvalidArgument);
    SvmParams p;
    p.C = 0;
    CHECK_THROWS_AS(train_svm(d, p), InvalidArgument);
  }

  TEST_CASE("stratified folds balance the classes") {
    std::vector<int> labels;
    for (int i = 0; i < 40; ++i) labels.push_back(i < 25 ? 1 : 0);
    auto f = stratified_folds(labels, 5, 9);
    for (int k = 0; k < 5; ++k) {
      int pos = 0, neg = 0;
      for (std::size_t i = 0; i < labels.size(); ++i)
        if (f[i] == k) (labels[i] ? pos : neg)++;
      CHECK(pos == 5);
      CHECK(neg == 3);
    }
    CHECK(f == stratified_folds(labels, 5, 9));
    CHECK_THROWS_WITH(stratified_folds(labels, 20, 1), doctest::Contains("too small"));
  }

  TEST_CASE("cross-validation on separable data is perfect") {
    auto d = clusters(30, 0.5, 7);
    CvOptions o;
    auto r = kfold_cv(d, o);
    REQUIRE(r.counts);
    CHECK(r.counts->total() == 60);
    CHECK(r.pooled.acc == 1.0);
    CHECK(r.pooled.se == 1.0);
    CHECK(r.pooled.sp == 1.0);
    CHECK(r.folds.size() == 10);
  }

  TEST_CASE("cross-validation is reproducible and reports consistent counts") {
    auto d = clusters(40, 6.0, 8);
    CvOptions o;
    o.seed = 3;
    auto a = kfold_cv(d, o), b = kfold_cv(d, o);
    CHECK(to_json(a).dump() == to_json(b).dump());
    Confusion sum;
    for (const auto& f : a.folds) sum += f.counts;
    CHECK(sum == *a.counts);
    auto m = metrics(sum);
    CHECK(a.pooled.acc == m.acc);
  }

  TEST_CASE("shuffled labels stay near chance") {
    std::mt19937_64 rng(10);
    std::normal_distribution<double> g;
    LabeledDataset d;
    d.cols = 5;
    for (int i = 0; i < 200; ++i) {
      for (int c = 0; c < 5; ++c) d.features.push_back(g(rng));
      d.labels.push_back(i % 2);
    }
    d.rows = 200;
    double mean = 0;
    for (std::uint64_t s = 0; s < 5; ++s) {
      CvOptions o;
      o.seed = s;
      mean += kfold_cv(d, o).pooled.acc / 5;
    }
    CHECK(mean >= 0.35);
    CHECK(mean <= 0.65);
  }

  TEST_CASE("grid search runs and records the chosen parameters") {
    auto d = clusters(15, 2.0, 11);
    CvOptions o;
    o.folds = 3;
    o.grid_search = true;
    auto r = kfold_cv(d, o);
    for (const auto& f : r.folds) {
      CHECK(f.C > 0);
      CHECK(f.gamma > 0);
    }
  }

  TEST_CASE("published rows parse and round-trip through JSON") {
    auto r = parse_metrics_row("PI 85.60 88.33 83.61");
    CHECK(r.label == "PI");
    CHECK(r.pooled.acc == doctest::Approx(0.8560));
    CHECK(r.pooled.sp == doctest::Approx(0.8833));
    CHECK(r.pooled.se == doctest::Approx(0.8361));
    CHECK_FALSE(r.counts);
    auto back = report_from_json(to_json(r));
    CHECK(back.label == "PI");
    CHECK(back.pooled.acc == r.pooled.acc);
    CHECK(back.pooled.se == r.pooled.se);
    CHECK(back.pooled.sp == r.pooled.sp);
    CHECK_FALSE(back.counts);
    auto other = parse_metrics_row("X 50 60 70", "acc,se,sp");
    CHECK(other.pooled.se == doctest::Approx(0.6));
    CHECK_THROWS(parse_metrics_row("PI 85.60 88.33"));
    CHECK_THROWS(parse_metrics_row("PI 85.60 abc 1"));
  }

  TEST_CASE("report with counts round-trips") {
    auto d = clusters(20, 4.0, 12);
    CvOptions o;
    o.folds = 4;
    auto r = kfold_cv(d, o);
    auto back = report_from_json(to_json(r));
    REQUIRE(back.counts);
    CHECK(*back.counts == *r.counts);
    CHECK(back.folds.size() == 4);
    CHECK(to_json(back).dump() == to_json(r).dump());
  }

  TEST_CASE("kernel names") {
    CHECK(parse_kernel("linear") == Kernel::linear);
    CHECK(to_string(Kernel::rbf) == "rbf");
    CHECK_THROWS_AS(parse_kernel("poly"), InvalidArgument);
  }
}
