#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "tdaeeg/diagram_filter.hpp"
#include "tdaeeg/error.hpp"

using namespace tdaeeg;
using diagram::Point2;

namespace {

std::vector<Point2> cluster_with_outlier(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 0.1);
  std::vector<Point2> p;
  for (int i = 0; i < 100; ++i) p.push_back({1 + g(rng), 2 + g(rng)});
  p.push_back({40.0, 60.0});
  return p;
}

}  // namespace

TEST_SUITE("diagram_pipeline") {
  TEST_CASE("merge keeps finite dim-1 bars with multiplicity") {
    PersistenceDiagram a, b, empty;
    a.features = {{1, 0, 1}, {1, 0.5, 2}, {1, 0, 1}, {0, 0, 3}, {1, 2, kInfinity}};
    b.features = {{1, 3, 4}};
    std::vector<PersistenceDiagram> set{a, empty, b};
    auto m = diagram::merge_diagrams(set);
    REQUIRE(m.size() == 4);
    CHECK(std::count(m.begin(), m.end(), Point2{0, 1}) == 2);
  }

  TEST_CASE("single point with identity bandwidth") {
    std::vector<Point2> p{{3, 4}};
    auto f = diagram::mkde_density(p, diagram::BandwidthSpec::identity());
    CHECK(std::abs(f[0] - 1.0 / (2 * std::numbers::pi)) < 1e-12);
  }

  TEST_CASE("two coincident points") {
    std::vector<Point2> p{{1, 1}, {1, 1}};
    diagram::BandwidthSpec h{{2, 0, 0, 2}};
    auto f = diagram::mkde_density(p, h);
    for (double v : f) CHECK(v == doctest::Approx(1.0 / (2 * std::numbers::pi * 2.0)));
  }

  TEST_CASE("density estimate of a known Gaussian") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 3.0);
    std::vector<Point2> p;
    for (int i = 0; i < 1000; ++i) p.push_back({g(rng), g(rng)});
    auto f = diagram::mkde_density(p, diagram::BandwidthSpec::identity());
    // Identity kernel convolved with N(0, 9 I) is N(0, 10 I).
    double err = 0, peak = oracle::gaussian_pdf2(0, 0, 0, 0, 10, 0, 10);
    for (std::size_t i = 0; i < p.size(); ++i)
      err += std::abs(f[i] - oracle::gaussian_pdf2(p[i][0], p[i][1], 0, 0, 10, 0, 10)) / 1000.0;
    CHECK(err < 0.05 * peak);
  }

  TEST_CASE("permutation equivariance and translation invariance") {
    std::mt19937_64 rng(6);
    auto p = cluster_with_outlier(rng);
    auto bw = diagram::BandwidthSpec::from_covariance(p);
    auto f = diagram::mkde_density(p, bw);
    std::vector<std::size_t> perm(p.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Point2> q, t;
    for (auto i : perm) q.push_back(p[i]);
    for (const auto& x : p) t.push_back({x[0] + 7.5, x[1] - 3.25});
    auto fq = diagram::mkde_density(q, bw);
    auto ft = diagram::mkde_density(t, bw);
    for (std::size_t i = 0; i < perm.size(); ++i) {
      CHECK(fq[i] == doctest::Approx(f[perm[i]]).epsilon(1e-12));
      CHECK(ft[i] == doctest::Approx(f[i]).epsilon(1e-9));
    }
  }

  TEST_CASE("wider bandwidth lowers the peak density") {
    std::mt19937_64 rng(7);
    auto p = cluster_with_outlier(rng);
    p.pop_back();
    double prev = 1e300;
    for (double s : {0.01, 0.02, 0.05, 0.5, 4.0}) {
      auto f = diagram::mkde_density(p, diagram::BandwidthSpec::identity(s));
      const double mx = *std::max_element(f.begin(), f.end());
      CHECK(mx < prev);
      prev = mx;
    }
  }

  TEST_CASE("far outlier is the one point dropped") {
    std::mt19937_64 rng(8);
    auto p = cluster_with_outlier(rng);
    auto f = diagram::mkde_density(p, diagram::BandwidthSpec::from_covariance(p));
    auto kept = diagram::filter_by_density(p, f, 0.99);
    REQUIRE(kept.size() == 100);
    for (const auto& ft : kept.features) CHECK(ft.death < 10);
  }

  TEST_CASE("filter size is ceil(keep_fraction * N) and a subset") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0, 1);
    for (std::size_t n : {1u, 7u, 50u, 101u}) {
      std::vector<Point2> p;
      for (std::size_t i = 0; i < n; ++i) {
        const double b = u(rng);
        p.push_back({b, b + u(rng)});
      }
      auto f = diagram::mkde_density(p, diagram::BandwidthSpec::identity(0.1));
      for (double kf : {0.5, 0.9, 0.99, 1.0}) {
        auto kept = diagram::filter_by_density(p, f, kf);
        CHECK(kept.size() == static_cast<std::size_t>(std::ceil(kf * static_cast<double>(n) - 1e-9)));
        for (const auto& ft : kept.features) {
          CHECK(ft.dim == 1);
          CHECK(std::find(p.begin(), p.end(), Point2{ft.birth, ft.death}) != p.end());
        }
      }
      auto all = diagram::filter_by_density(p, f, 1.0);
      for (std::size_t i = 0; i < n; ++i) CHECK(all.features[i].birth == p[i][0]);
    }
  }

  TEST_CASE("ties at the threshold keep the earlier point") {
    std::vector<Point2> p{{0, 1}, {0, 2}, {0, 3}};
    std::vector<double> f{1.0, 1.0, 1.0};
    auto kept = diagram::filter_by_density(p, f, 0.5);
    REQUIRE(kept.size() == 2);
    CHECK(kept.features[0].death == 1);
    CHECK(kept.features[1].death == 2);
  }

  TEST_CASE("bandwidth validation and parsing") {
    CHECK_THROWS_AS((diagram::BandwidthSpec{{1, 2, 2, 1}}.validate()), DomainError);
    CHECK_THROWS_AS((diagram::BandwidthSpec{{1, 0.5, 0, 1}}.validate()), DomainError);
    std::vector<Point2> p{{0, 0}, {1, 1}};
    CHECK_THROWS_AS(diagram::mkde_density(p, diagram::BandwidthSpec{{0, 0, 0, 0}}), DomainError);
    auto m = diagram::BandwidthSpec::parse("manual:2,0.5,0.5,3", p);
    CHECK(m.h == std::array<double, 4>{2, 0.5, 0.5, 3});
    CHECK(diagram::BandwidthSpec::parse("identity:4", p).h[3] == 4);
    auto cov = diagram::BandwidthSpec::parse("cov10", p);
    CHECK(cov.h[0] == doctest::Approx(10 * (0.5 + 1e-9)));
    CHECK_THROWS_AS(diagram::BandwidthSpec::parse("silverman", p), InvalidArgument);
    CHECK_THROWS_AS(diagram::filter_by_density(p, std::vector<double>{1, 2}, 0.0), InvalidArgument);
  }
}
