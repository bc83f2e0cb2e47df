#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "oracles.hpp"
#include "tdaeeg/error.hpp"
#include "tdaeeg/rips.hpp"
#include "tdaeeg/synth.hpp"

using namespace tdaeeg;
using testutil::to_cloud;

namespace {

std::vector<double> finite_deaths(const PersistenceDiagram& d, int dim) {
  std::vector<double> out;
  for (const auto& f : d.features)
    if (f.dim == dim && !f.essential()) out.push_back(f.death);
  std::sort(out.begin(), out.end());
  return out;
}

PointCloud circle(std::size_t n) {
  PointCloud c;
  c.dim = 2;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = 2 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
    c.coords.push_back(std::cos(t));
    c.coords.push_back(std::sin(t));
  }
  return c;
}

}  // namespace

TEST_SUITE("ph_engine") {
  TEST_CASE("filtration is in filtration order and faces precede cofaces") {
    std::mt19937_64 rng(3);
    auto cloud = to_cloud(oracle::random_points(rng, 9, 2));
    auto f = ph::rips_filtration(cloud);
    CHECK(f.size() == 9 + 36 + 84);
    for (std::size_t i = 1; i < f.size(); ++i) CHECK_FALSE(ph::filtration_less(f[i], f[i - 1]));
    for (const auto& s : f)
      if (s.size == 1) CHECK(s.value == 0.0);
  }

  TEST_CASE("max_scale truncates edges") {
    std::mt19937_64 rng(4);
    auto cloud = to_cloud(oracle::random_points(rng, 12, 2));
    auto f = ph::rips_filtration(cloud, 0.3);
    for (const auto& s : f) CHECK(s.value <= 0.3);
  }

  TEST_CASE("single point and empty cloud") {
    PointCloud one(2, {0.5, 0.5});
    auto d = ph::rips_persistence(one);
    REQUIRE(d.size() == 1);
    CHECK(d.features[0].dim == 0);
    CHECK(d.features[0].essential());
    CHECK(ph::rips_persistence(PointCloud{}).empty());
  }

  TEST_CASE("dim-0 deaths equal MST edge weights") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
      auto pts = oracle::random_points(rng, 25, 2);
      auto d = ph::rips_persistence(to_cloud(pts));
      auto got = finite_deaths(d, 0);
      auto want = oracle::prim_mst(pts);
      REQUIRE(got.size() == want.size());
      for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
      std::size_t essential = 0;
      for (const auto& f : d.features) essential += (f.dim == 0 && f.essential());
      CHECK(essential == 1);
    }
  }

  TEST_CASE("betti numbers agree with the dense rank oracle") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 30; ++trial) {
      const std::size_t dim = trial % 2 ? 3 : 2;
      auto cloud = to_cloud(oracle::random_points(rng, 4 + trial % 7, dim));
      auto filt = ph::rips_filtration(cloud);
      auto d = ph::rips_persistence(cloud);
      for (const auto& s : filt) {
        for (int k = 0; k <= 1; ++k) CHECK(ph::betti_at(d, s.value, k) == synth::brute_force_betti(filt, s.value, k));
      }
    }
  }

  TEST_CASE("implicit and explicit reductions give the same diagram") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
      auto cloud = to_cloud(oracle::random_points(rng, 20 + trial, 2 + trial % 2));
      const double scale = trial % 3 == 0 ? 0.35 : 0.0;
      auto a = ph::rips_persistence(cloud, scale);
      auto filt = ph::rips_filtration(cloud, scale);
      auto b = ph::compute_persistence(filt);
      a.sort();
      b.sort();
      REQUIRE(a.size() == b.size());
      for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.features[i] == b.features[i]);
    }
  }

  TEST_CASE("unit square has the loop (1, sqrt 2)") {
    PointCloud sq(2, {0, 0, 1, 0, 1, 1, 0, 1});
    auto d = ph::rips_persistence(sq).restricted_to(1);
    REQUIRE(d.size() == 1);
    CHECK(std::abs(d.features[0].birth - 1.0) < 1e-9);
    CHECK(std::abs(d.features[0].death - std::sqrt(2.0)) < 1e-9);
  }

  TEST_CASE("circle has one dominant loop") {
    auto d = ph::rips_persistence(circle(20)).restricted_to(1);
    std::vector<double> p;
    for (const auto& f : d.features) p.push_back(f.persistence());
    std::sort(p.rbegin(), p.rend());
    REQUIRE(!p.empty());
    const double second = p.size() > 1 ? p[1] : 0.0;
    CHECK(p[0] > 5 * second);
  }

  TEST_CASE("compute_persistence rejects a coface before its face") {
    std::vector<ph::Simplex> f;
    f.push_back(ph::make_simplex(std::vector<std::int32_t>{0}, 0));
    f.push_back(ph::make_simplex(std::vector<std::int32_t>{0, 1}, 1));
    f.push_back(ph::make_simplex(std::vector<std::int32_t>{1}, 0));
    CHECK_THROWS_AS(ph::compute_persistence(f), DomainError);
  }

  TEST_CASE("make_simplex validates vertices") {
    CHECK_THROWS_AS(ph::make_simplex(std::vector<std::int32_t>{1, 0}, 0), InvalidArgument);
    CHECK_THROWS_AS(ph::make_simplex(std::vector<std::int32_t>{}, 0), InvalidArgument);
    CHECK_THROWS_AS(ph::make_simplex(std::vector<std::int32_t>{0, 1, 2, 3}, 0), InvalidArgument);
  }

  TEST_CASE("betti_at counts birth <= eps < death") {
    PersistenceDiagram d;
    d.features = {{1, 1.0, 2.0}, {1, 1.5, kInfinity}, {0, 0.0, kInfinity}};
    CHECK(ph::betti_at(d, 0.5, 1) == 0);
    CHECK(ph::betti_at(d, 1.0, 1) == 1);
    CHECK(ph::betti_at(d, 1.7, 1) == 2);
    CHECK(ph::betti_at(d, 2.0, 1) == 1);
    CHECK(ph::betti_at(d, 9.0, 0) == 1);
    CHECK_THROWS(ph::betti_at(d, -1.0, 0));
  }

  TEST_CASE("rips diagram is invariant under point relabelling") {
    std::mt19937_64 rng(41);
    auto pts = oracle::random_points(rng, 15, 2);
    auto a = ph::rips_persistence(to_cloud(pts));
    std::shuffle(pts.begin(), pts.end(), rng);
    auto b = ph::rips_persistence(to_cloud(pts));
    a.sort();
    b.sort();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a.features[i].birth == doctest::Approx(b.features[i].birth).epsilon(1e-12));
      if (a.features[i].essential())
        CHECK(b.features[i].essential());
      else
        CHECK(a.features[i].death == doctest::Approx(b.features[i].death).epsilon(1e-12));
    }
  }
}
