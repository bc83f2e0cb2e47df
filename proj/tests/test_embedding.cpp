#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "tdaeeg/embedding.hpp"
#include "tdaeeg/error.hpp"

using namespace tdaeeg;

namespace {

std::vector<double> sine(std::size_t n, double period, double phase = 0.3) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::sin(2 * std::numbers::pi * static_cast<double>(i) / period + phase);
  return x;
}

std::vector<double> uniform_noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> x(n);
  for (auto& v : x) v = u(rng);
  return x;
}

}  // namespace

TEST_SUITE("embedding") {
  TEST_CASE("AMI matches the histogram oracle") {
    auto x = uniform_noise(3000, 3);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] += std::sin(0.1 * static_cast<double>(i));
    auto mi = embed::average_mutual_information(x, 20, 16);
    REQUIRE(mi.size() == 20);
    for (int lag = 1; lag <= 20; ++lag)
      CHECK(mi[static_cast<std::size_t>(lag - 1)] == doctest::Approx(oracle::mutual_information(x, lag, 16)).epsilon(1e-9));
  }

  TEST_CASE("AMI of white noise is small") {
    auto mi = embed::average_mutual_information(uniform_noise(10000, 1), 5, 16);
    for (double v : mi) {
      CHECK(v >= 0.0);
      CHECK(v < 0.1);
    }
  }

  TEST_CASE("sine AMI first minimum agrees with a brute-force scan") {
    // An equal-width histogram flattens the MI of a pure sine well before the
    // quarter period; the scan below is the reference.
    for (double period : {40.0, 40.37}) {
      auto x = sine(2000, period);
      auto mi = embed::average_mutual_information(x, 30, 16);
      int want = 30;
      for (int lag = 1; lag <= 30; ++lag) {
        const double here = oracle::mutual_information(x, lag, 16);
        const bool left = lag == 1 || here < oracle::mutual_information(x, lag - 1, 16);
        const bool right = lag == 30 || here <= oracle::mutual_information(x, lag + 1, 16);
        if (left && right) {
          want = lag;
          break;
        }
      }
      CHECK(embed::first_minimum_lag(mi) == want);
      CHECK(want < 10);
    }
  }

  TEST_CASE("AMI is symmetric under series reversal") {
    auto x = uniform_noise(500, 2);
    auto r = std::vector<double>(x.rbegin(), x.rend());
    auto a = embed::average_mutual_information(x, 10);
    auto b = embed::average_mutual_information(r, 10);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-9);
  }

  TEST_CASE("AMI errors") {
    CHECK_THROWS_WITH_AS(embed::average_mutual_information(std::vector<double>(100, 1.0), 5),
                         doctest::Contains("degenerate series"), DomainError);
    CHECK_THROWS_AS(embed::average_mutual_information(uniform_noise(100, 1), 5, 1), InvalidArgument);
    CHECK_THROWS_AS(embed::average_mutual_information(uniform_noise(6, 1), 5), InvalidArgument);
  }

  TEST_CASE("first_minimum_lag rules") {
    CHECK(embed::first_minimum_lag(std::vector<double>{3, 2, 1, 2, 3}) == 3);
    CHECK(embed::first_minimum_lag(std::vector<double>{5, 4, 3, 2, 1}) == 5);
    CHECK(embed::first_minimum_lag(std::vector<double>{1, 1, 1}) == 1);
    CHECK_THROWS(embed::first_minimum_lag(std::vector<double>{1}));
  }

  TEST_CASE("FNN: sine unfolds at m = 2, noise does not") {
    auto fs = embed::false_nearest_neighbors(sine(1000, 40.37), 10, 4);
    REQUIRE(fs.size() == 4);
    CHECK(fs[1] < 0.05);
    for (double v : fs) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    auto fn = embed::false_nearest_neighbors(uniform_noise(1000, 5), 1, 6);
    for (std::size_t m = 0; m + 1 < fn.size(); ++m) CHECK(fn[m] > 0.1);
    CHECK(embed::choose_dimension(fs, 0.1) == 2);
    CHECK(embed::choose_dimension(std::vector<double>{0.9, 0.5, 0.3}, 0.1) == 3);
  }

  TEST_CASE("multichannel estimate takes the maximum over channels") {
    auto a = sine(800, 40.37);
    auto b = sine(800, 23.9, 1.1);
    std::vector<std::vector<std::span<const double>>> segs{{a, b}};
    auto est = embed::estimate_params(segs, {});
    REQUIRE(est.channels.size() == 2);
    CHECK(est.params.tau == std::max(est.channels[0].tau, est.channels[1].tau));
    CHECK(est.params.m == std::max(est.channels[0].m, est.channels[1].m));
    for (const auto& ch : est.channels) {
      CHECK(ch.ami.size() == 30);
      CHECK(ch.fnn.size() == 6);
      CHECK(ch.tau == embed::first_minimum_lag(ch.ami));
      CHECK(ch.m == embed::choose_dimension(ch.fnn, 0.1));
    }
  }

  TEST_CASE("delay_embed shape and backward convention") {
    std::vector<double> x(522);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i);
    auto c = embed::delay_embed(x, {2, 10});
    CHECK(c.size() == 512);
    CHECK(c.dim == 2);
    CHECK(c.time_index.front() == 10);
    CHECK(c.point(0)[0] == 10.0);
    CHECK(c.point(0)[1] == 0.0);
    for (int m = 1; m <= 4; ++m)
      for (int tau = 1; tau <= 7; ++tau)
        CHECK(static_cast<std::ptrdiff_t>(embed::delay_embed(x, {m, tau}).size()) ==
              static_cast<std::ptrdiff_t>(x.size()) - (m - 1) * tau);
    auto one = embed::delay_embed(x, {1, 3});
    CHECK(one.coords == x);
    CHECK_THROWS_AS(embed::delay_embed(std::vector<double>(10), {2, 10}), InvalidArgument);
    CHECK_THROWS_AS(embed::delay_embed(x, {0, 1}), InvalidArgument);
  }

  TEST_CASE("embedding commutes with affine maps") {
    auto x = uniform_noise(200, 9);
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = 3.0 * x[i] - 2.0;
    auto cx = embed::delay_embed(x, {3, 4}), cy = embed::delay_embed(y, {3, 4});
    for (std::size_t i = 0; i < cx.coords.size(); ++i) CHECK(cy.coords[i] == doctest::Approx(3.0 * cx.coords[i] - 2.0));
    auto cc = embed::delay_embed(std::vector<double>(50, 1.5), {2, 3});
    for (double v : cc.coords) CHECK(v == 1.5);
  }
}
