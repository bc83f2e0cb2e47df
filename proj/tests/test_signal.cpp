#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "oracles.hpp"
#include "tdaeeg/error.hpp"
#include "tdaeeg/signal.hpp"

using namespace tdaeeg;
using signal::RawRecording;

namespace {

std::vector<double> sine(double hz, double rate, std::size_t n, double amp = 1.0) {
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = amp * std::sin(2 * std::numbers::pi * hz * static_cast<double>(i) / rate);
  return x;
}

double peak_between(const std::vector<double>& x, std::size_t lo, std::size_t hi) {
  double m = 0;
  for (std::size_t i = lo; i < hi; ++i) m = std::max(m, std::abs(x[i]));
  return m;
}

RawRecording one_channel(std::vector<double> x, double rate = 128.0) {
  RawRecording r;
  r.channels = {"x"};
  r.data = {std::move(x)};
  r.rate = rate;
  return r;
}

}  // namespace

TEST_SUITE("signal_ingest") {
  TEST_CASE("load a two-channel CSV") {
    testutil::TempDir dir("sig");
    std::ofstream(dir / "r.csv") << "A,B\n1,2\n3,4\n5,6\n7,8\n";
    auto r = signal::load_recording(dir / "r.csv", {}, 128.0);
    CHECK(r.channels == std::vector<std::string>{"A", "B"});
    CHECK(r.samples() == 4);
    CHECK(r.data[1][3] == 8.0);
  }

  TEST_CASE("load errors") {
    testutil::TempDir dir("sig");
    std::ofstream(dir / "ragged.csv") << "A,B\n1,2\n3\n";
    std::ofstream(dir / "text.csv") << "A,B\n1,x\n";
    CHECK_THROWS_WITH_AS(signal::load_recording(dir / "ragged.csv", {}, 128.0), doctest::Contains("ragged rows"),
                         ParseError);
    CHECK_THROWS_AS(signal::load_recording(dir / "text.csv", {}, 128.0), ParseError);
    CHECK_THROWS_AS(signal::load_recording(dir / "missing.csv", {}, 128.0), IoError);
    std::vector<std::string> layout{"A", "C"};
    CHECK_THROWS_AS(signal::load_recording(dir / "ragged.csv", layout, 128.0), Error);
  }

  TEST_CASE("10-20 layout is taken from the header") {
    testutil::TempDir dir("sig");
    {
      std::ofstream f(dir / "eeg.csv");
      const auto& names = signal::kTenTwentyLayout;
      for (std::size_t i = 0; i < names.size(); ++i) f << (i ? "," : "") << names[i];
      f << "\n";
      for (int r = 0; r < 3; ++r) {
        for (std::size_t i = 0; i < names.size(); ++i) f << (i ? "," : "") << r * 100 + static_cast<int>(i);
        f << "\n";
      }
    }
    auto r = signal::load_recording(dir / "eeg.csv", signal::kTenTwentyLayout, 128.0);
    CHECK(r.channels == signal::kTenTwentyLayout);
    CHECK(r.data[18][2] == 218.0);
    auto six = signal::select_channels(r, signal::kDefaultChannels);
    CHECK(six.channels == signal::kDefaultChannels);
    CHECK(six.data[1] == r.data[r.channel_index("F8")]);
    CHECK(signal::select_channels(six, signal::kDefaultChannels).data == six.data);
    CHECK(signal::select_channels(r, r.channels).data == r.data);
    std::vector<std::string> bad{"XX"};
    CHECK_THROWS_AS(signal::select_channels(r, bad), InvalidArgument);
  }

  TEST_CASE("passband gain matches the analytic response") {
    signal::ButterworthBandpass bp(0.5, 50.0, 4, 128.0);
    for (double f : {0.3, 1.0, 5.0, 10.0, 30.0, 49.0, 55.0, 60.0})
      CHECK(std::abs(bp.response(f)) == doctest::Approx(oracle::butterworth_bandpass_gain(f, 0.5, 50.0, 4, 128.0)).epsilon(1e-9));
    for (int order : {2, 6, 8}) {
      signal::ButterworthBandpass b(1.0, 20.0, order, 100.0);
      CHECK(static_cast<int>(b.sections().size()) == order / 2);
      for (double f : {0.5, 3.0, 25.0})
        CHECK(std::abs(b.response(f)) == doctest::Approx(oracle::butterworth_bandpass_gain(f, 1.0, 20.0, order, 100.0)).epsilon(1e-9));
    }
  }

  TEST_CASE("10 Hz passes, 60 Hz is attenuated, DC is removed") {
    auto in10 = sine(10, 128, 4096);
    auto out10 = signal::bandpass_filter(one_channel(in10), 0.5, 50, 4).data[0];
    CHECK(out10.size() == in10.size());
    CHECK(peak_between(out10, 1024, 3072) == doctest::Approx(1.0).epsilon(0.02));

    auto out60 = signal::bandpass_filter(one_channel(sine(60, 128, 4096)), 0.5, 50, 4).data[0];
    CHECK(20 * std::log10(peak_between(out60, 1024, 3072)) <= -10.0);

    auto dc = signal::bandpass_filter(one_channel(std::vector<double>(4096, 3.0)), 0.5, 50, 4).data[0];
    CHECK(peak_between(dc, 1024, 3072) < 3e-3);
  }

  TEST_CASE("filtering is linear") {
    std::mt19937_64 rng(1);
    std::normal_distribution<double> g;
    std::vector<double> x(1000), y(1000), z(1000);
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = g(rng);
      y[i] = g(rng);
      z[i] = 2.5 * x[i] - 0.75 * y[i];
    }
    signal::ButterworthBandpass bp(0.5, 50.0, 4, 128.0);
    auto fx = bp.filtfilt(x), fy = bp.filtfilt(y), fz = bp.filtfilt(z);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(fz[i] == doctest::Approx(2.5 * fx[i] - 0.75 * fy[i]).epsilon(1e-9));
  }

  TEST_CASE("design errors") {
    CHECK_THROWS_AS(signal::ButterworthBandpass(0.5, 70.0, 4, 128.0), InvalidArgument);
    CHECK_THROWS_AS(signal::ButterworthBandpass(10.0, 5.0, 4, 128.0), InvalidArgument);
    CHECK_THROWS_AS(signal::ButterworthBandpass(0.5, 50.0, 3, 128.0), InvalidArgument);
    CHECK_THROWS_AS(signal::ButterworthBandpass(0.0, 50.0, 4, 128.0), InvalidArgument);
  }

  TEST_CASE("segmentation") {
    std::vector<double> x(1100);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = static_cast<double>(i);
    auto segs = signal::segment(one_channel(x), 512, "s1");
    REQUIRE(segs.size() == 2);
    CHECK(segs[1].index == 1);
    CHECK(segs[0].source_id == "s1");
    std::vector<double> joined;
    for (const auto& s : segs) joined.insert(joined.end(), s.data[0].begin(), s.data[0].end());
    joined.insert(joined.end(), x.begin() + 1024, x.end());
    CHECK(joined == x);
    CHECK(signal::segment(one_channel(std::vector<double>(511)), 512).empty());
    CHECK_THROWS_AS(signal::segment(one_channel(x), 0), InvalidArgument);
  }

  TEST_CASE("recording round trip") {
    testutil::TempDir dir("sig");
    RawRecording r;
    r.channels = {"Fz", "Cz"};
    r.data = {{0.1, -2.5, 1e-7}, {3.0, 4.0, 5.0}};
    r.rate = 128;
    signal::save_recording(dir / "out.csv", r);
    auto back = signal::load_recording(dir / "out.csv", {}, 128);
    CHECK(back.channels == r.channels);
    CHECK(back.data == r.data);
  }
}
