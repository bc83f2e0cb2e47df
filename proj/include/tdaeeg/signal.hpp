#pragma once

#include <array>
#include <complex>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace tdaeeg::signal {

// Channel names as laid out on a 10-20 cap, in the order of the public
// ADHD recordings.
inline const std::vector<std::string> kTenTwentyLayout = {
    "Fz", "Cz", "Pz", "C3", "T3", "C4", "T4", "Fp1", "Fp2", "F3",
    "F4", "F7", "F8", "P3", "P4", "T5", "T6", "O1", "O2"};

// Frontal/central subset used by the classification pipeline.
inline const std::vector<std::string> kDefaultChannels = {"Fz", "F8", "F3", "C4", "C3", "F7"};

struct RawRecording {
  std::vector<std::string> channels;
  std::vector<std::vector<double>> data;  // one sample vector per channel
  double rate = 0.0;                      // Hz

  std::size_t samples() const noexcept { return data.empty() ? 0 : data.front().size(); }
  std::size_t channel_index(const std::string& name) const;
  void validate() const;
};

struct Segment {
  std::vector<std::string> channels;
  std::vector<std::vector<double>> data;  // channels x window
  std::string source_id;
  std::size_t index = 0;

  std::size_t window() const noexcept { return data.empty() ? 0 : data.front().size(); }
};

// Reads a CSV whose header names the channels. With a non-empty layout the
// header must name exactly those channels; output follows the layout order.
RawRecording load_recording(const std::filesystem::path& path,
                            std::span<const std::string> layout, double rate);

void save_recording(const std::filesystem::path& path, const RawRecording& rec);

struct Biquad {
  double b0 = 1, b1 = 0, b2 = 0;
  double a1 = 0, a2 = 0;  // a0 == 1
};

// Digital Butterworth band-pass in second-order sections, designed by the
// bilinear transform with pre-warped edges. `order` is the band-pass order,
// so the analog low-pass prototype has order/2 poles.
class ButterworthBandpass {
 public:
  ButterworthBandpass(double low_hz, double high_hz, int order, double rate);

  const std::vector<Biquad>& sections() const noexcept { return sections_; }
  int order() const noexcept { return order_; }

  // Single-pass complex response at f Hz.
  std::complex<double> response(double f_hz) const;

  // Forward-backward application with odd-reflection padding of 3*order
  // samples per side and steady-state initial conditions.
  std::vector<double> filtfilt(std::span<const double> x) const;

  // One causal pass; initial section states are the unit-step steady state
  // scaled by `x0_scale`.
  std::vector<double> filter(std::span<const double> x, double x0_scale) const;

 private:
  std::vector<Biquad> sections_;
  std::vector<std::array<double, 2>> zi_;  // per-section unit-step steady state
  int order_;
  double rate_;
};

RawRecording bandpass_filter(const RawRecording& rec, double low_hz, double high_hz, int order);

RawRecording select_channels(const RawRecording& rec, std::span<const std::string> names);

// Non-overlapping windows; the trailing remainder is dropped.
std::vector<Segment> segment(const RawRecording& rec, std::size_t window_samples,
                             const std::string& source_id = {});

}  // namespace tdaeeg::signal
