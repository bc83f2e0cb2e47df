#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tdaeeg/rips.hpp"
#include "tdaeeg/signal.hpp"
#include "tdaeeg/types.hpp"

namespace tdaeeg::synth {

enum class Kind { circle, blob, circle_plus_blob, sine, logistic, noise };

Kind parse_kind(std::string_view name);
std::string to_string(Kind k);
bool is_series(Kind k) noexcept;

struct SynthSpec {
  Kind kind = Kind::circle;
  std::size_t n = 100;       // points, or samples for series kinds
  double noise_level = 0.0;  // Gaussian sd added to every coordinate / sample
  std::uint64_t seed = 0;
  std::size_t dim = 2;       // blob and noise clouds
  double radius = 1.0;
  std::size_t blob_n = 400;  // circle_plus_blob only
  double blob_sigma = 0.1;
  double period = 40.0;      // sine, in samples
  void validate() const;
};

struct LabeledCloud {
  PointCloud cloud;
  std::vector<int> labels;  // 1 marks blob points in circle_plus_blob
};

// circle: n evenly spaced angles on a circle of `radius`, then noise.
// noise: uniform in the unit cube of `dim` dimensions.
LabeledCloud gen_cloud(const SynthSpec& spec);
std::vector<double> gen_series(const SynthSpec& spec);

struct TwoClassSpec {
  std::size_t subjects_per_class = 40;
  std::size_t channels = 6;
  std::size_t segments = 10;
  std::size_t window = 512;
  double rate = 128.0;
  double period = 40.0;   // class A oscillation, samples
  double noise = 0.1;     // additive noise sd on class A
  double ar = 0.9;        // class B AR(1) coefficient
  std::uint64_t seed = 0;
  void validate() const;
};

struct SyntheticSubject {
  std::string source_id;
  int label = 0;  // 1 = periodic class (positive), 0 = filtered noise
  signal::RawRecording recording;
};

// Class A: sines with an independent phase per channel plus white noise.
// Class B: AR(1) noise scaled to the same RMS.
std::vector<SyntheticSubject> gen_two_class_signals(const TwoClassSpec& spec);

// Writes one recording CSV per subject and dataset.csv (source_id,path,label).
std::filesystem::path write_two_class_dataset(const TwoClassSpec& spec,
                                              const std::filesystem::path& dir);

// Betti number of the sub-complex with value <= eps, from ranks of dense
// boundary matrices over Z/2. Limited to 12 vertices.
std::size_t brute_force_betti(std::span<const ph::Simplex> filtration, double eps, int dim);

}  // namespace tdaeeg::synth
