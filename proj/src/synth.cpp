#include "tdaeeg/synth.hpp"

#include <algorithm>
#include <bitset>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "tdaeeg/error.hpp"
#include "tdaeeg/io.hpp"

namespace tdaeeg::synth {

Kind parse_kind(std::string_view name) {
  if (name == "circle") return Kind::circle;
  if (name == "blob") return Kind::blob;
  if (name == "circle_plus_blob") return Kind::circle_plus_blob;
  if (name == "sine") return Kind::sine;
  if (name == "logistic" || name == "chaotic") return Kind::logistic;
  if (name == "noise") return Kind::noise;
  throw InvalidArgument("unknown synthetic kind '" + std::string(name) + "'");
}

std::string to_string(Kind k) {
  switch (k) {
    case Kind::circle: return "circle";
    case Kind::blob: return "blob";
    case Kind::circle_plus_blob: return "circle_plus_blob";
    case Kind::sine: return "sine";
    case Kind::logistic: return "logistic";
    case Kind::noise: return "noise";
  }
  return "?";
}

bool is_series(Kind k) noexcept { return k == Kind::sine || k == Kind::logistic; }

void SynthSpec::validate() const {
  if (n < 1) throw InvalidArgument("synthetic n must be >= 1");
  if (!(noise_level >= 0.0)) throw InvalidArgument("noise level must be >= 0");
  if (dim < 1) throw InvalidArgument("synthetic dim must be >= 1");
  if (!(period > 0.0)) throw InvalidArgument("period must be positive");
  if (!(blob_sigma >= 0.0)) throw InvalidArgument("blob sigma must be >= 0");
}

LabeledCloud gen_cloud(const SynthSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  LabeledCloud out;
  auto add_circle = [&](std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
      const double th = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
      double p[2] = {spec.radius * std::cos(th), spec.radius * std::sin(th)};
      if (spec.noise_level > 0)
        for (double& v : p) v += spec.noise_level * gauss(rng);
      out.cloud.push_back(p, static_cast<std::int64_t>(out.cloud.size()));
      out.labels.push_back(0);
    }
  };
  auto add_blob = [&](std::size_t n, std::size_t d, double sd) {
    std::vector<double> p(d);
    for (std::size_t i = 0; i < n; ++i) {
      for (auto& v : p) v = sd * gauss(rng);
      out.cloud.push_back(p, static_cast<std::int64_t>(out.cloud.size()));
      out.labels.push_back(1);
    }
  };
  switch (spec.kind) {
    case Kind::circle:
      out.cloud.dim = 2;
      add_circle(spec.n);
      break;
    case Kind::blob:
      out.cloud.dim = spec.dim;
      add_blob(spec.n, spec.dim, spec.blob_sigma);
      break;
    case Kind::circle_plus_blob:
      out.cloud.dim = 2;
      add_circle(spec.n);
      add_blob(spec.blob_n, 2, spec.blob_sigma);
      break;
    case Kind::noise: {
      out.cloud.dim = spec.dim;
      std::uniform_real_distribution<double> uni(0.0, 1.0);
      std::vector<double> p(spec.dim);
      for (std::size_t i = 0; i < spec.n; ++i) {
        for (auto& v : p) v = uni(rng);
        out.cloud.push_back(p, static_cast<std::int64_t>(i));
        out.labels.push_back(0);
      }
      break;
    }
    case Kind::sine:
    case Kind::logistic:
      throw InvalidArgument("'" + to_string(spec.kind) + "' is a series kind; use gen_series");
  }
  return out;
}

std::vector<double> gen_series(const SynthSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> x(spec.n);
  switch (spec.kind) {
    case Kind::sine: {
      std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
      const double ph = phase(rng);
      for (std::size_t t = 0; t < spec.n; ++t)
        x[t] = std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / spec.period + ph);
      break;
    }
    case Kind::logistic: {
      std::uniform_real_distribution<double> start(0.1, 0.9);
      double v = start(rng);
      for (std::size_t t = 0; t < spec.n; ++t) {
        x[t] = v;
        v = 4.0 * v * (1.0 - v);
      }
      break;
    }
    case Kind::noise:
      for (auto& v : x) v = gauss(rng);
      return x;
    default:
      throw InvalidArgument("'" + to_string(spec.kind) + "' is a cloud kind; use gen_cloud");
  }
  if (spec.noise_level > 0)
    for (auto& v : x) v += spec.noise_level * gauss(rng);
  return x;
}

void TwoClassSpec::validate() const {
  if (subjects_per_class < 1 || channels < 1 || segments < 1 || window < 1)
    throw InvalidArgument("two-class spec sizes must be >= 1");
  if (channels > signal::kTenTwentyLayout.size())
    throw InvalidArgument("at most 19 synthetic channels are supported");
  if (!(rate > 0) || !(period > 0) || !(noise >= 0)) throw InvalidArgument("invalid two-class signal parameters");
  if (!(std::abs(ar) < 1.0)) throw InvalidArgument("AR coefficient must lie in (-1, 1)");
}

namespace {

std::vector<std::string> channel_names(std::size_t n) {
  if (n <= signal::kDefaultChannels.size())
    return {signal::kDefaultChannels.begin(), signal::kDefaultChannels.begin() + static_cast<std::ptrdiff_t>(n)};
  std::vector<std::string> names = signal::kDefaultChannels;
  for (const auto& c : signal::kTenTwentyLayout) {
    if (names.size() == n) break;
    if (std::find(names.begin(), names.end(), c) == names.end()) names.push_back(c);
  }
  return names;
}

}  // namespace

std::vector<SyntheticSubject> gen_two_class_signals(const TwoClassSpec& spec) {
  spec.validate();
  const std::size_t len = spec.segments * spec.window;
  std::vector<SyntheticSubject> out;
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  // Sine of unit amplitude has RMS 1/sqrt(2); class B matches it.
  const double target_rms = std::sqrt(0.5 + spec.noise * spec.noise);
  const double innovation_sd = target_rms * std::sqrt(1.0 - spec.ar * spec.ar);
  for (int label : {1, 0}) {
    for (std::size_t s = 0; s < spec.subjects_per_class; ++s) {
      SyntheticSubject subj;
      subj.label = label;
      subj.source_id = std::string(label == 1 ? "A" : "B") + std::to_string(s + 1);
      subj.recording.channels = channel_names(spec.channels);
      subj.recording.rate = spec.rate;
      for (std::size_t c = 0; c < spec.channels; ++c) {
        std::vector<double> x(len);
        if (label == 1) {
          const double ph = phase(rng);
          for (std::size_t t = 0; t < len; ++t)
            x[t] = std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / spec.period + ph) +
                   spec.noise * gauss(rng);
        } else {
          double v = target_rms * gauss(rng);
          for (std::size_t t = 0; t < len; ++t) {
            x[t] = v;
            v = spec.ar * v + innovation_sd * gauss(rng);
          }
        }
        subj.recording.data.push_back(std::move(x));
      }
      out.push_back(std::move(subj));
    }
  }
  return out;
}

std::filesystem::path write_two_class_dataset(const TwoClassSpec& spec, const std::filesystem::path& dir) {
  const auto subjects = gen_two_class_signals(spec);
  std::filesystem::create_directories(dir / "recordings");
  std::ostringstream list;
  list << "source_id,path,label\n";
  for (const auto& s : subjects) {
    const auto rel = std::filesystem::path("recordings") / (s.source_id + ".csv");
    signal::save_recording(dir / rel, s.recording);
    list << s.source_id << ',' << rel.generic_string() << ',' << s.label << '\n';
  }
  const auto path = dir / "dataset.csv";
  io::write_text(path, list.str());
  return path;
}

namespace {

constexpr std::size_t kMaxOracleVertices = 12;
constexpr std::size_t kMaxRows = 256;  // >= C(12, 2) and C(12, 3)
using Row = std::bitset<kMaxRows>;

// Rank over Z/2 of a matrix given as rows of bits.
std::size_t gf2_rank(std::vector<Row> rows) {
  std::size_t rank = 0;
  for (std::size_t col = 0; col < kMaxRows && rank < rows.size(); ++col) {
    std::size_t pivot = rank;
    while (pivot < rows.size() && !rows[pivot][col]) ++pivot;
    if (pivot == rows.size()) continue;
    std::swap(rows[rank], rows[pivot]);
    for (std::size_t r = 0; r < rows.size(); ++r)
      if (r != rank && rows[r][col]) rows[r] ^= rows[rank];
    ++rank;
  }
  return rank;
}

}  // namespace

std::size_t brute_force_betti(std::span<const ph::Simplex> filtration, double eps, int dim) {
  if (dim < 0 || dim > 1) throw InvalidArgument("oracle supports dimensions 0 and 1");
  std::set<std::int32_t> vertices;
  for (const auto& s : filtration)
    for (auto v : s.verts()) vertices.insert(v);
  if (vertices.size() > kMaxOracleVertices) throw InvalidArgument("oracle scale exceeded");

  // Simplices of each dimension present at eps, keyed by vertex tuple.
  std::map<std::vector<std::int32_t>, std::size_t> by_dim[3];
  for (const auto& s : filtration) {
    if (s.value > eps || s.size < 1 || s.size > 3) continue;
    auto& m = by_dim[s.size - 1];
    std::vector<std::int32_t> key(s.verts().begin(), s.verts().end());
    std::sort(key.begin(), key.end());
    m.emplace(std::move(key), m.size());
  }
  // Rows of boundary matrix d_k: one per k-simplex, bits over (k-1)-simplices.
  auto boundary_rank = [&](int k) -> std::size_t {
    if (k <= 0 || k > 2) return 0;
    std::vector<Row> rows;
    for (const auto& [verts, _] : by_dim[k]) {
      Row r;
      for (std::size_t drop = 0; drop < verts.size(); ++drop) {
        std::vector<std::int32_t> face;
        for (std::size_t i = 0; i < verts.size(); ++i)
          if (i != drop) face.push_back(verts[i]);
        const auto it = by_dim[k - 1].find(face);
        if (it == by_dim[k - 1].end()) throw DomainError("faces after cofaces");
        r.flip(it->second);
      }
      rows.push_back(r);
    }
    return gf2_rank(std::move(rows));
  };
  const std::size_t n_k = by_dim[dim].size();
  return n_k - boundary_rank(dim) - boundary_rank(dim + 1);
}

}  // namespace tdaeeg::synth
