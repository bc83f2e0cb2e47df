#include "tdaeeg/signal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <set>

#include "tdaeeg/error.hpp"
#include "tdaeeg/io.hpp"

namespace tdaeeg::signal {

std::size_t RawRecording::channel_index(const std::string& name) const {
  const auto it = std::find(channels.begin(), channels.end(), name);
  if (it == channels.end()) throw InvalidArgument("unknown channel name '" + name + "'");
  return static_cast<std::size_t>(it - channels.begin());
}

void RawRecording::validate() const {
  if (!(rate > 0.0) || !std::isfinite(rate)) throw InvalidArgument("sampling rate must be positive");
  if (channels.size() != data.size()) throw InvalidArgument("channel names and data disagree");
  std::set<std::string> seen;
  for (const auto& c : channels)
    if (!seen.insert(c).second) throw InvalidArgument("duplicate channel name '" + c + "'");
  for (const auto& d : data)
    if (d.size() != samples()) throw InvalidArgument("channels have unequal sample counts");
}

RawRecording load_recording(const std::filesystem::path& path,
                            std::span<const std::string> layout, double rate) {
  if (!std::filesystem::exists(path)) throw IoError("missing file " + path.string());
  const auto table = io::read_csv(path, true);
  const std::size_t ncol = table.header.size();
  if (ncol == 0) throw ParseError(path.string() + ": empty header");

  std::vector<std::size_t> order(ncol);
  std::vector<std::string> names = table.header;
  if (!layout.empty()) {
    if (layout.size() != ncol)
      throw ParseError(path.string() + ": layout declares " + std::to_string(layout.size()) +
                       " channels, file has " + std::to_string(ncol));
    for (std::size_t c = 0; c < ncol; ++c) {
      const auto it = std::find(layout.begin(), layout.end(), table.header[c]);
      if (it == layout.end())
        throw InvalidArgument(path.string() + ": unknown channel name '" + table.header[c] + "'");
    }
    for (std::size_t i = 0; i < ncol; ++i) {
      const auto it = std::find(table.header.begin(), table.header.end(), layout[i]);
      if (it == table.header.end())
        throw InvalidArgument(path.string() + ": channel '" + layout[i] + "' missing");
      order[i] = static_cast<std::size_t>(it - table.header.begin());
    }
    names.assign(layout.begin(), layout.end());
  } else {
    for (std::size_t i = 0; i < ncol; ++i) order[i] = i;
  }

  RawRecording rec;
  rec.rate = rate;
  rec.channels = names;
  rec.data.assign(ncol, {});
  for (auto& d : rec.data) d.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() != ncol)
      throw ParseError(path.string() + ": ragged rows (line " + std::to_string(r + 2) + ")");
    for (std::size_t i = 0; i < ncol; ++i) rec.data[i].push_back(io::parse_double(row[order[i]]));
  }
  rec.validate();
  return rec;
}

void save_recording(const std::filesystem::path& path, const RawRecording& rec) {
  std::string out;
  for (std::size_t c = 0; c < rec.channels.size(); ++c) {
    if (c) out += ',';
    out += rec.channels[c];
  }
  out += '\n';
  for (std::size_t t = 0; t < rec.samples(); ++t) {
    for (std::size_t c = 0; c < rec.channels.size(); ++c) {
      if (c) out += ',';
      out += io::format_double(rec.data[c][t]);
    }
    out += '\n';
  }
  io::write_text(path, out);
}

namespace {

using cplx = std::complex<double>;

Biquad section_from_poles(cplx p1, cplx p2) {
  Biquad s;
  s.b0 = 1.0;
  s.b1 = 0.0;
  s.b2 = -1.0;  // zeros at z = 1 and z = -1
  s.a1 = -(p1 + p2).real();
  s.a2 = (p1 * p2).real();
  return s;
}

cplx section_response(const Biquad& s, cplx z) {
  const cplx zi = 1.0 / z;
  return (s.b0 + s.b1 * zi + s.b2 * zi * zi) / (1.0 + s.a1 * zi + s.a2 * zi * zi);
}

}  // namespace

ButterworthBandpass::ButterworthBandpass(double low_hz, double high_hz, int order, double rate)
    : order_(order), rate_(rate) {
  if (!(rate > 0.0)) throw InvalidArgument("sampling rate must be positive");
  if (order % 2 != 0) throw InvalidArgument("band-pass order must be even");
  if (order < 2 || order > 8) throw InvalidArgument("band-pass order must be one of 2, 4, 6, 8");
  if (!(low_hz > 0.0) || !(low_hz < high_hz) || !(high_hz < rate / 2.0))
    throw InvalidArgument("cutoff outside the (0, Nyquist) range or low >= high");

  const int n = order / 2;
  const double k = 2.0 * rate;
  const double wl = k * std::tan(std::numbers::pi * low_hz / rate);
  const double wh = k * std::tan(std::numbers::pi * high_hz / rate);
  const double bw = wh - wl;
  const double w0sq = wl * wh;

  std::vector<cplx> complex_poles;  // upper half-plane representatives
  std::vector<double> real_poles;
  auto add_digital = [&](cplx s) {
    const cplx z = (k + s) / (k - s);
    if (std::abs(z.imag()) < 1e-12 * std::max(1.0, std::abs(z)))
      real_poles.push_back(z.real());
    else if (z.imag() > 0)
      complex_poles.push_back(z);
  };
  for (int i = 0; i < n; ++i) {
    const cplx p = std::polar(1.0, std::numbers::pi * (2.0 * i + n + 1) / (2.0 * n));
    const cplx disc = std::sqrt(p * p * bw * bw - 4.0 * w0sq);
    add_digital((p * bw + disc) / 2.0);
    add_digital((p * bw - disc) / 2.0);
  }
  for (const auto& z : complex_poles) sections_.push_back(section_from_poles(z, std::conj(z)));
  std::sort(real_poles.begin(), real_poles.end());
  for (std::size_t i = 0; i + 1 < real_poles.size(); i += 2)
    sections_.push_back(section_from_poles(real_poles[i], real_poles[i + 1]));
  if (sections_.size() != static_cast<std::size_t>(n))
    throw DomainError("band-pass design produced an unexpected pole layout");

  // Unit gain at the geometric centre of the pre-warped band.
  const double w_center = 2.0 * std::atan(std::sqrt(w0sq) / k);
  const double gain = std::abs(response(w_center * rate / (2.0 * std::numbers::pi)));
  const double per_section = std::pow(gain, -1.0 / n);
  for (auto& s : sections_) {
    s.b0 *= per_section;
    s.b1 *= per_section;
    s.b2 *= per_section;
  }

  // Steady state of each section for a unit step entering the cascade.
  double in_level = 1.0;
  for (const auto& s : sections_) {
    const double g = (s.b0 + s.b1 + s.b2) / (1.0 + s.a1 + s.a2);
    zi_.push_back({(g - s.b0) * in_level, (s.b2 - s.a2 * g) * in_level});
    in_level *= g;
  }
}

std::complex<double> ButterworthBandpass::response(double f_hz) const {
  const cplx z = std::polar(1.0, 2.0 * std::numbers::pi * f_hz / rate_);
  cplx h = 1.0;
  for (const auto& s : sections_) h *= section_response(s, z);
  return h;
}

std::vector<double> ButterworthBandpass::filter(std::span<const double> x, double x0_scale) const {
  std::vector<double> y(x.begin(), x.end());
  for (std::size_t si = 0; si < sections_.size(); ++si) {
    const auto& s = sections_[si];
    double z1 = zi_[si][0] * x0_scale;
    double z2 = zi_[si][1] * x0_scale;
    for (double& v : y) {
      const double in = v;
      const double out = s.b0 * in + z1;
      z1 = s.b1 * in - s.a1 * out + z2;
      z2 = s.b2 * in - s.a2 * out;
      v = out;
    }
  }
  return y;
}

std::vector<double> ButterworthBandpass::filtfilt(std::span<const double> x) const {
  const std::size_t n = x.size();
  if (n == 0) return {};
  const std::size_t pad = std::min<std::size_t>(3 * static_cast<std::size_t>(order_), n - 1);

  std::vector<double> ext;
  ext.reserve(n + 2 * pad);
  for (std::size_t i = pad; i >= 1; --i) ext.push_back(2.0 * x[0] - x[i]);
  ext.insert(ext.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= pad; ++i) ext.push_back(2.0 * x[n - 1] - x[n - 1 - i]);

  auto fwd = filter(ext, ext.front());
  std::reverse(fwd.begin(), fwd.end());
  auto back = filter(fwd, fwd.front());
  std::reverse(back.begin(), back.end());
  return {back.begin() + static_cast<std::ptrdiff_t>(pad),
          back.begin() + static_cast<std::ptrdiff_t>(pad + n)};
}

RawRecording bandpass_filter(const RawRecording& rec, double low_hz, double high_hz, int order) {
  rec.validate();
  const ButterworthBandpass bp(low_hz, high_hz, order, rec.rate);
  RawRecording out = rec;
  for (auto& ch : out.data) ch = bp.filtfilt(ch);
  return out;
}

RawRecording select_channels(const RawRecording& rec, std::span<const std::string> names) {
  RawRecording out;
  out.rate = rec.rate;
  for (const auto& name : names) {
    const auto idx = rec.channel_index(name);
    out.channels.push_back(name);
    out.data.push_back(rec.data[idx]);
  }
  out.validate();
  return out;
}

std::vector<Segment> segment(const RawRecording& rec, std::size_t window_samples,
                             const std::string& source_id) {
  if (window_samples == 0) throw InvalidArgument("window must be at least one sample");
  std::vector<Segment> out;
  const std::size_t count = rec.samples() / window_samples;
  for (std::size_t s = 0; s < count; ++s) {
    Segment seg;
    seg.channels = rec.channels;
    seg.source_id = source_id;
    seg.index = s;
    const auto begin = static_cast<std::ptrdiff_t>(s * window_samples);
    for (const auto& ch : rec.data)
      seg.data.emplace_back(ch.begin() + begin,
                            ch.begin() + begin + static_cast<std::ptrdiff_t>(window_samples));
    out.push_back(std::move(seg));
  }
  return out;
}

}  // namespace tdaeeg::signal
