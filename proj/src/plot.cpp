#include "tdaeeg/plot.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tdaeeg/error.hpp"
#include "tdaeeg/io.hpp"

namespace tdaeeg::plot {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

const char* color_for(int dim) { return dim == 0 ? "#1f77b4" : "#d62728"; }

void open_svg(std::ostringstream& s, const Frame& f) {
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(f.width) << "\" height=\""
    << fmt(f.height) << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

void axes(std::ostringstream& s, const Frame& f) {
  s << "<line class=\"axis\" x1=\"" << fmt(f.x(f.lo)) << "\" y1=\"" << fmt(f.y(f.lo)) << "\" x2=\""
    << fmt(f.x(f.hi)) << "\" y2=\"" << fmt(f.y(f.lo)) << "\" stroke=\"black\"/>\n";
  s << "<line class=\"axis\" x1=\"" << fmt(f.x(f.lo)) << "\" y1=\"" << fmt(f.y(f.lo)) << "\" x2=\""
    << fmt(f.x(f.lo)) << "\" y2=\"" << fmt(f.y(f.hi)) << "\" stroke=\"black\"/>\n";
  s << "<text x=\"" << fmt(f.x(f.lo)) << "\" y=\"" << fmt(f.y(f.lo) + 15) << "\" font-size=\"10\">"
    << fmt(f.lo) << "</text>\n";
  s << "<text x=\"" << fmt(f.x(f.hi) - 20) << "\" y=\"" << fmt(f.y(f.lo) + 15) << "\" font-size=\"10\">"
    << fmt(f.hi) << "</text>\n";
}

}  // namespace

Frame diagram_frame(const PersistenceDiagram& diagram) {
  Frame f;
  bool any = false;
  double lo = 0, hi = 0;
  for (const auto& feat : diagram.features) {
    for (double v : {feat.birth, feat.death}) {
      if (!std::isfinite(v)) continue;
      lo = any ? std::min(lo, v) : v;
      hi = any ? std::max(hi, v) : v;
      any = true;
    }
  }
  lo = std::min(lo, 0.0);
  if (!any || hi <= lo) hi = lo + 1.0;
  f.lo = lo;
  f.hi = hi + 0.05 * (hi - lo);
  return f;
}

std::string diagram_svg(const PersistenceDiagram& diagram) {
  const Frame f = diagram_frame(diagram);
  std::ostringstream s;
  open_svg(s, f);
  axes(s, f);
  s << "<line class=\"diagonal\" x1=\"" << fmt(f.x(f.lo)) << "\" y1=\"" << fmt(f.y(f.lo)) << "\" x2=\""
    << fmt(f.x(f.hi)) << "\" y2=\"" << fmt(f.y(f.hi)) << "\" stroke=\"gray\"/>\n";
  bool essential = false;
  for (const auto& feat : diagram.features) {
    const double d = feat.essential() ? f.hi : feat.death;
    essential = essential || feat.essential();
    s << "<circle class=\"dim" << feat.dim << "\" data-birth=\"" << io::format_double(feat.birth)
      << "\" data-death=\"" << io::format_double(feat.death) << "\" cx=\"" << fmt(f.x(feat.birth))
      << "\" cy=\"" << fmt(f.y(d)) << "\" r=\"3\" fill=\"" << color_for(feat.dim) << "\"/>\n";
  }
  if (essential)
    s << "<line class=\"infinity\" x1=\"" << fmt(f.x(f.lo)) << "\" y1=\"" << fmt(f.y(f.hi)) << "\" x2=\""
      << fmt(f.x(f.hi)) << "\" y2=\"" << fmt(f.y(f.hi)) << "\" stroke=\"gray\" stroke-dasharray=\"4 2\"/>\n";
  s << "</svg>\n";
  return s.str();
}

std::string barcode_svg(const PersistenceDiagram& diagram) {
  Frame f = diagram_frame(diagram);
  auto sorted = diagram;
  sorted.sort();
  const double bar_h = 6.0;
  f.height = std::max(f.height, 2 * f.margin + bar_h * 1.5 * static_cast<double>(sorted.size()));
  std::ostringstream s;
  open_svg(s, f);
  axes(s, f);
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto& feat = sorted.features[i];
    const double y = f.margin + 1.5 * bar_h * static_cast<double>(i);
    const double x0 = f.x(feat.birth);
    const double x1 = f.x(feat.essential() ? f.hi : feat.death);
    s << "<rect class=\"dim" << feat.dim << "\" x=\"" << fmt(x0) << "\" y=\"" << fmt(y) << "\" width=\""
      << fmt(std::max(x1 - x0, 0.5)) << "\" height=\"" << fmt(bar_h) << "\" fill=\"" << color_for(feat.dim)
      << "\"/>\n";
  }
  s << "</svg>\n";
  return s.str();
}

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void put_chunk(std::vector<std::uint8_t>& out, const char* type, const std::vector<std::uint8_t>& data) {
  put_u32(out, static_cast<std::uint32_t>(data.size()));
  const std::size_t start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  const auto crc = crc32(0L, out.data() + start, static_cast<uInt>(out.size() - start));
  put_u32(out, static_cast<std::uint32_t>(crc));
}

}  // namespace

std::vector<std::uint8_t> grayscale_png(std::size_t rows, std::size_t cols, std::span<const double> values,
                                        std::size_t scale) {
  if (rows == 0 || cols == 0 || scale == 0) throw InvalidArgument("image dimensions must be positive");
  if (values.size() != rows * cols) throw InvalidArgument("image value count does not match its shape");
  double vmax = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidArgument("non-finite pixel value");
    vmax = std::max(vmax, v);
  }
  const std::size_t w = cols * scale, h = rows * scale;
  std::vector<std::uint8_t> raw;
  raw.reserve(h * (w + 1));
  for (std::size_t py = 0; py < h; ++py) {
    const std::size_t r = rows - 1 - py / scale;
    raw.push_back(0);  // filter type: none
    for (std::size_t px = 0; px < w; ++px) {
      const double v = vmax > 0 ? std::clamp(values[r * cols + px / scale] / vmax, 0.0, 1.0) : 0.0;
      raw.push_back(static_cast<std::uint8_t>(std::lround(v * 255.0)));
    }
  }
  uLongf zlen = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> z(zlen);
  if (compress2(z.data(), &zlen, raw.data(), static_cast<uLong>(raw.size()), 9) != Z_OK)
    throw IoError("PNG compression failed");
  z.resize(zlen);

  std::vector<std::uint8_t> png = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  std::vector<std::uint8_t> ihdr;
  put_u32(ihdr, static_cast<std::uint32_t>(w));
  put_u32(ihdr, static_cast<std::uint32_t>(h));
  ihdr.insert(ihdr.end(), {8, 0, 0, 0, 0});  // 8-bit grayscale, no interlace
  put_chunk(png, "IHDR", ihdr);
  put_chunk(png, "IDAT", z);
  put_chunk(png, "IEND", {});
  return png;
}

void plot_file(std::string_view kind, const std::filesystem::path& input, const std::filesystem::path& output) {
  if (kind != "diagram" && kind != "barcode" && kind != "image")
    throw InvalidArgument("unknown artifact type '" + std::string(kind) + "'");
  if (!std::filesystem::exists(input)) throw IoError("no such file: " + input.string());
  if (kind == "image") {
    std::size_t rows = 0, cols = 0;
    const auto values = io::read_matrix(input, rows, cols);
    const auto png = grayscale_png(rows, cols, values, 10);
    if (output.has_parent_path()) std::filesystem::create_directories(output.parent_path());
    std::ofstream out(output, std::ios::binary);
    out.write(reinterpret_cast<const char*>(png.data()), static_cast<std::streamsize>(png.size()));
    if (!out) throw IoError("cannot write " + output.string());
    return;
  }
  const auto diagram = io::read_diagram(input);
  io::write_text(output, kind == "diagram" ? diagram_svg(diagram) : barcode_svg(diagram));
}

}  // namespace tdaeeg::plot
