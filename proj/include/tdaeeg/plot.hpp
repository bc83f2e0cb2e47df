#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tdaeeg/types.hpp"

namespace tdaeeg::plot {

struct Frame {
  double width = 400, height = 400, margin = 40;
  double lo = 0, hi = 1;  // data range on both axes
  double x(double v) const noexcept { return margin + (v - lo) / (hi - lo) * (width - 2 * margin); }
  double y(double v) const noexcept { return height - margin - (v - lo) / (hi - lo) * (height - 2 * margin); }
};

// Axis range covering every finite birth and death with 5% headroom;
// [0, 1] for an empty diagram.
Frame diagram_frame(const PersistenceDiagram& diagram);

// Scatter of (birth, death) with the diagonal; essential features sit on a
// dashed line at the top of the frame.
std::string diagram_svg(const PersistenceDiagram& diagram);
std::string barcode_svg(const PersistenceDiagram& diagram);

// 8-bit grayscale PNG of a row-major matrix, value / max mapped to 0..255,
// first row drawn at the bottom. Each cell becomes a scale x scale block.
std::vector<std::uint8_t> grayscale_png(std::size_t rows, std::size_t cols, std::span<const double> values,
                                        std::size_t scale = 1);

// kind: diagram | barcode | image
void plot_file(std::string_view kind, const std::filesystem::path& input, const std::filesystem::path& output);

}  // namespace tdaeeg::plot
