#pragma once

#include <array>
#include <span>
#include <vector>

#include "tdaeeg/types.hpp"

namespace tdaeeg::vec {

using Point2 = std::array<double, 2>;

// Piecewise persistence weight: flat `a` up to t1, linear ramp to `c` at t2,
// then (y - t2)^2 + c. Zero on the birth axis.
struct WeightParams {
  double a = 0.0;
  double c = 3.0;
  double t1 = 100.0;
  double t2 = 200.0;

  void validate() const;
};

double weight_fn(double y, const WeightParams& params);

// (birth, death) -> (birth, death - birth). Throws on essential features.
std::vector<Point2> birth_persistence_transform(const PersistenceDiagram& diagram);

struct ImageExtent {
  double birth_lo = 0, birth_hi = 1;
  double pers_lo = 0, pers_hi = 1;
};

struct ImageSpec {
  std::size_t rows = 20;  // persistence bins, ascending
  std::size_t cols = 20;  // birth bins, ascending
  ImageExtent extent;
  double sigma = 1.0;

  void validate() const;
};

struct PersistenceImage {
  std::size_t rows = 0, cols = 0;
  std::vector<double> pixels;  // row-major, rows x cols
  ImageExtent extent;
  double sigma = 0.0;

  double at(std::size_t r, std::size_t c) const { return pixels[r * cols + c]; }
  double max() const noexcept;
  double sum() const noexcept;
};

// Grid defaults for a set of transformed points: sigma = persistence range /
// 20 (falling back to 1 when the range is zero) and the bounding box padded
// by 3 sigma.
ImageSpec default_image_spec(std::span<const Point2> points, std::size_t rows = 20,
                             std::size_t cols = 20);

// Pixel integrals of the weighted Gaussian surface, via per-axis normal CDF
// differences. With `normalize`, pixels are divided by the largest pixel
// unless the image is all zero.
PersistenceImage persistence_image(std::span<const Point2> points, const ImageSpec& spec,
                                   const WeightParams& weights, bool normalize = true);

std::vector<double> uniform_grid(double lo, double hi, std::size_t count);

// k-major: values for layer 1 over the grid, then layer 2, ...
std::vector<double> persistence_landscape(const PersistenceDiagram& diagram, std::size_t k_max,
                                          std::span<const double> grid, int dim = 1);

std::vector<double> entropy_summary(const PersistenceDiagram& diagram,
                                    std::span<const double> grid, int dim = 1);

std::vector<double> betti_curve(const PersistenceDiagram& diagram, std::span<const double> grid,
                                int dim = 1);

}  // namespace tdaeeg::vec
