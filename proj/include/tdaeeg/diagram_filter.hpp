#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "tdaeeg/types.hpp"

namespace tdaeeg::diagram {

using Point2 = std::array<double, 2>;

// 2x2 Gaussian bandwidth matrix, row-major.
struct BandwidthSpec {
  std::array<double, 4> h{1, 0, 0, 1};

  double det() const noexcept { return h[0] * h[3] - h[1] * h[2]; }
  void validate() const;  // symmetric positive-definite, else DomainError

  static BandwidthSpec identity(double scale = 1.0);
  // scale * (sample covariance + 1e-9 I)
  static BandwidthSpec from_covariance(std::span<const Point2> points, double scale = 10.0);
  // "cov10" | "identity:<s>" | "manual:<h11>,<h12>,<h21>,<h22>"
  static BandwidthSpec parse(const std::string& spec, std::span<const Point2> points);
};

// Finite dimension-1 (birth, death) pairs of every diagram, with multiplicity.
std::vector<Point2> merge_diagrams(std::span<const PersistenceDiagram> diagrams);

// Gaussian MKDE evaluated at every input point, self term included.
std::vector<double> mkde_density(std::span<const Point2> points, const BandwidthSpec& bw);

// Keeps the ceil(keep_fraction * N) highest-density points (ties favour the
// lower index) and returns them, in input order, as a dimension-1 diagram.
PersistenceDiagram filter_by_density(std::span<const Point2> points,
                                     std::span<const double> densities, double keep_fraction);

}  // namespace tdaeeg::diagram
