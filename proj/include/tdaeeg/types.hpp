#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace tdaeeg {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Finite set of d-dimensional points stored row-major. time_index is either
// empty or holds one strictly increasing sample index per point.
struct PointCloud {
  std::size_t dim = 0;
  std::vector<double> coords;
  std::vector<std::int64_t> time_index;

  PointCloud() = default;
  PointCloud(std::size_t d, std::vector<double> c, std::vector<std::int64_t> t = {})
      : dim(d), coords(std::move(c)), time_index(std::move(t)) {}

  std::size_t size() const noexcept { return dim == 0 ? 0 : coords.size() / dim; }
  bool empty() const noexcept { return size() == 0; }

  std::span<const double> point(std::size_t i) const noexcept {
    return {coords.data() + i * dim, dim};
  }

  void push_back(std::span<const double> p, std::int64_t t = -1);

  // Throws InvalidArgument when an invariant is broken.
  void validate() const;
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// Largest pairwise Euclidean distance; 0 for fewer than two points.
double diameter(const PointCloud& cloud) noexcept;

struct Feature {
  int dim = 0;
  double birth = 0.0;
  double death = kInfinity;

  bool essential() const noexcept { return std::isinf(death); }
  double persistence() const noexcept { return death - birth; }
  bool operator==(const Feature&) const = default;
};

struct PersistenceDiagram {
  std::vector<Feature> features;

  std::size_t size() const noexcept { return features.size(); }
  bool empty() const noexcept { return features.empty(); }

  // Stable sort by (dim, birth, death); ties keep insertion order.
  void sort();
  PersistenceDiagram restricted_to(int dim) const;
  void validate() const;
};

}  // namespace tdaeeg
