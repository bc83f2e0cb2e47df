#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "tdaeeg/types.hpp"

namespace tdaeeg::ph {

// A vertex, edge or triangle of a filtered complex. Vertex ids are strictly
// increasing; unused slots are -1.
struct Simplex {
  std::array<std::int32_t, 3> vertices{-1, -1, -1};
  int size = 0;  // number of vertices (dimension + 1)
  double value = 0.0;

  int dimension() const noexcept { return size - 1; }
  std::span<const std::int32_t> verts() const noexcept {
    return {vertices.data(), static_cast<std::size_t>(size)};
  }
  bool operator==(const Simplex&) const = default;
};

Simplex make_simplex(std::span<const std::int32_t> vertices, double value);

// Total order used by the Rips builder: (value, dimension, lexicographic vertices).
bool filtration_less(const Simplex& a, const Simplex& b) noexcept;

// Vietoris-Rips filtration up to `max_dim`-simplices (0, 1 or 2) with edges
// no longer than max_scale. max_scale <= 0 selects the cloud diameter.
std::vector<Simplex> rips_filtration(const PointCloud& cloud, double max_scale = 0.0,
                                     int max_dim = 2);

// Persistent homology over Z/2 in dimensions 0 and 1 of a filtration given in
// filtration order. Zero-length pairs are dropped; unpaired classes die at
// +infinity. Throws DomainError("faces after cofaces") on an invalid order.
PersistenceDiagram compute_persistence(std::span<const Simplex> filtration);

// Convenience: rips_filtration followed by compute_persistence.
PersistenceDiagram rips_persistence(const PointCloud& cloud, double max_scale = 0.0);

// Features of `dim` alive at eps: birth <= eps < death.
std::size_t betti_at(const PersistenceDiagram& diagram, double eps, int dim);

}  // namespace tdaeeg::ph
