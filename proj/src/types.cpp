#include "tdaeeg/types.hpp"

#include <algorithm>
#include <string>

#include "tdaeeg/error.hpp"

namespace tdaeeg {

void PointCloud::push_back(std::span<const double> p, std::int64_t t) {
  if (dim == 0 && coords.empty()) dim = p.size();
  if (p.size() != dim) throw InvalidArgument("point dimension mismatch");
  coords.insert(coords.end(), p.begin(), p.end());
  if (t >= 0) time_index.push_back(t);
}

void PointCloud::validate() const {
  if (dim == 0 && !coords.empty()) throw InvalidArgument("point cloud has zero dimension");
  if (dim != 0 && coords.size() % dim != 0)
    throw InvalidArgument("point cloud coordinate count is not a multiple of its dimension");
  for (double v : coords)
    if (!std::isfinite(v)) throw InvalidArgument("point cloud has a non-finite coordinate");
  if (!time_index.empty()) {
    if (time_index.size() != size())
      throw InvalidArgument("time_index length differs from point count");
    for (std::size_t i = 1; i < time_index.size(); ++i)
      if (time_index[i] <= time_index[i - 1])
        throw InvalidArgument("time_index is not strictly increasing");
  }
}

double diameter(const PointCloud& cloud) noexcept {
  double best = 0.0;
  const std::size_t n = cloud.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      best = std::max(best, squared_distance(cloud.point(i), cloud.point(j)));
  return std::sqrt(best);
}

void PersistenceDiagram::sort() {
  std::stable_sort(features.begin(), features.end(), [](const Feature& a, const Feature& b) {
    if (a.dim != b.dim) return a.dim < b.dim;
    if (a.birth != b.birth) return a.birth < b.birth;
    return a.death < b.death;
  });
}

PersistenceDiagram PersistenceDiagram::restricted_to(int dim) const {
  PersistenceDiagram out;
  for (const auto& f : features)
    if (f.dim == dim) out.features.push_back(f);
  return out;
}

void PersistenceDiagram::validate() const {
  for (const auto& f : features) {
    if (f.dim < 0) throw InvalidArgument("negative homology dimension");
    if (std::isnan(f.birth) || std::isnan(f.death) || std::isinf(f.birth))
      throw InvalidArgument("diagram feature has an invalid endpoint");
    if (f.death < f.birth)
      throw InvalidArgument("diagram feature dies before it is born (dim " +
                            std::to_string(f.dim) + ")");
  }
}

}  // namespace tdaeeg
