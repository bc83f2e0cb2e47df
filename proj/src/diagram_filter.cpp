#include "tdaeeg/diagram_filter.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "tdaeeg/error.hpp"
#include "tdaeeg/io.hpp"

namespace tdaeeg::diagram {

void BandwidthSpec::validate() const {
  for (double v : h)
    if (!std::isfinite(v)) throw DomainError("bandwidth matrix has a non-finite entry");
  if (std::abs(h[1] - h[2]) > 1e-12 * std::max({1.0, std::abs(h[1]), std::abs(h[2])}))
    throw DomainError("bandwidth matrix must be symmetric");
  if (!(h[0] > 0.0) || !(det() > 0.0)) throw DomainError("singular or indefinite bandwidth matrix");
}

BandwidthSpec BandwidthSpec::identity(double scale) {
  BandwidthSpec b;
  b.h = {scale, 0, 0, scale};
  return b;
}

BandwidthSpec BandwidthSpec::from_covariance(std::span<const Point2> points, double scale) {
  double mx = 0, my = 0;
  for (const auto& p : points) {
    mx += p[0];
    my += p[1];
  }
  const double n = static_cast<double>(points.size());
  double sxx = 0, sxy = 0, syy = 0;
  if (points.size() > 1) {
    mx /= n;
    my /= n;
    for (const auto& p : points) {
      sxx += (p[0] - mx) * (p[0] - mx);
      sxy += (p[0] - mx) * (p[1] - my);
      syy += (p[1] - my) * (p[1] - my);
    }
    sxx /= n - 1;
    sxy /= n - 1;
    syy /= n - 1;
  }
  BandwidthSpec b;
  b.h = {scale * (sxx + 1e-9), scale * sxy, scale * sxy, scale * (syy + 1e-9)};
  return b;
}

BandwidthSpec BandwidthSpec::parse(const std::string& spec, std::span<const Point2> points) {
  BandwidthSpec b;
  if (spec == "cov10") {
    b = from_covariance(points, 10.0);
  } else if (spec.rfind("identity:", 0) == 0) {
    b = identity(io::parse_double(spec.substr(9)));
  } else if (spec.rfind("manual:", 0) == 0) {
    const auto cells = io::split(spec.substr(7), ',');
    if (cells.size() != 4) throw InvalidArgument("manual bandwidth needs four entries");
    for (std::size_t i = 0; i < 4; ++i) b.h[i] = io::parse_double(cells[i]);
  } else {
    throw InvalidArgument("unknown bandwidth spec '" + spec + "'");
  }
  b.validate();
  return b;
}

std::vector<Point2> merge_diagrams(std::span<const PersistenceDiagram> diagrams) {
  std::vector<Point2> out;
  for (const auto& d : diagrams)
    for (const auto& f : d.features)
      if (f.dim == 1 && !f.essential()) out.push_back({f.birth, f.death});
  return out;
}

std::vector<double> mkde_density(std::span<const Point2> points, const BandwidthSpec& bw) {
  bw.validate();
  if (points.empty()) return {};
  const double det = bw.det();
  // Inverse of the symmetric 2x2 matrix.
  const double i00 = bw.h[3] / det, i01 = -bw.h[1] / det, i11 = bw.h[0] / det;
  const double norm = 1.0 / (2.0 * std::numbers::pi * std::sqrt(det));
  const double n = static_cast<double>(points.size());

  std::vector<double> out(points.size());
  for (std::size_t j = 0; j < points.size(); ++j) {
    double sum = 0.0;
    for (const auto& p : points) {
      const double dx = points[j][0] - p[0];
      const double dy = points[j][1] - p[1];
      sum += std::exp(-0.5 * (dx * dx * i00 + 2.0 * dx * dy * i01 + dy * dy * i11));
    }
    out[j] = norm * sum / n;
  }
  return out;
}

PersistenceDiagram filter_by_density(std::span<const Point2> points,
                                     std::span<const double> densities, double keep_fraction) {
  if (!(keep_fraction > 0.0 && keep_fraction <= 1.0))
    throw InvalidArgument("keep_fraction must lie in (0, 1]");
  if (points.size() != densities.size()) throw InvalidArgument("points and densities differ in length");
  const std::size_t n = points.size();
  const auto keep = static_cast<std::size_t>(
      std::ceil(keep_fraction * static_cast<double>(n) - 1e-9));

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return densities[a] > densities[b]; });
  idx.resize(std::min(keep, n));
  std::sort(idx.begin(), idx.end());

  PersistenceDiagram out;
  for (auto i : idx) out.features.push_back({1, points[i][0], points[i][1]});
  return out;
}

}  // namespace tdaeeg::diagram
