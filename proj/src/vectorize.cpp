#include "tdaeeg/vectorize.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "tdaeeg/error.hpp"

namespace tdaeeg::vec {

void WeightParams::validate() const {
  if (!(t1 >= 0.0) || !(t2 > t1)) throw InvalidArgument("weight knots need 0 <= t1 < t2");
  if (!(a >= 0.0) || !(c >= 0.0)) throw InvalidArgument("weight levels a and c must be >= 0");
}

double weight_fn(double y, const WeightParams& p) {
  if (std::isnan(y) || y < 0.0) throw InvalidArgument("persistence must be >= 0");
  if (y == 0.0) return 0.0;
  if (y <= p.t1) return p.a;
  // Same line as ((c-a)/(t2-t1)) y + (t2 a - t1 c)/(t2-t1), anchored at t1.
  if (y <= p.t2) return p.a + (p.c - p.a) * (y - p.t1) / (p.t2 - p.t1);
  const double over = y - p.t2;
  return over * over + p.c;
}

std::vector<Point2> birth_persistence_transform(const PersistenceDiagram& diagram) {
  std::vector<Point2> out;
  out.reserve(diagram.size());
  for (const auto& f : diagram.features) {
    if (f.essential()) throw InvalidArgument("essential features cannot be vectorized");
    out.push_back({f.birth, f.death - f.birth});
  }
  return out;
}

void ImageSpec::validate() const {
  if (rows < 1 || cols < 1) throw InvalidArgument("image needs at least one row and column");
  if (!(sigma > 0.0)) throw InvalidArgument("sigma must be positive");
  if (!(extent.birth_hi > extent.birth_lo) || !(extent.pers_hi > extent.pers_lo))
    throw InvalidArgument("image extent must be a nonempty rectangle");
}

double PersistenceImage::max() const noexcept {
  return pixels.empty() ? 0.0 : *std::max_element(pixels.begin(), pixels.end());
}

double PersistenceImage::sum() const noexcept {
  double s = 0.0;
  for (double v : pixels) s += v;
  return s;
}

ImageSpec default_image_spec(std::span<const Point2> points, std::size_t rows, std::size_t cols) {
  ImageSpec spec;
  spec.rows = rows;
  spec.cols = cols;
  if (points.empty()) {
    spec.sigma = 1.0;
    spec.extent = {0.0, 1.0, 0.0, 1.0};
    return spec;
  }
  double bl = points[0][0], bh = bl, pl = points[0][1], ph = pl;
  for (const auto& p : points) {
    bl = std::min(bl, p[0]);
    bh = std::max(bh, p[0]);
    pl = std::min(pl, p[1]);
    ph = std::max(ph, p[1]);
  }
  spec.sigma = ph > pl ? (ph - pl) / 20.0 : 1.0;
  const double pad = 3.0 * spec.sigma;
  spec.extent = {bl - pad, bh + pad, pl - pad, ph + pad};
  return spec;
}

namespace {

// P(lo <= X <= hi) for X ~ N(mu, sigma^2), computed with erfc to keep tails accurate.
double normal_mass(double lo, double hi, double mu, double sigma) {
  const double s = sigma * std::sqrt(2.0);
  const double a = (lo - mu) / s;
  const double b = (hi - mu) / s;
  if (a >= 0.0) return 0.5 * (std::erfc(a) - std::erfc(b));
  if (b <= 0.0) return 0.5 * (std::erfc(-b) - std::erfc(-a));
  return 1.0 - 0.5 * (std::erfc(b) + std::erfc(-a));
}

}  // namespace

PersistenceImage persistence_image(std::span<const Point2> points, const ImageSpec& spec,
                                   const WeightParams& weights, bool normalize) {
  spec.validate();
  weights.validate();
  PersistenceImage img;
  img.rows = spec.rows;
  img.cols = spec.cols;
  img.extent = spec.extent;
  img.sigma = spec.sigma;
  img.pixels.assign(spec.rows * spec.cols, 0.0);

  const double dx = (spec.extent.birth_hi - spec.extent.birth_lo) / static_cast<double>(spec.cols);
  const double dy = (spec.extent.pers_hi - spec.extent.pers_lo) / static_cast<double>(spec.rows);
  std::vector<double> mx(spec.cols), my(spec.rows);
  for (const auto& u : points) {
    const double w = weight_fn(u[1], weights);
    if (w == 0.0) continue;
    for (std::size_t c = 0; c < spec.cols; ++c) {
      const double lo = spec.extent.birth_lo + dx * static_cast<double>(c);
      mx[c] = normal_mass(lo, lo + dx, u[0], spec.sigma);
    }
    for (std::size_t r = 0; r < spec.rows; ++r) {
      const double lo = spec.extent.pers_lo + dy * static_cast<double>(r);
      my[r] = normal_mass(lo, lo + dy, u[1], spec.sigma);
    }
    for (std::size_t r = 0; r < spec.rows; ++r)
      for (std::size_t c = 0; c < spec.cols; ++c) img.pixels[r * spec.cols + c] += w * my[r] * mx[c];
  }
  if (normalize) {
    const double m = img.max();
    if (m > 0.0)
      for (auto& v : img.pixels) v /= m;
  }
  return img;
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t count) {
  if (count == 0) return {};
  if (count == 1) return {0.5 * (lo + hi)};
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i)
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  return g;
}

namespace {

std::vector<Feature> finite_of_dim(const PersistenceDiagram& diagram, int dim) {
  std::vector<Feature> out;
  for (const auto& f : diagram.features) {
    if (f.dim != dim) continue;
    if (f.essential()) throw InvalidArgument("essential features cannot be vectorized");
    out.push_back(f);
  }
  return out;
}

}  // namespace

std::vector<double> persistence_landscape(const PersistenceDiagram& diagram, std::size_t k_max,
                                          std::span<const double> grid, int dim) {
  const auto bars = finite_of_dim(diagram, dim);
  std::vector<double> out(k_max * grid.size(), 0.0);
  std::vector<double> tents;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double t = grid[g];
    tents.clear();
    for (const auto& b : bars) {
      const double v = std::min(t - b.birth, b.death - t);
      if (v > 0.0) tents.push_back(v);
    }
    const std::size_t take = std::min(k_max, tents.size());
    std::partial_sort(tents.begin(), tents.begin() + static_cast<std::ptrdiff_t>(take), tents.end(),
                      std::greater<>());
    for (std::size_t k = 0; k < take; ++k) out[k * grid.size() + g] = tents[k];
  }
  return out;
}

std::vector<double> entropy_summary(const PersistenceDiagram& diagram,
                                    std::span<const double> grid, int dim) {
  const auto bars = finite_of_dim(diagram, dim);
  std::vector<double> out(grid.size(), 0.0);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const double t = grid[g];
    double total = 0.0;
    for (const auto& b : bars)
      if (b.birth <= t && t < b.death) total += b.persistence();
    if (total <= 0.0) continue;
    double h = 0.0;
    for (const auto& b : bars)
      if (b.birth <= t && t < b.death) {
        const double p = b.persistence() / total;
        if (p > 0.0) h -= p * std::log(p);
      }
    out[g] = h;
  }
  return out;
}

std::vector<double> betti_curve(const PersistenceDiagram& diagram, std::span<const double> grid,
                                int dim) {
  std::vector<double> out(grid.size(), 0.0);
  for (std::size_t g = 0; g < grid.size(); ++g)
    for (const auto& f : diagram.features)
      if (f.dim == dim && f.birth <= grid[g] && grid[g] < f.death) out[g] += 1.0;
  return out;
}

}  // namespace tdaeeg::vec
