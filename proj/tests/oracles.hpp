// Independent reference computations for the test suites. Nothing here calls
// into the library's algorithms.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

namespace oracle {

using Points = std::vector<std::vector<double>>;

inline double dist2(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

inline Points random_points(std::mt19937_64& rng, std::size_t n, std::size_t d) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Points p(n, std::vector<double>(d));
  for (auto& x : p)
    for (auto& v : x) v = u(rng);
  return p;
}

// Euclidean MST edge weights by Prim's algorithm on the dense graph.
inline std::vector<double> prim_mst(const Points& p) {
  const std::size_t n = p.size();
  std::vector<double> best(n, std::numeric_limits<double>::infinity()), out;
  std::vector<char> in(n, 0);
  if (n == 0) return out;
  best[0] = 0;
  for (std::size_t it = 0; it < n; ++it) {
    std::size_t u = n;
    for (std::size_t v = 0; v < n; ++v)
      if (!in[v] && (u == n || best[v] < best[u])) u = v;
    in[u] = 1;
    if (it > 0) out.push_back(best[u]);
    for (std::size_t v = 0; v < n; ++v)
      if (!in[v]) best[v] = std::min(best[v], std::sqrt(dist2(p[u], p[v])));
  }
  std::sort(out.begin(), out.end());
  return out;
}

// DTM by full sort of the distances; ties go to the lower index.
inline double dtm(const Points& cloud, const std::vector<double>& x, int q) {
  std::vector<std::pair<double, std::size_t>> d;
  for (std::size_t i = 0; i < cloud.size(); ++i) d.push_back({dist2(cloud[i], x), i});
  std::sort(d.begin(), d.end());
  std::vector<double> m(x.size(), 0.0);
  for (int j = 0; j < q; ++j)
    for (std::size_t c = 0; c < x.size(); ++c) m[c] += cloud[d[static_cast<std::size_t>(j)].second][c] / q;
  double v = 0;
  for (int j = 0; j < q; ++j) v += dist2(cloud[d[static_cast<std::size_t>(j)].second], m) / q;
  return dist2(x, m) + v;
}

// MI in nats of (x_t, x_{t+lag}) from an equal-width histogram, computed
// with a map of occupied cells.
inline double mutual_information(const std::vector<double>& x, int lag, int bins) {
  const double lo = *std::min_element(x.begin(), x.end());
  const double hi = *std::max_element(x.begin(), x.end());
  auto bin = [&](double v) {
    int b = static_cast<int>((v - lo) / (hi - lo) * bins);
    return std::clamp(b, 0, bins - 1);
  };
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> px, py;
  const std::size_t n = x.size() - static_cast<std::size_t>(lag);
  for (std::size_t t = 0; t < n; ++t) {
    const int a = bin(x[t]), b = bin(x[t + static_cast<std::size_t>(lag)]);
    joint[{a, b}] += 1.0 / static_cast<double>(n);
    px[a] += 1.0 / static_cast<double>(n);
    py[b] += 1.0 / static_cast<double>(n);
  }
  double mi = 0;
  for (const auto& [ab, p] : joint) mi += p * std::log(p / (px[ab.first] * py[ab.second]));
  return mi;
}

// |H(f)| of a digital Butterworth band-pass built from an order/2 analog
// low-pass prototype by the band transform and the bilinear map with
// pre-warped edges.
inline double butterworth_bandpass_gain(double f, double low, double high, int order, double rate) {
  auto warp = [&](double hz) { return std::tan(std::numbers::pi * hz / rate); };
  const double wl = warp(low), wh = warp(high), w = warp(f);
  const double w0sq = wl * wh, bw = wh - wl;
  const double wp = (w * w - w0sq) / (w * bw);
  return 1.0 / std::sqrt(1.0 + std::pow(wp * wp, order / 2));
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i] / n;
    mb += b[i] / n;
  }
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

// Midpoint-rule integral of a 2-D isotropic Gaussian of mass w over a box.
inline double gaussian_box_mass(double w, double mx, double my, double sigma, double x0, double x1, double y0,
                                double y1, int steps = 400) {
  const double hx = (x1 - x0) / steps, hy = (y1 - y0) / steps;
  double s = 0;
  for (int i = 0; i < steps; ++i)
    for (int j = 0; j < steps; ++j) {
      const double x = x0 + (i + 0.5) * hx, y = y0 + (j + 0.5) * hy;
      s += std::exp(-((x - mx) * (x - mx) + (y - my) * (y - my)) / (2 * sigma * sigma));
    }
  return w * s * hx * hy / (2 * std::numbers::pi * sigma * sigma);
}

// 2-D Gaussian density with covariance cov at x.
inline double gaussian_pdf2(double x, double y, double mx, double my, double sxx, double sxy, double syy) {
  const double det = sxx * syy - sxy * sxy;
  const double dx = x - mx, dy = y - my;
  const double q = (syy * dx * dx - 2 * sxy * dx * dy + sxx * dy * dy) / det;
  return std::exp(-0.5 * q) / (2 * std::numbers::pi * std::sqrt(det));
}

// Greedy bottleneck-style matching cost between two finite bar lists: bars
// sorted by persistence are paired in order, surplus bars pay half their
// length. An upper bound on the bottleneck distance.
inline double greedy_match_cost(std::vector<std::pair<double, double>> a, std::vector<std::pair<double, double>> b) {
  auto by_pers = [](const auto& x, const auto& y) { return x.second - x.first > y.second - y.first; };
  std::sort(a.begin(), a.end(), by_pers);
  std::sort(b.begin(), b.end(), by_pers);
  double cost = 0;
  const std::size_t m = std::min(a.size(), b.size());
  for (std::size_t i = 0; i < m; ++i)
    cost = std::max(cost, std::max(std::abs(a[i].first - b[i].first), std::abs(a[i].second - b[i].second)));
  for (std::size_t i = m; i < a.size(); ++i) cost = std::max(cost, (a[i].second - a[i].first) / 2);
  for (std::size_t i = m; i < b.size(); ++i) cost = std::max(cost, (b[i].second - b[i].first) / 2);
  return cost;
}

}  // namespace oracle
