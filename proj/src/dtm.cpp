#include "tdaeeg/dtm.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "tdaeeg/error.hpp"

namespace tdaeeg::dtm {

void MassParams::validate(std::size_t cloud_size) const {
  if (q < 1 || static_cast<std::size_t>(q) > cloud_size)
    throw InvalidArgument("q must lie in [1, cloud size]");
  if (k < 1) throw InvalidArgument("k must be >= 1");
  if (static_cast<std::size_t>(k) > cloud_size)
    throw InvalidArgument("k = " + std::to_string(k) + " exceeds cloud size " +
                          std::to_string(cloud_size));
  if (iters < 0) throw InvalidArgument("iteration cap must be >= 0");
}

LocalMass local_mass(const PointCloud& cloud, std::span<const double> at, int q) {
  const std::size_t n = cloud.size();
  if (n == 0) throw InvalidArgument("empty cloud");
  if (q < 1 || static_cast<std::size_t>(q) > n) throw InvalidArgument("q must lie in [1, cloud size]");
  if (at.size() != cloud.dim) throw InvalidArgument("query dimension mismatch");

  std::vector<std::pair<double, std::size_t>> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = {squared_distance(at, cloud.point(i)), i};
  const auto qn = static_cast<std::size_t>(q);
  std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(qn - 1), d.end());

  LocalMass out;
  out.mean.assign(cloud.dim, 0.0);
  for (std::size_t j = 0; j < qn; ++j)
    for (std::size_t c = 0; c < cloud.dim; ++c) out.mean[c] += cloud.point(d[j].second)[c];
  for (auto& v : out.mean) v /= static_cast<double>(qn);
  for (std::size_t j = 0; j < qn; ++j) out.variance += squared_distance(out.mean, cloud.point(d[j].second));
  out.variance /= static_cast<double>(qn);
  return out;
}

double dtm(const PointCloud& cloud, std::span<const double> query, int q) {
  const auto mass = local_mass(cloud, query, q);
  return squared_distance(query, mass.mean) + mass.variance;
}

namespace {

double center_cost(const LocalMass& c, std::span<const double> x) {
  return squared_distance(x, c.mean) + c.variance;
}

double assign(const PointCloud& cloud, const std::vector<LocalMass>& centers,
              std::vector<std::size_t>& cell) {
  double total = 0.0;
  cell.resize(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t c = 0; c < centers.size(); ++c) {
      const double v = center_cost(centers[c], cloud.point(i));
      if (v < best) {
        best = v;
        arg = c;
      }
    }
    cell[i] = arg;
    total += best;
  }
  return total;
}

}  // namespace

FitResult kpdtm_fit(const PointCloud& cloud, const MassParams& params) {
  const std::size_t n = cloud.size();
  if (n == 0) throw InvalidArgument("empty cloud");
  params.validate(n);

  std::mt19937_64 rng(params.seed);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  // Partial Fisher-Yates: first k entries are a uniform k-subset.
  for (std::size_t i = 0; i < static_cast<std::size_t>(params.k); ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(order[i], order[pick(rng)]);
  }

  FitResult fit;
  fit.centers.dim = cloud.dim;
  for (std::size_t i = 0; i < static_cast<std::size_t>(params.k); ++i) {
    const auto p = cloud.point(order[i]);
    fit.seeds.emplace_back(p.begin(), p.end());
    fit.centers.centers.push_back(local_mass(cloud, p, params.q));
  }
  fit.objective.push_back(assign(cloud, fit.centers.centers, fit.assignment));

  std::vector<std::size_t> next;
  std::vector<double> sums;
  std::vector<std::size_t> counts;
  // A cell whose membership did not change keeps its seed and local mass.
  std::vector<char> dirty(fit.seeds.size(), 1);
  for (int it = 0; it < params.iters; ++it) {
    sums.assign(fit.seeds.size() * cloud.dim, 0.0);
    counts.assign(fit.seeds.size(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = fit.assignment[i];
      ++counts[c];
      for (std::size_t d = 0; d < cloud.dim; ++d) sums[c * cloud.dim + d] += cloud.point(i)[d];
    }
    for (std::size_t c = 0; c < fit.seeds.size(); ++c) {
      if (counts[c] == 0 || !dirty[c]) continue;  // empty cell keeps its centre
      for (std::size_t d = 0; d < cloud.dim; ++d)
        fit.seeds[c][d] = sums[c * cloud.dim + d] / static_cast<double>(counts[c]);
      fit.centers.centers[c] = local_mass(cloud, fit.seeds[c], params.q);
    }
    fit.objective.push_back(assign(cloud, fit.centers.centers, next));
    fit.iterations = it + 1;
    if (next == fit.assignment) {
      fit.converged = true;
      break;
    }
    std::fill(dirty.begin(), dirty.end(), 0);
    for (std::size_t i = 0; i < n; ++i)
      if (next[i] != fit.assignment[i]) dirty[next[i]] = dirty[fit.assignment[i]] = 1;
    fit.assignment.swap(next);
  }
  return fit;
}

double kpdtm_eval(const CenterSet& centers, std::span<const double> query) {
  if (centers.centers.empty()) throw InvalidArgument("empty centre set");
  if (query.size() != centers.dim) throw InvalidArgument("query dimension mismatch");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : centers.centers) best = std::min(best, center_cost(c, query));
  return best;
}

std::vector<double> kpdtm_scores(const CenterSet& centers, const PointCloud& cloud) {
  std::vector<double> out(cloud.size());
  for (std::size_t i = 0; i < cloud.size(); ++i) out[i] = kpdtm_eval(centers, cloud.point(i));
  return out;
}

std::vector<std::size_t> top_scores(std::span<const double> scores, std::size_t keep_n) {
  std::vector<std::size_t> idx(scores.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  idx.resize(std::min(keep_n, idx.size()));
  std::sort(idx.begin(), idx.end());
  return idx;
}

namespace {

PointCloud take(const PointCloud& cloud, const std::vector<std::size_t>& keep) {
  PointCloud out;
  out.dim = cloud.dim;
  for (auto i : keep) {
    const auto p = cloud.point(i);
    out.coords.insert(out.coords.end(), p.begin(), p.end());
    if (!cloud.time_index.empty()) out.time_index.push_back(cloud.time_index[i]);
  }
  return out;
}

}  // namespace

PointCloud prune_cloud(const PointCloud& cloud, const MassParams& params, int keep_n) {
  if (keep_n <= 0) throw InvalidArgument("keep_n must be positive");
  if (static_cast<std::size_t>(keep_n) > cloud.size())
    throw InvalidArgument("keep_n = " + std::to_string(keep_n) + " exceeds cloud size " +
                          std::to_string(cloud.size()));
  if (static_cast<std::size_t>(keep_n) == cloud.size()) return cloud;
  const auto fit = kpdtm_fit(cloud, params);
  const auto scores = kpdtm_scores(fit.centers, cloud);
  return take(cloud, top_scores(scores, static_cast<std::size_t>(keep_n)));
}

PointCloud remap_multichannel(std::span<const PointCloud> channels, const MassParams& params,
                              int keep_n) {
  if (channels.empty()) throw InvalidArgument("no channel clouds");
  if (keep_n <= 0) throw InvalidArgument("keep_n must be positive");
  const auto& ref = channels.front();
  const std::size_t n = ref.size();
  for (const auto& ch : channels) {
    if (ch.time_index.size() != ch.size() || ch.time_index != ref.time_index)
      throw InvalidArgument("channel clouds have mismatched time_index sets");
  }
  if (static_cast<std::size_t>(keep_n) > n)
    throw InvalidArgument("keep_n = " + std::to_string(keep_n) + " exceeds cloud size " +
                          std::to_string(n));

  std::vector<double> score(n, 0.0);
  for (const auto& ch : channels) {
    const auto fit = kpdtm_fit(ch, params);
    const auto s = kpdtm_scores(fit.centers, ch);
    for (std::size_t i = 0; i < n; ++i) score[i] += s[i];
  }
  for (auto& v : score) v /= static_cast<double>(channels.size());
  const auto keep = top_scores(score, static_cast<std::size_t>(keep_n));

  PointCloud out;
  for (const auto& ch : channels) out.dim += ch.dim;
  for (auto i : keep) {
    for (const auto& ch : channels) {
      const auto p = ch.point(i);
      out.coords.insert(out.coords.end(), p.begin(), p.end());
    }
    out.time_index.push_back(ref.time_index[i]);
  }
  return out;
}

}  // namespace tdaeeg::dtm
