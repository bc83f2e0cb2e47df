#include "tdaeeg/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tdaeeg/error.hpp"

namespace tdaeeg::embed {

void EmbeddingParams::validate() const {
  if (m < 1) throw InvalidArgument("embedding dimension must be >= 1");
  if (tau < 1) throw InvalidArgument("embedding delay must be >= 1");
}

namespace {

std::pair<double, double> range_of(std::span<const double> series) {
  const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
  if (!(*hi > *lo)) throw DomainError("degenerate series (zero range)");
  return {*lo, *hi};
}

}  // namespace

std::vector<double> average_mutual_information(std::span<const double> series, int max_lag,
                                               int bins) {
  if (bins < 2) throw InvalidArgument("AMI needs at least two bins");
  if (max_lag < 1) throw InvalidArgument("max_lag must be >= 1");
  if (series.size() <= static_cast<std::size_t>(max_lag) + 1)
    throw InvalidArgument("series too short for the requested max_lag");
  const auto [lo, hi] = range_of(series);

  const double width = (hi - lo) / bins;
  std::vector<int> bin(series.size());
  for (std::size_t t = 0; t < series.size(); ++t)
    bin[t] = std::min(bins - 1, static_cast<int>((series[t] - lo) / width));

  std::vector<double> mi(static_cast<std::size_t>(max_lag));
  std::vector<double> joint(static_cast<std::size_t>(bins * bins));
  std::vector<double> pa(static_cast<std::size_t>(bins)), pb(static_cast<std::size_t>(bins));
  for (int lag = 1; lag <= max_lag; ++lag) {
    std::fill(joint.begin(), joint.end(), 0.0);
    const std::size_t pairs = series.size() - static_cast<std::size_t>(lag);
    for (std::size_t t = 0; t < pairs; ++t) joint[bin[t] * bins + bin[t + lag]] += 1.0;
    std::fill(pa.begin(), pa.end(), 0.0);
    std::fill(pb.begin(), pb.end(), 0.0);
    for (int i = 0; i < bins; ++i)
      for (int j = 0; j < bins; ++j) {
        pa[i] += joint[i * bins + j];
        pb[j] += joint[i * bins + j];
      }
    double sum = 0.0;
    const double total = static_cast<double>(pairs);
    for (int i = 0; i < bins; ++i)
      for (int j = 0; j < bins; ++j) {
        const double c = joint[i * bins + j];
        if (c > 0) sum += c / total * std::log(c * total / (pa[i] * pb[j]));
      }
    mi[static_cast<std::size_t>(lag - 1)] = std::max(0.0, sum);
  }
  return mi;
}

int first_minimum_lag(std::span<const double> mi) {
  if (mi.size() < 2) throw InvalidArgument("MI curve needs at least two lags");
  const std::size_t n = mi.size();
  for (std::size_t i = 0; i < n; ++i) {
    const bool left_ok = i == 0 || mi[i] < mi[i - 1];
    const bool right_ok = i + 1 == n || mi[i] <= mi[i + 1];
    if (left_ok && right_ok) return static_cast<int>(i + 1);
  }
  return static_cast<int>(n);
}

std::vector<double> false_nearest_neighbors(std::span<const double> series, int tau, int m_max,
                                            double rtol, double atol) {
  if (tau < 1 || m_max < 1) throw InvalidArgument("FNN needs tau >= 1 and m_max >= 1");
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(series.size());
  if (n - static_cast<std::ptrdiff_t>(m_max) * tau < 2)
    throw InvalidArgument("series too short to embed at m_max + 1");
  range_of(series);

  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : series) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(n));
  const double tiny = 1e-9 * sd;

  std::vector<double> out;
  for (int m = 1; m <= m_max; ++m) {
    // Points that also own the (m+1)-th coordinate x_{t - m*tau}.
    const std::ptrdiff_t first = static_cast<std::ptrdiff_t>(m) * tau;
    const std::ptrdiff_t count = n - first;
    auto dist2 = [&](std::ptrdiff_t a, std::ptrdiff_t b) {
      double s = 0.0;
      for (int k = 0; k < m; ++k) {
        const double d = series[a - k * tau] - series[b - k * tau];
        s += d * d;
      }
      return s;
    };
    std::size_t false_count = 0;
    for (std::ptrdiff_t i = first; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      std::ptrdiff_t nn = -1;
      for (std::ptrdiff_t j = first; j < n; ++j) {
        if (j == i) continue;
        const double d = dist2(i, j);
        if (d < best) {
          best = d;
          nn = j;
        }
      }
      const double rm = std::sqrt(best);
      const double extra = std::abs(series[i - first] - series[nn - first]);
      // Repeated states of an exactly periodic series differ only by rounding.
      const bool ratio_false = rm > tiny ? extra / rm > rtol : extra > tiny;
      const bool size_false = std::sqrt(best + extra * extra) / sd > atol;
      if (ratio_false || size_false) ++false_count;
    }
    out.push_back(static_cast<double>(false_count) / static_cast<double>(count));
  }
  return out;
}

int choose_dimension(std::span<const double> fnn, double threshold) {
  for (std::size_t i = 0; i < fnn.size(); ++i)
    if (fnn[i] < threshold) return static_cast<int>(i + 1);
  return static_cast<int>(fnn.size());
}

Estimate estimate_params(const std::vector<std::vector<std::span<const double>>>& segments,
                         const EstimationOptions& opts) {
  if (segments.empty() || segments.front().empty())
    throw InvalidArgument("parameter estimation needs at least one segment and channel");
  const std::size_t channels = segments.front().size();
  Estimate est;
  est.params.m = 1;
  est.params.tau = 1;
  for (std::size_t c = 0; c < channels; ++c) {
    ChannelEstimate ce;
    ce.ami.assign(static_cast<std::size_t>(opts.max_lag), 0.0);
    std::size_t used = 0;
    for (const auto& seg : segments) {
      if (seg.size() != channels) throw InvalidArgument("segments disagree on channel count");
      std::vector<double> ami;
      try {
        ami = average_mutual_information(seg[c], opts.max_lag, opts.bins);
      } catch (const DomainError&) {
        continue;  // flat segment carries no delay information
      }
      for (std::size_t i = 0; i < ami.size(); ++i) ce.ami[i] += ami[i];
      ++used;
    }
    if (used == 0) throw DomainError("degenerate series on every segment of channel " +
                                     std::to_string(c));
    for (auto& v : ce.ami) v /= static_cast<double>(used);
    ce.tau = first_minimum_lag(ce.ami);

    ce.fnn.assign(static_cast<std::size_t>(opts.m_max), 0.0);
    used = 0;
    for (const auto& seg : segments) {
      std::vector<double> fnn;
      try {
        fnn = false_nearest_neighbors(seg[c], ce.tau, opts.m_max, opts.rtol, opts.atol);
      } catch (const DomainError&) {
        continue;
      }
      for (std::size_t i = 0; i < fnn.size(); ++i) ce.fnn[i] += fnn[i];
      ++used;
    }
    for (auto& v : ce.fnn) v /= static_cast<double>(std::max<std::size_t>(used, 1));
    ce.m = choose_dimension(ce.fnn, opts.fnn_threshold);

    est.params.tau = std::max(est.params.tau, ce.tau);
    est.params.m = std::max(est.params.m, ce.m);
    est.channels.push_back(std::move(ce));
  }
  return est;
}

PointCloud delay_embed(std::span<const double> series, const EmbeddingParams& params) {
  params.validate();
  const std::ptrdiff_t count = params.points_for(series.size());
  if (count < 1) throw InvalidArgument("series too short for the embedding parameters");
  PointCloud cloud;
  cloud.dim = static_cast<std::size_t>(params.m);
  cloud.coords.reserve(static_cast<std::size_t>(count) * cloud.dim);
  cloud.time_index.reserve(static_cast<std::size_t>(count));
  const std::ptrdiff_t first = static_cast<std::ptrdiff_t>(params.m - 1) * params.tau;
  for (std::ptrdiff_t j = first; j < static_cast<std::ptrdiff_t>(series.size()); ++j) {
    for (int k = 0; k < params.m; ++k) cloud.coords.push_back(series[j - k * params.tau]);
    cloud.time_index.push_back(j);
  }
  return cloud;
}

}  // namespace tdaeeg::embed
