#pragma once

#include <span>
#include <vector>

#include "tdaeeg/types.hpp"

namespace tdaeeg::embed {

struct EmbeddingParams {
  int m = 2;    // embedding dimension
  int tau = 10; // delay in samples

  void validate() const;
  // Number of embedding vectors a series of length n yields.
  std::ptrdiff_t points_for(std::size_t n) const noexcept {
    return static_cast<std::ptrdiff_t>(n) - static_cast<std::ptrdiff_t>(m - 1) * tau;
  }
};

// MI (nats) between x_t and x_{t+lag} for lag = 1..max_lag, from an
// equal-width joint histogram over the series range. Entry i is lag i+1.
std::vector<double> average_mutual_information(std::span<const double> series, int max_lag,
                                               int bins = 16);

// Smallest lag at a (possibly flat) local minimum of an MI curve indexed from
// lag 1. Falls back to the last lag.
int first_minimum_lag(std::span<const double> mi);

// Kennel false-nearest-neighbour fraction for m = 1..m_max. Entry i is m = i+1.
std::vector<double> false_nearest_neighbors(std::span<const double> series, int tau, int m_max,
                                            double rtol = 10.0, double atol = 2.0);

// Smallest m whose FNN fraction is below `threshold`; m_max otherwise.
int choose_dimension(std::span<const double> fnn, double threshold);

struct EstimationOptions {
  int max_lag = 30;
  int bins = 16;
  int m_max = 6;
  double rtol = 10.0;
  double atol = 2.0;
  double fnn_threshold = 0.1;
};

struct ChannelEstimate {
  std::vector<double> ami;  // averaged over the supplied segments
  std::vector<double> fnn;
  int tau = 1;
  int m = 1;
};

struct Estimate {
  EmbeddingParams params;
  std::vector<ChannelEstimate> channels;
};

// Multichannel rule: per channel, average AMI and FNN curves over all
// supplied segments and pick (tau, m); the shared parameters are the maxima
// over channels. `segments[s][c]` is channel c of segment s.
Estimate estimate_params(const std::vector<std::vector<std::span<const double>>>& segments,
                         const EstimationOptions& opts);

// Backward-delay embedding: point j is (x_j, x_{j-tau}, ..., x_{j-(m-1)tau})
// with time_index j, for j = (m-1)tau .. N-1.
PointCloud delay_embed(std::span<const double> series, const EmbeddingParams& params);

}  // namespace tdaeeg::embed
