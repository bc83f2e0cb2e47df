#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tdaeeg/types.hpp"

namespace tdaeeg::dtm {

struct MassParams {
  int q = 10;            // nearest-neighbour mass count
  int k = 350;           // number of approximation centres
  int iters = 50;        // Lloyd iteration cap
  std::uint64_t seed = 0;

  void validate(std::size_t cloud_size) const;
};

// Centroid and mean squared deviation of the q nearest cloud points of some
// location. Ties at the q-th neighbour go to the lower point index.
struct LocalMass {
  std::vector<double> mean;
  double variance = 0.0;
};

LocalMass local_mass(const PointCloud& cloud, std::span<const double> at, int q);

// ||x - m(x)||^2 + v(x): the squared distance-to-measure of `query`.
double dtm(const PointCloud& cloud, std::span<const double> query, int q);

struct CenterSet {
  std::size_t dim = 0;
  std::vector<LocalMass> centers;

  std::size_t size() const noexcept { return centers.size(); }
};

struct FitResult {
  CenterSet centers;
  std::vector<std::vector<double>> seeds;  // final c_i locations
  std::vector<std::size_t> assignment;     // cell of every cloud point
  std::vector<double> objective;           // after init, then after every iteration
  int iterations = 0;
  bool converged = false;
};

// Lloyd-style alternating minimisation of
//   sum_X min_i ||X - m(c_i)||^2 + v(c_i).
FitResult kpdtm_fit(const PointCloud& cloud, const MassParams& params);

// min_i ||query - mean_i||^2 + variance_i
double kpdtm_eval(const CenterSet& centers, std::span<const double> query);

std::vector<double> kpdtm_scores(const CenterSet& centers, const PointCloud& cloud);

// Indices of the keep_n largest scores, returned in increasing order. Equal
// scores prefer the earlier index.
std::vector<std::size_t> top_scores(std::span<const double> scores, std::size_t keep_n);

// Drops the densest points (smallest k-PDTM values) and keeps keep_n points
// in their original order.
PointCloud prune_cloud(const PointCloud& cloud, const MassParams& params, int keep_n);

// Joint pruning across channels sharing one time_index set: the score of a
// time index is the mean of the per-channel k-PDTM values, and each retained
// point concatenates the channel coordinates.
PointCloud remap_multichannel(std::span<const PointCloud> channels, const MassParams& params,
                              int keep_n);

}  // namespace tdaeeg::dtm
