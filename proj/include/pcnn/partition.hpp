#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pcnn/matrix.hpp"
#include "pcnn/rng.hpp"

namespace pcnn {

/// Pairwise-distance statistics of a point set: delta_min is half the minimum
/// distance over distinct pairs, delta_bar the mean distance over ordered
/// distinct pairs. Zero-distance (duplicate) pairs are excluded from both.
struct PairStats {
  double delta_min = 0.0;
  double delta_bar = 0.0;
  std::size_t distinct_pairs = 0;  // ordered count
};

PairStats compute_pair_stats(const Matrix& points);
double delta_min(const Matrix& points);
double delta_bar(const Matrix& points);

/// Disjoint index sets covering a dataset, plus the draw that produced them.
struct DataPartition {
  std::vector<std::vector<std::size_t>> parts;
  std::vector<std::size_t> centers_order;  // the shuffle bijection used
  double alpha = 0.0;
  double delta_min = 0.0;
  double delta_bar = 0.0;
  double q = 0.0;
  std::size_t iterations = 0;  // greedy loop passes, final-dump included

  std::size_t n_parts() const { return parts.size(); }
};

/// Union of closed balls of ball_radius around a part's data points.
struct GeometricPart {
  Matrix anchor_points;
  double ball_radius = 0.0;
};

struct PartitionResult {
  DataPartition partition;
  std::vector<GeometricPart> geo_parts;
};

/// Greedy ball-growing pass with every random choice fixed by the caller:
/// walk the permutation, take the first remaining point as center, collect
/// remaining points strictly within alpha * delta_bar, and dump the rest into
/// a final part once the remaining fraction is <= q.
PartitionResult partition_with_alpha(const Matrix& points, const PairStats& stats,
                                     double q, double alpha,
                                     std::vector<std::size_t> perm);

/// Randomized partition: alpha uniform on [1/4, 1/2), a seeded uniform
/// shuffle, then partition_with_alpha. Requires >= 2 distinct rows and
/// 0 < q <= 1.
PartitionResult get_partition(const Matrix& points, double q, Rng& rng);

/// True iff some anchor lies within ball_radius of z.
bool part_membership(const GeometricPart& part, std::span<const double> z);

/// Monte-Carlo estimate of the probability that rows x1 and x2 of `points`
/// land in the same part, over `trials` independent partition draws.
double same_part_probability(const Matrix& points, std::size_t x1, std::size_t x2,
                             std::size_t trials, double q, Rng& rng);

void write_partition_csv(const DataPartition& partition, const std::string& path);
void write_geometric_parts_csv(const std::vector<GeometricPart>& parts,
                               const std::string& path);

}  // namespace pcnn
