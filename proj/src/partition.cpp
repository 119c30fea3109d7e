#include "pcnn/partition.hpp"

#include "pcnn/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>

namespace pcnn {

PairStats compute_pair_stats(const Matrix& points) {
  const std::size_t n = points.rows();
  if (n < 2)
    throw std::invalid_argument("pair stats: need at least 2 rows");
  double min_sq = std::numeric_limits<double>::infinity();
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double sq = squared_distance(points.row(i), points.row(j));
      if (sq == 0.0) continue;  // duplicates do not count as distinct pairs
      min_sq = std::min(min_sq, sq);
      sum += std::sqrt(sq);
      ++pairs;
    }
  }
  if (pairs == 0)
    throw std::invalid_argument("pair stats: fewer than 2 distinct points");
  PairStats s;
  s.delta_min = 0.5 * std::sqrt(min_sq);
  s.delta_bar = sum / static_cast<double>(pairs);  // ordered mean == unordered mean
  s.distinct_pairs = 2 * pairs;
  return s;
}

double delta_min(const Matrix& points) { return compute_pair_stats(points).delta_min; }
double delta_bar(const Matrix& points) { return compute_pair_stats(points).delta_bar; }

PartitionResult partition_with_alpha(const Matrix& points, const PairStats& stats,
                                     double q, double alpha,
                                     std::vector<std::size_t> perm) {
  const std::size_t n = points.rows();
  if (!(q > 0.0 && q <= 1.0))
    throw std::invalid_argument("partition: q must be in (0, 1]");
  if (perm.size() != n)
    throw std::invalid_argument("partition: permutation length mismatch");

  const double radius = alpha * stats.delta_bar;
  PartitionResult result;
  DataPartition& p = result.partition;
  p.centers_order = perm;
  p.alpha = alpha;
  p.delta_min = stats.delta_min;
  p.delta_bar = stats.delta_bar;
  p.q = q;

  std::vector<std::size_t> remaining = std::move(perm);
  while (!remaining.empty()) {
    ++p.iterations;
    const auto center = points.row(remaining.front());
    std::vector<std::size_t> part, rest;
    for (auto idx : remaining) {
      if (euclidean_distance(points.row(idx), center) < radius)
        part.push_back(idx);
      else
        rest.push_back(idx);
    }
    p.parts.push_back(std::move(part));  // center captures itself: nonempty
    remaining = std::move(rest);
    if (static_cast<double>(remaining.size()) / static_cast<double>(n) <= q) {
      if (!remaining.empty()) {
        ++p.iterations;
        p.parts.push_back(std::move(remaining));
        remaining.clear();
      }
      break;
    }
  }

  result.geo_parts.reserve(p.parts.size());
  for (const auto& part : p.parts) {
    GeometricPart g;
    g.anchor_points = points.select_rows(part);
    g.ball_radius = stats.delta_min;
    result.geo_parts.push_back(std::move(g));
  }
  return result;
}

PartitionResult get_partition(const Matrix& points, double q, Rng& rng) {
  const PairStats stats = compute_pair_stats(points);  // rejects degenerate data
  const double alpha = sample_uniform(rng, 0.25, 0.5);
  std::vector<std::size_t> perm(points.rows());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  shuffle_indices(perm, rng);
  return partition_with_alpha(points, stats, q, alpha, std::move(perm));
}

bool part_membership(const GeometricPart& part, std::span<const double> z) {
  if (z.size() != part.anchor_points.cols())
    throw std::invalid_argument("part_membership: dimension mismatch");
  const double r_sq = part.ball_radius * part.ball_radius;
  for (std::size_t i = 0; i < part.anchor_points.rows(); ++i)
    if (squared_distance(part.anchor_points.row(i), z) <= r_sq) return true;
  return false;
}

double same_part_probability(const Matrix& points, std::size_t x1, std::size_t x2,
                             std::size_t trials, double q, Rng& rng) {
  if (trials == 0) throw std::invalid_argument("same_part_probability: trials >= 1");
  const std::uint64_t base = rng.next_u64();
  std::size_t hits = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng trial_rng(derive_seed(base, t));
    const auto result = get_partition(points, q, trial_rng);
    for (const auto& part : result.partition.parts) {
      bool has1 = false, has2 = false;
      for (auto idx : part) {
        has1 |= idx == x1;
        has2 |= idx == x2;
      }
      if (has1) {
        if (has2) ++hits;
        break;
      }
    }
  }
  return static_cast<double>(hits) / static_cast<double>(trials);
}

void write_partition_csv(const DataPartition& partition, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FileError("cannot open for writing: " + path);
  out << "row_index,part_id\n";
  for (std::size_t p = 0; p < partition.parts.size(); ++p)
    for (auto idx : partition.parts[p]) out << idx << "," << p << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_geometric_parts_csv(const std::vector<GeometricPart>& parts,
                               const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FileError("cannot open for writing: " + path);
  const double radius = parts.empty() ? 0.0 : parts.front().ball_radius;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", radius);
  out << "# radius=" << buf << "\n";
  out << "part_id";
  const std::size_t dim = parts.empty() ? 0 : parts.front().anchor_points.cols();
  for (std::size_t j = 0; j < dim; ++j) out << ",x" << j;
  out << "\n";
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const Matrix& a = parts[p].anchor_points;
    for (std::size_t i = 0; i < a.rows(); ++i) {
      out << p;
      for (std::size_t j = 0; j < a.cols(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g", a(i, j));
        out << "," << buf;
      }
      out << "\n";
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace pcnn
