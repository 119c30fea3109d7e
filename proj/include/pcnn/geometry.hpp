#pragma once

#include <functional>
#include <span>
#include <vector>

#include "pcnn/matrix.hpp"

namespace pcnn {

/// Finite stand-in for a nonempty compact set.
struct PointCloud {
  Matrix points;

  std::size_t size() const { return points.rows(); }
  std::size_t dim() const { return points.cols(); }
};

using VecFn = std::function<std::vector<double>(std::span<const double>)>;

/// One (subpattern, part) pair of a piecewise representation. A positive
/// ball_radius widens membership to "within ball_radius of some point";
/// radius zero means exact containment in the cloud.
struct PcPart {
  VecFn fn;
  PointCloud part;
  double ball_radius = 0.0;
};

/// Ordered list of (function, part) pairs; the declared length is the
/// representation's part count.
struct PcRepresentation {
  std::vector<PcPart> pairs;
  std::size_t output_dim = 1;

  std::size_t n_parts() const { return pairs.size(); }
};

/// Exact two-sided Hausdorff distance between finite clouds.
double hausdorff(const PointCloud& a, const PointCloud& b);

/// Max over the sample of ||f(x) - g(x)||; a finite-sample lower bound on the
/// true sup-norm distance.
double sup_norm_diff(const VecFn& f, const VecFn& g, const PointCloud& sample);

/// Representation distance: +infinity when part counts differ, otherwise the
/// max over matched pairs of max(sup-norm gap, Hausdorff gap).
double d_step1(const PcRepresentation& f, const PcRepresentation& g,
               const PointCloud& sample);

/// Decoupled bound: sum of per-part sup-norm gaps plus sum of per-part
/// Hausdorff gaps. Requires equal part counts.
double dpc_upper_bound(const PcRepresentation& target,
                       const PcRepresentation& candidate,
                       const PointCloud& sample);

/// Sum of fn(x) over the parts whose membership test passes; the zero vector
/// when none does.
std::vector<double> realize(const PcRepresentation& rep, std::span<const double> x);

PointCloud load_point_cloud_csv(const std::string& path);
void write_point_cloud_csv(const PointCloud& cloud, const std::string& path);

}  // namespace pcnn
