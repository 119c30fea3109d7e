#include "pcnn/geometry.hpp"

#include "pcnn/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace pcnn {

namespace {

// sup over rows of a of the distance to the nearest row of b.
double directed_hausdorff(const Matrix& a, const Matrix& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b.rows(); ++j)
      nearest = std::min(nearest, squared_distance(a.row(i), b.row(j)));
    worst = std::max(worst, nearest);
  }
  return std::sqrt(worst);
}

bool cloud_contains(const PointCloud& cloud, std::span<const double> x, double radius) {
  const double r_sq = radius * radius;
  for (std::size_t i = 0; i < cloud.points.rows(); ++i)
    if (squared_distance(cloud.points.row(i), x) <= r_sq) return true;
  return false;
}

}  // namespace

double hausdorff(const PointCloud& a, const PointCloud& b) {
  if (a.size() == 0 || b.size() == 0)
    throw std::invalid_argument("hausdorff: empty point cloud");
  if (a.dim() != b.dim())
    throw std::invalid_argument("hausdorff: dimension mismatch");
  return std::max(directed_hausdorff(a.points, b.points),
                  directed_hausdorff(b.points, a.points));
}

double sup_norm_diff(const VecFn& f, const VecFn& g, const PointCloud& sample) {
  double worst = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto x = sample.points.row(i);
    const auto fx = f(x);
    const auto gx = g(x);
    if (fx.size() != gx.size())
      throw std::invalid_argument("sup_norm_diff: output dimension mismatch");
    double sq = 0.0;
    for (std::size_t j = 0; j < fx.size(); ++j) {
      const double d = fx[j] - gx[j];
      sq += d * d;
    }
    worst = std::max(worst, sq);
  }
  return std::sqrt(worst);
}

double d_step1(const PcRepresentation& f, const PcRepresentation& g,
               const PointCloud& sample) {
  if (f.n_parts() != g.n_parts())
    return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t n = 0; n < f.n_parts(); ++n) {
    worst = std::max(worst, sup_norm_diff(f.pairs[n].fn, g.pairs[n].fn, sample));
    worst = std::max(worst, hausdorff(f.pairs[n].part, g.pairs[n].part));
  }
  return worst;
}

double dpc_upper_bound(const PcRepresentation& target,
                       const PcRepresentation& candidate,
                       const PointCloud& sample) {
  if (target.n_parts() != candidate.n_parts())
    throw std::invalid_argument("dpc_upper_bound: representations must have equal length");
  double sup_sum = 0.0, haus_sum = 0.0;
  for (std::size_t n = 0; n < target.n_parts(); ++n) {
    sup_sum += sup_norm_diff(target.pairs[n].fn, candidate.pairs[n].fn, sample);
    haus_sum += hausdorff(target.pairs[n].part, candidate.pairs[n].part);
  }
  return sup_sum + haus_sum;
}

std::vector<double> realize(const PcRepresentation& rep, std::span<const double> x) {
  std::vector<double> out(rep.output_dim, 0.0);
  for (const auto& pair : rep.pairs) {
    if (x.size() != pair.part.dim())
      throw std::invalid_argument("realize: dimension mismatch");
    if (!cloud_contains(pair.part, x, pair.ball_radius)) continue;
    const auto fx = pair.fn(x);
    if (fx.size() != out.size())
      throw std::invalid_argument("realize: function output dim mismatch");
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += fx[j];
  }
  return out;
}

PointCloud load_point_cloud_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileError("cannot open: " + path);
  std::vector<double> data;
  std::size_t rows = 0, cols = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    std::size_t c = 0;
    while (std::getline(ss, cell, ',')) {
      data.push_back(std::stod(cell));
      ++c;
    }
    if (cols == 0) cols = c;
    if (c != cols) throw std::runtime_error("ragged CSV row in " + path);
    ++rows;
  }
  if (rows == 0) throw std::runtime_error("empty point cloud file: " + path);
  return {Matrix::from_data(rows, cols, std::move(data))};
}

void write_point_cloud_csv(const PointCloud& cloud, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw FileError("cannot open for writing: " + path);
  char buf[64];
  for (std::size_t i = 0; i < cloud.points.rows(); ++i) {
    for (std::size_t j = 0; j < cloud.points.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", cloud.points(i, j));
      out << (j ? "," : "") << buf;
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace pcnn
