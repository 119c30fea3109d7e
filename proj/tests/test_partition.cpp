#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <tuple>

#include "pcnn/partition.hpp"

using namespace pcnn;

namespace {

Matrix random_points(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  Matrix pts(n, d);
  for (std::size_t i = 0; i < pts.size(); ++i) pts.data()[i] = rng.next_double();
  return pts;
}

bool disjoint_and_covering(const DataPartition& p, std::size_t n) {
  std::set<std::size_t> seen;
  for (const auto& part : p.parts) {
    if (part.empty()) return false;
    for (auto idx : part)
      if (!seen.insert(idx).second) return false;  // overlap
  }
  return seen.size() == n;
}

}  // namespace

TEST_CASE("delta_min: enumerated pair oracles") {
  // {0, 1, 10}: min distance 1, halved.
  CHECK(delta_min(Matrix::from_rows({{0}, {1}, {10}})) == doctest::Approx(0.5));
  // {(0,0), (3,4)}: single pair at distance 5.
  CHECK(delta_min(Matrix::from_rows({{0, 0}, {3, 4}})) == doctest::Approx(2.5));
  // Duplicate rows are not distinct pairs.
  CHECK(delta_min(Matrix::from_rows({{0}, {0}, {1}})) == doctest::Approx(0.5));

  CHECK_THROWS_AS(delta_min(Matrix::from_rows({{1}})), std::invalid_argument);
  CHECK_THROWS_AS(delta_min(Matrix::from_rows({{1}, {1}})), std::invalid_argument);
}

TEST_CASE("delta_bar: ordered-pair means") {
  CHECK(delta_bar(Matrix::from_rows({{0}, {1}, {10}})) == doctest::Approx(20.0 / 3.0));
  CHECK(delta_bar(Matrix::from_rows({{0}, {2}})) == doctest::Approx(2.0));
  CHECK(delta_bar(Matrix::from_rows({{0}, {1}, {2}})) == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("get_partition: hand-simulated run with forced alpha and order") {
  // Points {0, 1, 10}; alpha=0.3 gives radius 0.3 * (20/3) = 2.0. Greedy from
  // center 0 collects {0, 1} (distances 0, 1 < 2) and leaves {10} as its own
  // part once the q rule fires.
  const Matrix pts = Matrix::from_rows({{0}, {1}, {10}});
  const PairStats stats = compute_pair_stats(pts);
  auto result = partition_with_alpha(pts, stats, 0.01, 0.3, {0, 1, 2});
  REQUIRE(result.partition.n_parts() == 2);
  CHECK(result.partition.parts[0] == std::vector<std::size_t>{0, 1});
  CHECK(result.partition.parts[1] == std::vector<std::size_t>{2});
  CHECK(result.geo_parts.size() == 2);
  CHECK(result.geo_parts[0].ball_radius == doctest::Approx(0.5));
  CHECK(result.geo_parts[0].anchor_points.rows() == 2);

  // q = 1: the stopping rule fires right after the first part, dumping the
  // leftovers into one final part.
  auto q1 = partition_with_alpha(pts, stats, 1.0, 0.3, {0, 1, 2});
  REQUIRE(q1.partition.n_parts() == 2);
  CHECK(q1.partition.parts[0] == std::vector<std::size_t>{0, 1});
  CHECK(q1.partition.parts[1] == std::vector<std::size_t>{2});

  // Same but starting from the far point: its ball holds only itself.
  auto far_first = partition_with_alpha(pts, stats, 1.0, 0.3, {2, 0, 1});
  REQUIRE(far_first.partition.n_parts() == 2);
  CHECK(far_first.partition.parts[0] == std::vector<std::size_t>{2});
}

TEST_CASE("get_partition: separated clusters never share a part") {
  // Two tight clusters 10 apart; delta_bar ~ 5, so the radius is at most
  // ~2.5 < the gap for every alpha <= 1/2.
  Rng gen(1);
  Matrix pts(20, 2);
  for (std::size_t i = 0; i < 10; ++i) {
    pts(i, 0) = 0.1 * sample_uniform(gen, 0, 1);
    pts(i, 1) = 0.1 * sample_uniform(gen, 0, 1);
    pts(i + 10, 0) = 10.0 + 0.1 * sample_uniform(gen, 0, 1);
    pts(i + 10, 1) = 0.1 * sample_uniform(gen, 0, 1);
  }
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    const auto result = get_partition(pts, 0.01, rng);
    for (const auto& part : result.partition.parts) {
      bool left = false, right = false;
      for (auto idx : part) (idx < 10 ? left : right) = true;
      CHECK(!(left && right));
    }
  }
}

TEST_CASE("get_partition: degenerate and invalid inputs") {
  Rng rng(2);
  CHECK_THROWS_AS(get_partition(Matrix::from_rows({{1}, {1}, {1}}), 0.5, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(get_partition(Matrix::from_rows({{1}, {2}}), 0.0, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(get_partition(Matrix::from_rows({{1}, {2}}), 1.5, rng),
                  std::invalid_argument);
}

TEST_CASE("part_membership distance checks") {
  GeometricPart part{Matrix::from_rows({{0.0}}), 0.5};
  CHECK(part_membership(part, std::vector<double>{0.4}));
  CHECK(!part_membership(part, std::vector<double>{0.6}));

  GeometricPart two{Matrix::from_rows({{0.0}, {1.0}}), 0.5};
  CHECK(part_membership(two, std::vector<double>{0.75}));
  CHECK_THROWS_AS(part_membership(two, std::vector<double>{0.1, 0.2}),
                  std::invalid_argument);
}

TEST_CASE("partition properties over many randomized runs") {
  const Matrix pts = random_points(200, 2, 3);
  const PairStats stats = compute_pair_stats(pts);
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    Rng rng(seed);
    const auto result = get_partition(pts, 0.2, rng);
    const auto& p = result.partition;
    CHECK(disjoint_and_covering(p, 200));
    CHECK(p.iterations <= 200);
    CHECK(p.alpha >= 0.25);
    CHECK(p.alpha < 0.5);

    // Geometric parts keep interiors disjoint: anchors in different parts are
    // at least 2 * delta_min apart (exactly 2 * delta_min happens when the
    // closest pair straddles two parts).
    for (std::size_t a = 0; a < result.geo_parts.size(); ++a)
      for (std::size_t b = a + 1; b < result.geo_parts.size(); ++b) {
        const auto& pa = result.geo_parts[a].anchor_points;
        const auto& pb = result.geo_parts[b].anchor_points;
        double min_d = 1e300;
        for (std::size_t i = 0; i < pa.rows(); ++i)
          for (std::size_t j = 0; j < pb.rows(); ++j)
            min_d = std::min(min_d, euclidean_distance(pa.row(i), pb.row(j)));
        CHECK(min_d >= 2.0 * stats.delta_min - 1e-12);
      }
  }
}

TEST_CASE("get_partition determinism under seed") {
  const Matrix pts = random_points(80, 3, 4);
  Rng a(42), b(42);
  const auto ra = get_partition(pts, 0.3, a);
  const auto rb = get_partition(pts, 0.3, b);
  CHECK(ra.partition.alpha == rb.partition.alpha);
  REQUIRE(ra.partition.parts.size() == rb.partition.parts.size());
  for (std::size_t i = 0; i < ra.partition.parts.size(); ++i)
    CHECK(ra.partition.parts[i] == rb.partition.parts[i]);
}

TEST_CASE("same_part_probability basics") {
  const Matrix pts = random_points(50, 2, 5);
  Rng rng(6);
  CHECK(same_part_probability(pts, 7, 7, 50, 0.2, rng) == 1.0);
  const double p = same_part_probability(pts, 0, 1, 50, 0.2, rng);
  CHECK(p >= 0.0);
  CHECK(p <= 1.0);
}

TEST_CASE("duplicate rows always land together") {
  Matrix pts = random_points(30, 2, 7);
  pts(1, 0) = pts(0, 0);
  pts(1, 1) = pts(0, 1);
  Rng rng(8);
  CHECK(same_part_probability(pts, 0, 1, 100, 0.2, rng) == 1.0);
}

TEST_CASE("Monte-Carlo same-part frequency respects the clipped bound") {
  const Matrix pts = random_points(200, 2, 9);
  const PairStats stats = compute_pair_stats(pts);
  const double log_term = 8.0 * (std::log(200.0) + 1.0) / stats.delta_bar;

  // Probe the closest pairs (where the bound bites) plus random ones.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  {
    std::vector<std::tuple<double, std::size_t, std::size_t>> by_dist;
    for (std::size_t i = 0; i < 200; ++i)
      for (std::size_t j = i + 1; j < 200; ++j)
        by_dist.emplace_back(euclidean_distance(pts.row(i), pts.row(j)), i, j);
    std::sort(by_dist.begin(), by_dist.end());
    for (std::size_t k = 0; k < 10; ++k)
      pairs.emplace_back(std::get<1>(by_dist[k]), std::get<2>(by_dist[k]));
    Rng rng(10);
    while (pairs.size() < 20) {
      const std::size_t i = uniform_index(rng, 200), j = uniform_index(rng, 200);
      if (i != j) pairs.emplace_back(i, j);
    }
  }

  const std::size_t trials = 500;
  Rng rng(11);
  for (const auto& [i, j] : pairs) {
    const double freq = same_part_probability(pts, i, j, trials, 0.2, rng);
    const double dist = euclidean_distance(pts.row(i), pts.row(j));
    const double bound = std::max(0.0, 1.0 - log_term * dist);
    const double stderr_ = std::sqrt(std::max(freq * (1.0 - freq), 1e-12) /
                                     static_cast<double>(trials));
    CHECK(freq >= bound - 3.0 * stderr_);
  }
}

TEST_CASE("partition CSV exports") {
  const Matrix pts = Matrix::from_rows({{0.0}, {1.0}, {10.0}});
  const PairStats stats = compute_pair_stats(pts);
  const auto result = partition_with_alpha(pts, stats, 0.01, 0.3, {0, 1, 2});

  const auto dir = std::filesystem::temp_directory_path() / "pcnn_partition_test";
  std::filesystem::create_directories(dir);
  const auto parts_csv = (dir / "parts.csv").string();
  const auto geo_csv = (dir / "anchors.csv").string();
  write_partition_csv(result.partition, parts_csv);
  write_geometric_parts_csv(result.geo_parts, geo_csv);

  std::ifstream in(parts_csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "row_index,part_id");
  std::getline(in, line);
  CHECK(line == "0,0");

  std::ifstream geo(geo_csv);
  std::getline(geo, line);
  CHECK(line.rfind("# radius=0.5", 0) == 0);
  std::filesystem::remove_all(dir);
}
