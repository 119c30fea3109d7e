#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "pcnn/geometry.hpp"
#include "pcnn/rng.hpp"

using namespace pcnn;

namespace {

PointCloud random_cloud(std::size_t n, std::size_t d, Rng& rng) {
  Matrix pts(n, d);
  for (std::size_t i = 0; i < pts.size(); ++i)
    pts.data()[i] = sample_uniform(rng, -1.0, 1.0);
  return {std::move(pts)};
}

// Independent brute-force oracle: max over both directions of min pairwise
// distance, written as plain loops over explicit distance tables.
double hausdorff_oracle(const PointCloud& a, const PointCloud& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b.size(); ++j)
      best = std::min(best, euclidean_distance(a.points.row(i), b.points.row(j)));
    worst = std::max(worst, best);
  }
  for (std::size_t j = 0; j < b.size(); ++j) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < a.size(); ++i)
      best = std::min(best, euclidean_distance(a.points.row(i), b.points.row(j)));
    worst = std::max(worst, best);
  }
  return worst;
}

VecFn affine1(double scale, double offset) {
  return [scale, offset](std::span<const double> x) {
    return std::vector<double>{scale * x[0] + offset};
  };
}

PcRepresentation two_part_rep(double offset1, double offset2) {
  PcRepresentation rep;
  rep.output_dim = 1;
  rep.pairs.push_back({affine1(1.0, offset1), {Matrix::from_rows({{0.0}, {0.25}})}, 0.0});
  rep.pairs.push_back({affine1(1.0, offset2), {Matrix::from_rows({{0.75}, {1.0}})}, 0.0});
  return rep;
}

}  // namespace

TEST_CASE("hausdorff: brute-force cases") {
  const PointCloud a{Matrix::from_rows({{0.0}, {1.0}})};
  const PointCloud b{Matrix::from_rows({{0.0}, {3.0}})};
  CHECK(hausdorff(a, a) == 0.0);
  CHECK(hausdorff(a, b) == doctest::Approx(2.0));
  CHECK(hausdorff(PointCloud{Matrix::from_rows({{0.0}})},
                  PointCloud{Matrix::from_rows({{3.0}})}) == doctest::Approx(3.0));
  CHECK_THROWS_AS(hausdorff(a, PointCloud{Matrix(0, 1)}), std::invalid_argument);
}

TEST_CASE("hausdorff: symmetry and triangle inequality on random clouds") {
  Rng rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const auto a = random_cloud(1 + uniform_index(rng, 8), 2, rng);
    const auto b = random_cloud(1 + uniform_index(rng, 8), 2, rng);
    const auto c = random_cloud(1 + uniform_index(rng, 8), 2, rng);
    const double ab = hausdorff(a, b);
    CHECK(ab == hausdorff(b, a));
    CHECK(ab == doctest::Approx(hausdorff_oracle(a, b)));
    CHECK(hausdorff(a, c) <= ab + hausdorff(b, c) + 1e-12);
  }
}

TEST_CASE("sup_norm_diff: pointwise evaluation") {
  const PointCloud sample{Matrix::from_rows({{0.0}, {0.5}, {1.0}})};
  const VecFn id = affine1(1.0, 0.0);
  const VecFn shifted = affine1(1.0, 0.25);
  const VecFn square = [](std::span<const double> x) {
    return std::vector<double>{x[0] * x[0]};
  };
  CHECK(sup_norm_diff(id, id, sample) == 0.0);
  CHECK(sup_norm_diff(id, shifted, sample) == doctest::Approx(0.25));
  // f(x)=x^2 vs g(x)=x on {0, 0.5, 1}: max gap 0.25 at x=0.5.
  CHECK(sup_norm_diff(square, id, sample) == doctest::Approx(0.25));
}

TEST_CASE("sup_norm_diff: nondecreasing under sample refinement") {
  Rng rng(2);
  const VecFn f = [](std::span<const double> x) {
    return std::vector<double>{std::sin(3.0 * x[0])};
  };
  const VecFn g = affine1(0.5, 0.1);
  for (int trial = 0; trial < 20; ++trial) {
    const auto small = random_cloud(5, 1, rng);
    Matrix bigger(10, 1);
    for (std::size_t i = 0; i < 5; ++i) bigger(i, 0) = small.points(i, 0);
    for (std::size_t i = 5; i < 10; ++i) bigger(i, 0) = sample_uniform(rng, -1, 1);
    CHECK(sup_norm_diff(f, g, {bigger}) >= sup_norm_diff(f, g, small));
  }
}

TEST_CASE("d_step1: identical, shifted, and mismatched lengths") {
  const PointCloud sample{Matrix::from_rows({{0.0}, {1.0}})};
  const auto f = two_part_rep(0.0, 0.0);
  CHECK(d_step1(f, f, sample) == 0.0);

  // One function off by 1, sets identical: the sup-norm term dominates.
  PcRepresentation g = two_part_rep(1.0, 0.0);
  CHECK(d_step1(f, g, sample) == doctest::Approx(1.0));

  PcRepresentation one_part;
  one_part.output_dim = 1;
  one_part.pairs.push_back({affine1(1.0, 0.0), {Matrix::from_rows({{0.0}})}, 0.0});
  CHECK(std::isinf(d_step1(f, one_part, sample)));
  CHECK(d_step1(f, one_part, sample) > 0);
}

TEST_CASE("dpc_upper_bound: decoupled sums") {
  const PointCloud sample{Matrix::from_rows({{0.0}, {1.0}})};
  const auto target = two_part_rep(0.0, 0.0);
  CHECK(dpc_upper_bound(target, target, sample) == 0.0);

  // One function off by the constant 0.5, sets identical.
  CHECK(dpc_upper_bound(target, two_part_rep(0.5, 0.0), sample) == doctest::Approx(0.5));

  // Functions identical, one part shifted by 0.2 (Hausdorff 0.2).
  PcRepresentation shifted = two_part_rep(0.0, 0.0);
  shifted.pairs[1].part = PointCloud{Matrix::from_rows({{0.95}, {1.2}})};
  CHECK(dpc_upper_bound(target, shifted, sample) == doctest::Approx(0.2));

  PcRepresentation one_part;
  one_part.output_dim = 1;
  one_part.pairs.push_back({affine1(1.0, 0.0), {Matrix::from_rows({{0.0}})}, 0.0});
  CHECK_THROWS_AS(dpc_upper_bound(target, one_part, sample), std::invalid_argument);
}

TEST_CASE("dpc_upper_bound dominates d_step1 on random pairs") {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n_parts = 1 + uniform_index(rng, 4);
    PcRepresentation f, g;
    f.output_dim = g.output_dim = 1;
    for (std::size_t p = 0; p < n_parts; ++p) {
      f.pairs.push_back({affine1(sample_uniform(rng, -2, 2), sample_uniform(rng, -2, 2)),
                         random_cloud(1 + uniform_index(rng, 5), 1, rng), 0.0});
      g.pairs.push_back({affine1(sample_uniform(rng, -2, 2), sample_uniform(rng, -2, 2)),
                         random_cloud(1 + uniform_index(rng, 5), 1, rng), 0.0});
    }
    const auto sample = random_cloud(8, 1, rng);
    CHECK(d_step1(f, g, sample) <= dpc_upper_bound(f, g, sample));
  }
}

TEST_CASE("realize: literal indicator sum") {
  PcRepresentation rep;
  rep.output_dim = 1;
  rep.pairs.push_back(
      {[](std::span<const double>) { return std::vector<double>{1.0}; },
       {Matrix::from_rows({{0.0}, {0.5}})},
       0.0});
  rep.pairs.push_back(
      {[](std::span<const double>) { return std::vector<double>{2.0}; },
       {Matrix::from_rows({{0.5}, {1.0}})},
       0.0});

  // Single membership.
  CHECK(realize(rep, std::vector<double>{0.0})[0] == 1.0);
  // No membership: the empty sum.
  CHECK(realize(rep, std::vector<double>{0.3})[0] == 0.0);
  // Overlap at 0.5: both parts fire and the values add.
  CHECK(realize(rep, std::vector<double>{0.5})[0] == 3.0);
}

TEST_CASE("realize: ball radius widens membership") {
  PcRepresentation rep;
  rep.output_dim = 1;
  rep.pairs.push_back(
      {[](std::span<const double>) { return std::vector<double>{1.0}; },
       {Matrix::from_rows({{0.0}})},
       0.25});
  CHECK(realize(rep, std::vector<double>{0.2})[0] == 1.0);
  CHECK(realize(rep, std::vector<double>{0.3})[0] == 0.0);
}

TEST_CASE("FFNN non-universality witness: 1-part candidates stay at infinity") {
  // f = I_[0,1] + I_[1/3,1/2] needs two parts; every 1-part representation is
  // at d_step1 = infinity from every 2-part representation of f.
  Matrix grid(101, 1);
  for (std::size_t i = 0; i <= 100; ++i) grid(i, 0) = i / 100.0;
  const PointCloud sample{grid};

  PcRepresentation f;
  f.output_dim = 1;
  std::vector<double> full, middle;
  for (std::size_t i = 0; i <= 100; ++i) {
    full.push_back(i / 100.0);
    if (i / 100.0 >= 1.0 / 3.0 && i / 100.0 <= 0.5) middle.push_back(i / 100.0);
  }
  f.pairs.push_back({[](std::span<const double>) { return std::vector<double>{1.0}; },
                     {Matrix::column(full)},
                     0.0});
  f.pairs.push_back({[](std::span<const double>) { return std::vector<double>{1.0}; },
                     {Matrix::column(middle)},
                     0.0});

  Rng rng(4);
  for (int candidate = 0; candidate < 10; ++candidate) {
    PcRepresentation ffnn_like;
    ffnn_like.output_dim = 1;
    ffnn_like.pairs.push_back(
        {affine1(sample_uniform(rng, -3, 3), sample_uniform(rng, -3, 3)),
         {Matrix::column(full)},
         0.0});
    CHECK(std::isinf(d_step1(f, ffnn_like, sample)));
  }
}
