#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "pcnn/datagen.hpp"
#include "pcnn/geometry.hpp"

using namespace pcnn;

namespace {

const auto kTmp = std::filesystem::temp_directory_path() / "pcnn_datagen_test";

struct TmpDir {
  TmpDir() { std::filesystem::create_directories(kTmp); }
  ~TmpDir() { std::filesystem::remove_all(kTmp); }
};

std::string write_file(const std::string& name, const std::string& content) {
  const auto path = (kTmp / name).string();
  std::ofstream out(path);
  out << content;
  return path;
}

// E|t_nu| = sqrt(nu/pi) * Gamma((nu-1)/2) / Gamma(nu/2).
double t_mean_abs(double nu) {
  return std::sqrt(nu / M_PI) * std::tgamma((nu - 1.0) / 2.0) / std::tgamma(nu / 2.0);
}

}  // namespace

TEST_CASE("synth_target: direct evaluations at r = 0.25") {
  SyntheticSpec spec;
  spec.d = 1;
  spec.r = 0.25;
  spec.f1 = SubpatternFn::exp_cos;
  spec.f2 = SubpatternFn::neg_quad_cos;
  const Matrix a = Matrix::from_rows({{1.0}});

  // u = 0.1: 0.1 mod 0.25 = 0.1 < 0.125 -> part 0, f1(0.1) = 1 + e^0.1 cos 0.1.
  auto [v1, p1] = synth_target(spec, a, std::vector<double>{0.1});
  CHECK(p1 == 0);
  CHECK(v1 == doctest::Approx(1.0 + std::exp(0.1) * std::cos(0.1)));
  CHECK(v1 == doctest::Approx(2.0996).epsilon(1e-3));

  // u = 0.2: 0.2 >= 0.125 -> part 1, f2(0.2) = -1 - 0.04 cos 0.2.
  auto [v2, p2] = synth_target(spec, a, std::vector<double>{0.2});
  CHECK(p2 == 1);
  CHECK(v2 == doctest::Approx(-1.0 - 0.04 * std::cos(0.2)));
  CHECK(v2 == doctest::Approx(-1.0392).epsilon(1e-3));

  // u mod r exactly 0 lands in the half-open first interval.
  auto [v3, p3] = synth_target(spec, a, std::vector<double>{0.25});
  CHECK(p3 == 0);
  CHECK(v3 == doctest::Approx(1.0 + std::exp(0.25) * std::cos(0.25)));

  // Negative projections use the nonnegative representative.
  auto [v4, p4] =
      synth_target(spec, Matrix::from_rows({{-1.0}}), std::vector<double>{0.05});
  CHECK(p4 == 1);  // -0.05 mod 0.25 = 0.2 >= 0.125
  CHECK(v4 == doctest::Approx(-1.0 - 0.0025 * std::cos(-0.05)));

  SyntheticSpec bad = spec;
  bad.r = 0.0;
  CHECK_THROWS_AS(synth_target(bad, a, std::vector<double>{0.1}), std::invalid_argument);
}

TEST_CASE("generate: shape, ranges, labels") {
  SyntheticSpec spec;
  spec.d = 3;
  spec.n = 200;
  spec.sigma = 0.0;
  spec.seed = 1;
  Rng rng(spec.seed);
  const Dataset data = generate(spec, rng);
  CHECK(data.n_rows() == 200);
  CHECK(data.input_dim() == 3);
  CHECK(data.part_labels.size() == 200);
  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(data.inputs(i, j) >= 0.0);
      CHECK(data.inputs(i, j) < 1.0);
    }
    CHECK((data.part_labels[i] == 0 || data.part_labels[i] == 1));
  }
}

TEST_CASE("generate: determinism under seed") {
  SyntheticSpec spec;
  spec.d = 2;
  spec.n = 50;
  spec.sigma = 0.05;
  spec.seed = 9;
  Rng r1(spec.seed), r2(spec.seed);
  const Dataset a = generate(spec, r1);
  const Dataset b = generate(spec, r2);
  for (std::size_t i = 0; i < a.inputs.size(); ++i)
    CHECK(a.inputs.data()[i] == b.inputs.data()[i]);
  for (std::size_t i = 0; i < a.targets.size(); ++i)
    CHECK(a.targets.data()[i] == b.targets.data()[i]);
  CHECK(a.part_labels == b.part_labels);
}

TEST_CASE("generate: sigma = 0 targets match synth_target exactly") {
  SyntheticSpec spec;
  spec.d = 1;
  spec.n = 500;
  spec.sigma = 0.0;
  spec.seed = 5;
  spec.f1 = SubpatternFn::linear;
  spec.f2 = SubpatternFn::square;
  const Matrix a = Matrix::from_rows({{1.0}});
  Rng rng(spec.seed);
  const Dataset data = generate_with_projection(spec, a, rng);
  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    const auto [v, p] = synth_target(spec, a, data.inputs.row(i));
    CHECK(data.targets(i, 0) == v);
    CHECK(data.part_labels[i] == p);
  }
}

TEST_CASE("generate: noise magnitude matches sigma * E|t(nu)|") {
  SyntheticSpec spec;
  spec.d = 1;
  spec.n = 10000;
  spec.sigma = 0.01;
  spec.nu = 30.0;
  spec.seed = 2;
  const Matrix a = Matrix::from_rows({{1.0}});

  Rng rng(spec.seed);
  const Dataset noisy = generate_with_projection(spec, a, rng);
  double total_abs = 0.0;
  for (std::size_t i = 0; i < noisy.n_rows(); ++i) {
    const auto [clean, part] = synth_target(spec, a, noisy.inputs.row(i));
    total_abs += std::abs(noisy.targets(i, 0) - clean);
  }
  const double mean_abs = total_abs / static_cast<double>(noisy.n_rows());
  const double expected = spec.sigma * t_mean_abs(spec.nu);  // 0.01 * 0.8185
  CHECK(std::abs(mean_abs - expected) / expected < 0.20);
}

TEST_CASE("generate: noise independent of input norm") {
  SyntheticSpec spec;
  spec.d = 2;
  spec.n = 10000;
  spec.sigma = 0.1;
  spec.nu = 10.0;
  spec.seed = 3;
  const Matrix a = Matrix::from_rows({{0.7, -0.3}});
  Rng rng(spec.seed);
  const Dataset noisy = generate_with_projection(spec, a, rng);

  std::vector<double> norms, noises;
  for (std::size_t i = 0; i < noisy.n_rows(); ++i) {
    const auto [clean, part] = synth_target(spec, a, noisy.inputs.row(i));
    norms.push_back(euclidean_norm(noisy.inputs.row(i)));
    noises.push_back(noisy.targets(i, 0) - clean);
  }
  const auto n = static_cast<double>(norms.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < norms.size(); ++i) {
    mx += norms[i];
    my += noises[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < norms.size(); ++i) {
    sxy += (norms[i] - mx) * (noises[i] - my);
    sxx += (norms[i] - mx) * (norms[i] - mx);
    syy += (noises[i] - my) * (noises[i] - my);
  }
  CHECK(std::abs(sxy / std::sqrt(sxx * syy)) < 0.05);
}

TEST_CASE("synth_target agrees with realize() of the 2-part representation") {
  SyntheticSpec spec;
  spec.d = 1;
  spec.r = 0.5;
  spec.f1 = SubpatternFn::linear;
  spec.f2 = SubpatternFn::square;
  const Matrix a = Matrix::from_rows({{1.0}});

  Matrix grid(101, 1);
  for (std::size_t i = 0; i <= 100; ++i) grid(i, 0) = i / 100.0;
  std::vector<double> part0, part1;
  for (std::size_t i = 0; i <= 100; ++i) {
    const auto [v, p] = synth_target(spec, a, grid.row(i));
    (p == 0 ? part0 : part1).push_back(grid(i, 0));
  }

  PcRepresentation rep;
  rep.output_dim = 1;
  rep.pairs.push_back({[&](std::span<const double> x) {
                         return std::vector<double>{eval_subpattern(spec.f1, x[0])};
                       },
                       {Matrix::column(part0)},
                       0.0});
  rep.pairs.push_back({[&](std::span<const double> x) {
                         return std::vector<double>{eval_subpattern(spec.f2, x[0])};
                       },
                       {Matrix::column(part1)},
                       0.0});

  for (std::size_t i = 0; i <= 100; ++i) {
    const auto [v, p] = synth_target(spec, a, grid.row(i));
    const auto rv = realize(rep, grid.row(i));
    CHECK(rv[0] == doctest::Approx(v));
  }
}

TEST_CASE("csv: save and load round trip") {
  TmpDir tmp;
  SyntheticSpec spec;
  spec.d = 2;
  spec.n = 25;
  spec.sigma = 0.01;
  spec.seed = 4;
  Rng rng(spec.seed);
  const Dataset data = generate(spec, rng);
  const auto path = (kTmp / "round.csv").string();
  save_csv(data, path);

  const Dataset loaded = load_csv(path, {"x0", "x1"}, {"y0"}, std::string("part"));
  REQUIRE(loaded.n_rows() == data.n_rows());
  for (std::size_t i = 0; i < data.n_rows(); ++i) {
    CHECK(loaded.inputs(i, 0) == data.inputs(i, 0));
    CHECK(loaded.inputs(i, 1) == data.inputs(i, 1));
    CHECK(loaded.targets(i, 0) == data.targets(i, 0));
    CHECK(loaded.part_labels[i] == data.part_labels[i]);
  }

  const auto layout = infer_csv_layout(path);
  CHECK(layout.input_cols == std::vector<std::string>{"x0", "x1"});
  CHECK(layout.target_cols == std::vector<std::string>{"y0"});
  CHECK(layout.part_col.has_value());
}

TEST_CASE("csv: split specs") {
  TmpDir tmp;
  std::string content = "x0,y0\n";
  for (int i = 0; i < 10; ++i)
    content += std::to_string(i) + "," + std::to_string(2 * i) + "\n";
  const auto path = write_file("split.csv", content);

  const Dataset last2 = load_csv(path, {"x0"}, {"y0"}, std::nullopt, SplitSpec::last(2));
  CHECK(last2.indices_of(Split::train).size() == 8);
  const auto test_idx = last2.indices_of(Split::test);
  REQUIRE(test_idx.size() == 2);
  CHECK(test_idx[0] == 8);  // order preserved
  CHECK(test_idx[1] == 9);

  const Dataset frac =
      load_csv(path, {"x0"}, {"y0"}, std::nullopt, SplitSpec::fraction(0.3, 7));
  CHECK(frac.indices_of(Split::test).size() == 3);
}

TEST_CASE("csv: error contracts") {
  TmpDir tmp;
  const auto missing_col = write_file("m.csv", "a,b\n1,2\n");
  CHECK_THROWS_WITH_AS(load_csv(missing_col, {"x0"}, {"b"}, std::nullopt),
                       doctest::Contains("missing column 'x0'"), std::runtime_error);

  const auto bad_cell = write_file("bad.csv", "x0,y0\n1,2\n3,4\n5,oops\n");
  try {
    load_csv(bad_cell, {"x0"}, {"y0"}, std::nullopt);
    FAIL("expected parse error");
  } catch (const std::runtime_error& e) {
    const std::string msg = e.what();
    CHECK(msg.find("row 3") != std::string::npos);
    CHECK(msg.find("y0") != std::string::npos);
  }

  const auto empty = write_file("empty.csv", "");
  CHECK_THROWS_AS(load_csv(empty, {"x0"}, {"y0"}, std::nullopt), std::runtime_error);

  const auto header_only = write_file("h.csv", "x0,y0\n");
  CHECK_THROWS_AS(load_csv(header_only, {"x0"}, {"y0"}, std::nullopt),
                  std::runtime_error);

  CHECK_THROWS_AS(load_csv((kTmp / "nope.csv").string(), {"x0"}, {"y0"}, std::nullopt),
                  std::runtime_error);
}
