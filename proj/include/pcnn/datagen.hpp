#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pcnn/dataset.hpp"
#include "pcnn/rng.hpp"

namespace pcnn {

/// Closed-form subpatterns available to the synthetic generator.
enum class SubpatternFn : std::uint8_t {
  exp_cos,         // 1 + e^u cos(u)
  neg_quad_cos,    // -1 - u^2 cos(u)
  sin10,           // 1 + sin(10u)
  neg_shift_quad,  // -2 - u^2
  linear,          // u
  square,          // u^2
};

const char* to_string(SubpatternFn f);
SubpatternFn subpattern_fn_from_string(const std::string& s);
double eval_subpattern(SubpatternFn f, double u);

/// Piecewise regression task: y = f(x) + sigma * t(nu) noise, where f swaps
/// between f1 and f2 every r/2 along the random projection u = A x.
struct SyntheticSpec {
  std::size_t d = 1;
  std::size_t n = 1000;
  double sigma = 0.0;
  double nu = 30.0;
  double r = 0.25;
  SubpatternFn f1 = SubpatternFn::exp_cos;
  SubpatternFn f2 = SubpatternFn::neg_quad_cos;
  std::uint64_t seed = 0;
};

/// Value and true part at x: u = A x; part 0 (f1) iff u mod r lands in
/// [0, r/2), with the nonnegative representative of the modulus.
std::pair<double, int> synth_target(const SyntheticSpec& spec, const Matrix& a,
                                    std::span<const double> x);

/// Draws n inputs uniform on [0,1]^d and a Gaussian 1 x d projection, then
/// applies synth_target and adds sigma-scaled Student-t noise. part_labels
/// carry the true parts.
Dataset generate(const SyntheticSpec& spec, Rng& rng);

/// Same, but with the projection supplied (e.g. A = [1] for the visualizable
/// one-dimensional case).
Dataset generate_with_projection(const SyntheticSpec& spec, const Matrix& a, Rng& rng);

/// Train/test split selector for CSV ingestion.
struct SplitSpec {
  enum class Kind : std::uint8_t { none, last_k, random_fraction } kind = Kind::none;
  std::size_t last_k = 0;
  double test_fraction = 0.0;
  std::uint64_t seed = 0;

  static SplitSpec none() { return {}; }
  static SplitSpec last(std::size_t k) { return {Kind::last_k, k, 0.0, 0}; }
  static SplitSpec fraction(double f, std::uint64_t seed) {
    return {Kind::random_fraction, 0, f, seed};
  }
};

void apply_split(Dataset& data, const SplitSpec& split);

/// Loads named numeric columns from a one-line-header CSV. Errors name the
/// offending row and column.
Dataset load_csv(const std::string& path, const std::vector<std::string>& input_cols,
                 const std::vector<std::string>& target_cols,
                 const std::optional<std::string>& part_col = std::nullopt,
                 const SplitSpec& split = SplitSpec::none());

/// Writes header x0..x{d-1}, y0..y{D-1}[, part]; %.17g so values round-trip.
void save_csv(const Dataset& data, const std::string& path);

/// Column-name convention used by the CLI: inputs x0.., targets y0.., part.
struct CsvLayout {
  std::vector<std::string> input_cols;
  std::vector<std::string> target_cols;
  std::optional<std::string> part_col;
};
CsvLayout infer_csv_layout(const std::string& path);

}  // namespace pcnn
