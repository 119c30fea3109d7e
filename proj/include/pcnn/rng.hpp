#pragma once

#include <cstdint>
#include <vector>

#include "pcnn/matrix.hpp"

namespace pcnn {

/// Deterministic xoshiro256++ generator seeded through splitmix64.
///
/// The algorithm is fully specified here (no reliance on standard-library
/// distributions, whose streams are implementation-defined), so identical
/// seeds yield identical sample streams on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  /// Uniform double in [0, 1) with 53 random bits.
  double next_double();

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t state_[4];
  std::uint64_t seed_;
};

/// Derives an independent stream seed: workers and trials each get their own
/// generator instead of sharing one stream.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Uniform draw from [lo, hi). Rejects lo >= hi.
double sample_uniform(Rng& rng, double lo, double hi);

/// Single standard-normal draw (Box-Muller).
double sample_gaussian_scalar(Rng& rng);

/// n standard-normal draws as an n x 1 matrix.
Matrix sample_gaussian(Rng& rng, std::size_t n);

/// Single Student-t draw with nu > 0 degrees of freedom, built as
/// normal / sqrt(chi_square(nu) / nu).
double sample_student_t_scalar(Rng& rng, double nu);

/// n i.i.d. Student-t(nu) draws as an n x 1 matrix. Rejects nu <= 0.
Matrix sample_student_t(Rng& rng, double nu, std::size_t n);

/// Uniform index in [0, n).
std::size_t uniform_index(Rng& rng, std::size_t n);

/// In-place Fisher-Yates shuffle.
void shuffle_indices(std::vector<std::size_t>& idx, Rng& rng);

}  // namespace pcnn
