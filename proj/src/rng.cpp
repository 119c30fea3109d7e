#include "pcnn/rng.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pcnn {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix64(std::uint64_t& x) {
  x += kGolden;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed) {
  std::uint64_t sm = seed;
  for (auto& s : state_) s = splitmix64(sm);
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double Rng::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t x = seed + kGolden * (stream + 1);
  return splitmix64(x);
}

double sample_uniform(Rng& rng, double lo, double hi) {
  if (!(lo < hi))
    throw std::invalid_argument("sample_uniform: need lo < hi, got [" +
                                std::to_string(lo) + ", " + std::to_string(hi) + ")");
  return lo + (hi - lo) * rng.next_double();
}

double sample_gaussian_scalar(Rng& rng) {
  // Box-Muller; u1 shifted away from 0 so log is finite.
  const double u1 = 1.0 - rng.next_double();
  const double u2 = rng.next_double();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Matrix sample_gaussian(Rng& rng, std::size_t n) {
  if (n == 0) throw std::invalid_argument("sample_gaussian: n must be >= 1");
  Matrix out(n, 1);
  for (std::size_t i = 0; i < n; ++i) out(i, 0) = sample_gaussian_scalar(rng);
  return out;
}

namespace {

// Marsaglia-Tsang gamma(shape, 1) sampler; handles shape < 1 via the boost
// Gamma(a) = Gamma(a+1) * U^(1/a).
double sample_gamma(Rng& rng, double shape) {
  if (shape < 1.0) {
    const double u = 1.0 - rng.next_double();  // (0, 1]
    return sample_gamma(rng, shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = sample_gaussian_scalar(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = 1.0 - rng.next_double();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

}  // namespace

double sample_student_t_scalar(Rng& rng, double nu) {
  const double z = sample_gaussian_scalar(rng);
  const double chi2 = 2.0 * sample_gamma(rng, nu / 2.0);
  return z / std::sqrt(chi2 / nu);
}

Matrix sample_student_t(Rng& rng, double nu, std::size_t n) {
  if (nu <= 0.0)
    throw std::invalid_argument("sample_student_t: nu must be > 0, got " +
                                std::to_string(nu));
  if (n == 0) throw std::invalid_argument("sample_student_t: n must be >= 1");
  Matrix out(n, 1);
  for (std::size_t i = 0; i < n; ++i) out(i, 0) = sample_student_t_scalar(rng, nu);
  return out;
}

std::size_t uniform_index(Rng& rng, std::size_t n) {
  // Rejection keeps the mapping unbiased for any n.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = rng.next_u64();
  } while (x >= limit);
  return static_cast<std::size_t>(x % n);
}

void shuffle_indices(std::vector<std::size_t>& idx, Rng& rng) {
  for (std::size_t i = idx.size(); i > 1; --i)
    std::swap(idx[i - 1], idx[uniform_index(rng, i)]);
}

}  // namespace pcnn
