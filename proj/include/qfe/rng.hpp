#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>

namespace qfe {

// Deterministic random stream.  Every stochastic routine in the library takes
// one of these explicitly; there is no global RNG.  Draws are defined in terms
// of raw mt19937_64 output so that results are bit-stable across platforms and
// standard-library versions (std::uniform_*_distribution is not portable).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound).  Rejection-free modulo would bias; use
  // rejection sampling on the top range.
  std::uint64_t integer(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("Rng::integer: bound must be positive");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = gen_();
    } while (x >= limit);
    return x % bound;
  }

  // Sample an index with probability weights[i] / sum(weights) by inverse CDF.
  // Weights must be non-negative with a positive sum.
  std::size_t categorical(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) {
      if (w < 0.0) throw std::invalid_argument("Rng::categorical: negative weight");
      total += w;
    }
    if (total <= 0.0) throw std::invalid_argument("Rng::categorical: zero total weight");
    const double r = uniform01() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      acc += weights[i];
      if (r < acc) return i;
    }
    return weights.size() - 1;
  }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

// splitmix64 finalizer; decorrelates structured seed material.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Documented seed-splitting rule: every parallel unit (chain c at grid point
// (a, b)) draws its own stream from the master seed.  Restarting any subset of
// the grid reproduces identical streams.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t s = mix64(master ^ 0x6a09e667f3bcc908ULL);
  s = mix64(s ^ mix64(a + 1));
  s = mix64(s ^ mix64(b + 2));
  s = mix64(s ^ mix64(c + 3));
  return s;
}

}  // namespace qfe
