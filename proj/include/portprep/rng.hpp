#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace portprep {

/// Deterministic counter-based generator (splitmix64 output function over an
/// incrementing state). The same seed produces the same stream on every
/// platform, and independent substreams are derived from the root seed so
/// parallel sampling stays reproducible.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : seed_(seed), state_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 bits of precision.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, bound).
  std::uint64_t next_below(std::uint64_t bound) {
    return static_cast<std::uint64_t>(next_double() * double(bound)) %
           bound;
  }

  bool next_bernoulli(double p) { return next_double() < p; }

  /// Standard normal via Box-Muller; the paired sample is cached.
  double next_gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = next_double();
    while (u1 <= 0.0) {
      u1 = next_double();
    }
    const double u2 = next_double();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  std::complex<double> next_complex_gaussian() {
    const double re = next_gaussian();
    const double im = next_gaussian();
    return {re, im};
  }

  /// Derives an independent substream from the root seed.
  SeededRng split(std::uint64_t stream) const {
    SeededRng mixer(seed_ ^ (0xD1342543DE82EF95ull * (stream + 1)));
    return SeededRng(mixer.next_u64());
  }

 private:
  std::uint64_t seed_;
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace portprep
