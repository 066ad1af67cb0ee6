#pragma once

#include <cstdint>

namespace tsdr {

// Counter-based generator: output k is SplitMix64's finalizer applied to
// seed + (k + 1) * golden_gamma. The stream depends only on the seed and the
// number of draws, so it is identical on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

  std::uint64_t NextU64();

  // Uniform on (0, 1]; 53 random mantissa bits.
  double Uniform();

  // Uniform integer on [0, bound). bound must be positive.
  std::uint64_t Below(std::uint64_t bound);

  // Standard normal via Box-Muller, cosine branch only: two uniforms per draw.
  double Normal();

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

std::uint64_t Mix64(std::uint64_t x);

// Seed for an independent sub-stream, e.g. one sweep cell.
std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

}  // namespace tsdr
