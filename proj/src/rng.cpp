#include "tsdr/rng.hpp"

#include <cmath>
#include <numbers>

#include "tsdr/error.hpp"

namespace tsdr {

namespace {
constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;
}  // namespace

std::uint64_t Mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t Rng::NextU64() {
  ++counter_;
  return Mix64(seed_ + counter_ * kGoldenGamma);
}

double Rng::Uniform() {
  return static_cast<double>((NextU64() >> 11) + 1) * 0x1.0p-53;
}

std::uint64_t Rng::Below(std::uint64_t bound) {
  if (bound == 0) throw Error(ErrorCode::kInvalidArgument, "Rng::Below: bound must be positive");
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit = bound * (~std::uint64_t{0} / bound);
  std::uint64_t x;
  do {
    x = NextU64();
  } while (x >= limit);
  return x % bound;
}

double Rng::Normal() {
  const double u1 = Uniform();
  const double u2 = Uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t DeriveSeed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  std::uint64_t h = Mix64(base ^ 0x5851f42d4c957f2dULL);
  h = Mix64(h + a * kGoldenGamma + 1);
  h = Mix64(h + b * kGoldenGamma + 2);
  return h;
}

}  // namespace tsdr
