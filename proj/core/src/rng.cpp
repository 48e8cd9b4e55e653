#include "ulab/rng.hpp"

#include <cmath>
#include <numbers>

namespace ulab {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t x) noexcept {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  // Two rounds so that nearby (seed, index) pairs decorrelate.
  return mix64(mix64(seed ^ 0x6A09E667F3BCC909ULL) + kGolden * (index + 1));
}

std::uint64_t Rng::next_u64() noexcept {
  ++counter_;
  return mix64(seed_ + kGolden * counter_);
}

double Rng::uniform() noexcept {
  // 53 random mantissa bits, shifted so 0 is excluded and 1 is included.
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double Rng::normal() noexcept {
  if (spare_normal_) {
    const double z = *spare_normal_;
    spare_normal_.reset();
    return z;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_normal_ = radius * std::sin(angle);
  return radius * std::cos(angle);
}

}  // namespace ulab
