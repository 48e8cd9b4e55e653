#pragma once

#include <cstdint>
#include <limits>
#include <optional>

namespace ulab {

/// Finalizer of SplitMix64. Bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed of the `index`-th child stream of `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// Counter-based 64-bit generator (SplitMix64): the i-th output is a pure
/// function of (seed, i), so a stream is reproducible from its seed alone.
/// Normal variates come from Box-Muller.
///
/// An Rng is never shared between threads; parallel tasks each own a child.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept : seed_{seed} {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }
  result_type operator()() noexcept { return next_u64(); }

  std::uint64_t next_u64() noexcept;

  /// Uniform on the half-open interval (0, 1].
  double uniform() noexcept;

  /// Standard normal.
  double normal() noexcept;

  /// Independent stream keyed by (seed, index); does not advance *this.
  Rng child(std::uint64_t index) const noexcept {
    return Rng{derive_seed(seed_, index)};
  }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  std::optional<double> spare_normal_;
};

}  // namespace ulab
