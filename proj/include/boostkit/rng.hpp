#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace boostkit {

/// Seedable generator used by every randomized operation in the toolkit.
///
/// The algorithm is SplitMix64 (Steele, Lea & Flood 2014) and is part of the
/// file-format contract: the n-th output for a given seed never changes.
///
///   state_n   = seed + n * 0x9E3779B97F4A7C15  (mod 2^64), n = 1, 2, ...
///   z         = state_n
///   z         = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z         = (z ^ (z >> 27)) * 0x94D049BB133111EB
///   output_n  = z ^ (z >> 31)
///
/// Derived draws:
///   uniform()      = (output >> 11) * 2^-53, in [0, 1)
///   uniform_index(n) rejects outputs below (2^64 mod n), then takes output mod n
///   permutation(n) is a Fisher-Yates shuffle of 0..n-1 swapping i with
///                  uniform_index(i + 1) for i = n-1 down to 1.
class Rng {
public:
  explicit Rng(std::uint64_t seed) noexcept : seed_(seed) {}

  std::uint64_t next() noexcept;
  double uniform() noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  std::size_t uniform_index(std::size_t n);
  std::vector<std::size_t> permutation(std::size_t n);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t counter() const noexcept { return counter_; }

private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

} // namespace boostkit
