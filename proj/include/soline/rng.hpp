#pragma once

#include <cstdint>
#include <limits>

#include "soline/types.hpp"

namespace soline {

/// Counter-based SplitMix64 stream. Output i of stream (seed, key) is a pure
/// function of (seed, key, i), so derived streams never overlap in practice
/// and runs are reproducible from the seed alone.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed, std::uint64_t key = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Independent child stream; the parent is not advanced.
  Rng split(std::uint64_t key) const noexcept;

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t base_;
  std::uint64_t counter_ = 0;
};

/// Uniformly distributed point on the unit sphere in R^n.
Vector random_unit_vector(Eigen::Index n, Rng& rng);

}  // namespace soline
