#include "soline/rng.hpp"

#include <random>

namespace soline {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t key) noexcept : seed_(seed), base_(mix(seed ^ mix(key + kGolden))) {}

Rng::result_type Rng::operator()() noexcept {
  ++counter_;
  return mix(base_ + counter_ * kGolden);
}

Rng Rng::split(std::uint64_t key) const noexcept {
  Rng child(seed_, 0);
  child.base_ = mix(base_ ^ mix(key * kGolden + 1));
  return child;
}

double Rng::uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

Vector random_unit_vector(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(n);
  double norm = 0.0;
  while (norm == 0.0) {
    for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
    norm = v.norm();
  }
  return v / norm;
}

}  // namespace soline
