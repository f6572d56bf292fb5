#pragma once

#include <array>
#include <cstdint>
#include <optional>

namespace hyperswarm {

/// xoshiro256** seeded through splitmix64. The stream is fixed across
/// platforms; every variate the library draws comes from here so that runs
/// reproduce bit-exactly from a seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on the open interval (0, 1).
  double uniform_open();
  /// Standard normal (Marsaglia polar method, second variate cached).
  double normal();

  /// Independent generator for sub-stream `index`; depends only on this
  /// generator's seed, never on how many numbers were drawn from it.
  Rng split(std::uint64_t index) const;

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> s_{};
  std::optional<double> spare_normal_;
};

/// Deterministic seed for sub-stream `index` of `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace hyperswarm
