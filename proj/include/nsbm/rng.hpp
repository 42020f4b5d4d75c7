#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace nsbm {

std::uint64_t splitmix64(std::uint64_t x);

/// Seeded generator with index-derived independent streams.
///
/// Every chain, replicate and network gets its own stream via derive(i),
/// so results do not depend on the order in which workers are scheduled.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  /// Independent child stream keyed by `stream`. Does not advance *this.
  Rng derive(std::uint64_t stream) const;

  result_type operator()() { return engine_(); }
  static constexpr result_type min() { return std::numeric_limits<result_type>::min(); }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  /// Uniform on [0, 1).
  double uniform();
  /// Uniform integer on [0, n).
  int uniform_int(int n);

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace nsbm
