#pragma once

#include <cstdint>
#include <limits>

namespace fmt_engine {

/// xoshiro256** generator whose state is derived from (seed, stream, substream)
/// by SplitMix64 hashing. Every Monte Carlo sample draws from its own
/// (sample index, particle index) substream, so results do not depend on how
/// samples are distributed over threads.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

 private:
  std::uint64_t s_[4];
};

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace fmt_engine
