#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace tschief {

  using Rng = std::mt19937_64;

  /// Stream identifiers used to carve independent generators out of one master seed.
  namespace streams {
    inline constexpr std::uint64_t boss_pool = 0x424f5353ULL << 32;  // "BOSS"
    inline constexpr std::uint64_t subsample = 0x53554253ULL << 32;  // "SUBS"
    inline constexpr std::uint64_t synthetic = 0x53594e54ULL << 32;  // "SYNT"
  }

  /// One SplitMix64 step.
  std::uint64_t splitmix64(std::uint64_t& state) noexcept;

  /** Generator for stream `stream` of master seed `seed`.
   *  Streams with different ids are statistically independent, and the result does not
   *  depend on which thread asks for it or when. Tree i uses stream i. */
  Rng derive_stream(std::uint64_t seed, std::uint64_t stream);

  /// Uniform integer in [0, n). n must be positive.
  std::size_t uniform_index(Rng& rng, std::size_t n);

  /// Uniform integer in [lo, hi].
  std::size_t uniform_between(Rng& rng, std::size_t lo, std::size_t hi);

  /// Uniform real in [lo, hi].
  double uniform_real(Rng& rng, double lo, double hi);

} // namespace tschief
