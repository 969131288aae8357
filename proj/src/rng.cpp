#include <tschief/rng.hpp>

#include <array>

namespace tschief {

  std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  Rng derive_stream(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t state = seed;
    const std::uint64_t a = splitmix64(state);
    state = a ^ (stream * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL);
    std::array<std::uint32_t, 8> words{};
    for (std::size_t i = 0; i < words.size(); i += 2) {
      const std::uint64_t w = splitmix64(state);
      words[i] = static_cast<std::uint32_t>(w);
      words[i + 1] = static_cast<std::uint32_t>(w >> 32);
    }
    std::seed_seq seq(words.begin(), words.end());
    return Rng(seq);
  }

  std::size_t uniform_index(Rng& rng, std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  }

  std::size_t uniform_between(Rng& rng, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  }

  double uniform_real(Rng& rng, double lo, double hi) {
    if (lo == hi) { return lo; }
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  }

} // namespace tschief
