#pragma once

#include <cstdint>
#include <random>

namespace lexwalk {

/// SplitMix64 output function (Steele, Lea, Flood 2014).
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of stream `index` under `master_seed`:
///   seed_i = splitmix64(splitmix64(master_seed) ^ (index * 0xD1B54A32D192ED03))
/// Streams are addressable in any order, so trajectory i is replayable alone.
constexpr std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(master_seed) ^ (index * 0xD1B54A32D192ED03ULL));
}

/// mt19937_64 with a portable 53-bit uniform; std:: distributions are avoided
/// because their output is implementation-defined.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

private:
  std::mt19937_64 engine_;
};

}  // namespace lexwalk
