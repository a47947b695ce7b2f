#pragma once

// Deterministic random streams. Every replica owns a generator seeded from
// (master seed, cell, replica), so results do not depend on scheduling.

#include <cstdint>
#include <random>

namespace coupled_levy {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t cell,
                                    std::uint64_t replica) {
  return splitmix64(splitmix64(splitmix64(seed) ^ cell) ^ replica);
}

class UniformStream {
 public:
  explicit UniformStream(std::uint64_t seed) : engine_(seed) {}
  UniformStream(std::uint64_t seed, std::uint64_t cell, std::uint64_t replica)
      : engine_(stream_seed(seed, cell, replica)) {}

  /// Uniform on the open interval (0, 1).
  double next() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }
  double operator()() { return next(); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace coupled_levy
