#pragma once

#include <cstdint>
#include <random>

namespace spikelab {

// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Per-trial seed as a pure function of (master, n, trial). Each coordinate is
// folded in through a full mixing round so nearby triples land far apart.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t n,
                                    std::uint64_t trial) noexcept {
  std::uint64_t h = mix64(master);
  h = mix64(h ^ (n * 0xd1b54a32d192ed03ULL));
  h = mix64(h ^ (trial * 0x8cb92ba72f3d8dd7ULL));
  return h;
}

// A single random stream. Not shared between threads.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(mix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on (0, 1]; never returns 0 so u^(-1/alpha) stays finite.
  double uniform_open0() {
    return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
  }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool fair_bit() { return (engine_() >> 63) != 0; }

  double normal() { return std::normal_distribution<double>{}(engine_); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace spikelab
