#pragma once

#include <array>
#include <cstdint>
#include <utility>

namespace vgpnn {

// Philox4x32-10 (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
// Pure function of (counter, key); bit-identical on every platform.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

// Counter-based generator keyed by a 64-bit seed. There is no hidden state:
// a draw is addressed by a 128-bit counter (two 64-bit words), so parallel
// loops can address draws by element index and stay deterministic.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed = 0);

  // Independent generator for a sub-stream. The child key is the Philox
  // output for counter (stream, kSplitTag) under this key.
  CounterRng split(std::uint64_t stream) const;

  std::array<std::uint32_t, 4> block(std::uint64_t c0, std::uint64_t c1 = 0) const;

  std::uint64_t key() const { return seed_; }

 private:
  std::uint64_t seed_;
};

// Maps 32 random bits to the open interval (0, 1).
inline double unit_open(std::uint32_t bits) { return (static_cast<double>(bits) + 0.5) * 0x1p-32; }

// Uniform integer in [0, n) from 64 random bits (multiply-shift, n > 0).
std::uint64_t bounded(std::uint32_t hi, std::uint32_t lo, std::uint64_t n);

// Two independent standard normals from two uniform words (Box-Muller).
std::pair<double, double> box_muller(std::uint32_t a, std::uint32_t b);

}  // namespace vgpnn
