#include "vgpnn/random.hpp"

#include <cmath>
#include <numbers>

namespace vgpnn {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
constexpr std::uint64_t kSplitTag = 0x73706c6974ull;  // "split"

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> c,
                                           std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kWeyl0;
      k[1] += kWeyl1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

CounterRng::CounterRng(std::uint64_t seed) : seed_(seed) {}

CounterRng CounterRng::split(std::uint64_t stream) const {
  auto r = block(stream, kSplitTag);
  return CounterRng((static_cast<std::uint64_t>(r[1]) << 32) | r[0]);
}

std::array<std::uint32_t, 4> CounterRng::block(std::uint64_t c0, std::uint64_t c1) const {
  return philox4x32_10({static_cast<std::uint32_t>(c0), static_cast<std::uint32_t>(c0 >> 32),
                        static_cast<std::uint32_t>(c1), static_cast<std::uint32_t>(c1 >> 32)},
                       {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
}

std::uint64_t bounded(std::uint32_t hi, std::uint32_t lo, std::uint64_t n) {
  std::uint64_t x = (static_cast<std::uint64_t>(hi) << 32) | lo;
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(x) * n) >> 64);
}

std::pair<double, double> box_muller(std::uint32_t a, std::uint32_t b) {
  double r = std::sqrt(-2.0 * std::log(unit_open(a)));
  double theta = 2.0 * std::numbers::pi * unit_open(b);
  return {r * std::cos(theta), r * std::sin(theta)};
}

}  // namespace vgpnn
