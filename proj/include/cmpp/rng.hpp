#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace cmpp {

// xoshiro256** generator owned by exactly one worker at a time.
//
// Streams are keyed by (master seed, family, index). The key is folded with
// splitmix64:
//
//   k0 = splitmix64(seed)
//   k1 = splitmix64(k0 ^ (family * 0x9E3779B97F4A7C15))
//   k2 = splitmix64(k1 ^ (index  * 0xD1B54A32D192ED03))
//
// and the four state words are the next four outputs of a splitmix64 sequence
// started at k2. A path's draws therefore depend only on its key, never on
// which worker produced it or in what order.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed, std::uint64_t family = 0, std::uint64_t index = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  // Uniform on the open interval (0, 1).
  double uniform_open();

 private:
  std::array<std::uint64_t, 4> s_;
};

std::uint64_t splitmix64(std::uint64_t x);

// Stream families used by the estimators; disjoint families give independent
// samples for the two sides of a comparison.
namespace stream_family {
inline constexpr std::uint64_t kSideA = 1;
inline constexpr std::uint64_t kSideB = 2;
inline constexpr std::uint64_t kPilot = 99;
}  // namespace stream_family

}  // namespace cmpp
