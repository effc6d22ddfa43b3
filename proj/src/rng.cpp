#include "cmpp/rng.hpp"

#include <bit>

namespace cmpp {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t family, std::uint64_t index) {
  std::uint64_t k = splitmix64(seed);
  k = splitmix64(k ^ (family * 0x9E3779B97F4A7C15ULL));
  k = splitmix64(k ^ (index * 0xD1B54A32D192ED03ULL));
  for (auto& word : s_) {
    k += 0x9E3779B97F4A7C15ULL;
    word = splitmix64(k);
  }
}

RngStream::result_type RngStream::operator()() {
  const std::uint64_t result = std::rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = std::rotl(s_[3], 45);
  return result;
}

double RngStream::uniform_open() {
  return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace cmpp
