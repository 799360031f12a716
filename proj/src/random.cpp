#include "geocount/random.hpp"

#include <cmath>

namespace geocount {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RandomStream RandomStream::derive(std::uint64_t master_seed, std::uint64_t task) {
  return RandomStream(splitmix64(master_seed) ^ splitmix64(~task * 0xD1B54A32D192ED03ULL));
}

double RandomStream::uniform_open() {
  // 53 random bits mapped to the open interval.
  const std::uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double RandomStream::exponential() { return -std::log(uniform_open()); }

double RandomStream::normal() {
  std::normal_distribution<double> n(0.0, 1.0);
  return n(engine_);
}

}  // namespace geocount
