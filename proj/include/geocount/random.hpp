#pragma once

#include <cstdint>
#include <random>

namespace geocount {

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// A seeded random stream. Each Monte Carlo task owns one; streams for
/// parallel tasks are derived from a master seed and a task counter so no
/// two tasks ever share state.
class RandomStream {
 public:
  using engine_type = std::mt19937_64;

  explicit RandomStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  static RandomStream derive(std::uint64_t master_seed, std::uint64_t task);

  engine_type& engine() noexcept { return engine_; }

  /// Uniform on (0, 1), never returning the endpoints.
  double uniform_open();
  double exponential();  // rate 1
  double normal();

 private:
  engine_type engine_;
};

}  // namespace geocount
