#pragma once

#include <cstdint>
#include <random>

namespace econet {

// splitmix64 finalizer; used for seed derivation and keyed hashing.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Sub-seed for a (cell, replica) pair:
//   mix64(master ^ mix64(a ^ mix64(b)))
// Independent of evaluation order, so parallel sweeps reproduce serial ones.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                    std::uint64_t b = 0) noexcept {
  return mix64(master ^ mix64(a ^ mix64(b)));
}

// Seedable random stream. The engine is std::mt19937_64 (bit-exact across
// standard libraries); the conversions below are written out because the
// std distributions are implementation-defined.
class Rng {
public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n), n > 0. Lemire's multiply-shift with rejection.
  std::uint64_t below(std::uint64_t n) {
    std::uint64_t x = engine_();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        x = engine_();
        m = static_cast<__uint128_t>(x) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  // UniformRandomBitGenerator interface, for std::shuffle and friends.
  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

private:
  std::mt19937_64 engine_;
};

}  // namespace econet
