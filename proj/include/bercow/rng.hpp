// Deterministic random streams. Every stream is derived from a master seed,
// a stream name and an index, so parallel trials never share state.
#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "bercow/common.hpp"

namespace bercow {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Stream `name`/`index` of master seed `seed`.
  static Rng derive(std::uint64_t seed, std::string_view name, std::uint64_t index = 0);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, bound). Unbiased; bound must be positive.
  std::uint64_t below(std::uint64_t bound);

  /// Uniform on [lo, hi] inclusive.
  std::int64_t between(std::int64_t lo, std::int64_t hi);

  /// Uniform double on [0, 1).
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// 32 fresh bytes, for SRO seeds and tie-break seeds.
  std::array<std::uint8_t, 32> bytes32();

 private:
  std::mt19937_64 engine_;
};

/// 64-bit seed for stream `name`/`index` (first 8 bytes of a SHA-512).
std::uint64_t derive_seed(std::uint64_t seed, std::string_view name, std::uint64_t index);

}  // namespace bercow
