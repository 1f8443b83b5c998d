#include "bercow/rng.hpp"

#include "bercow/crypto.hpp"

namespace bercow {

std::uint64_t derive_seed(std::uint64_t seed, std::string_view name, std::uint64_t index) {
  auto d = HashInput("bercow.rng").add_u64(seed).add(name).add_u64(index).digest();
  return load_u64_be(d);
}

Rng Rng::derive(std::uint64_t seed, std::string_view name, std::uint64_t index) {
  return Rng(derive_seed(seed, name, index));
}

std::uint64_t Rng::below(std::uint64_t bound) {
  require(bound > 0, "Rng::below needs a positive bound");
  // Lemire's multiply-shift with rejection.
  unsigned __int128 m = static_cast<unsigned __int128>(engine_()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(engine_()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

std::int64_t Rng::between(std::int64_t lo, std::int64_t hi) {
  require(lo <= hi, "Rng::between needs lo <= hi");
  auto span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
  if (span == UINT64_MAX) return static_cast<std::int64_t>(engine_());
  return lo + static_cast<std::int64_t>(below(span + 1));
}

std::array<std::uint8_t, 32> Rng::bytes32() {
  std::array<std::uint8_t, 32> out{};
  for (std::size_t i = 0; i < out.size(); i += 8) {
    std::uint64_t v = engine_();
    for (std::size_t j = 0; j < 8; ++j) out[i + j] = static_cast<std::uint8_t>(v >> (56 - 8 * j));
  }
  return out;
}

}  // namespace bercow
