// Shared primitive types and the error type used across the library.
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bercow {

/// Time in integer microseconds.
using Micros = std::int64_t;

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// A 512-bit digest.
using Digest = std::array<std::uint8_t, 64>;

using NodeId = std::uint32_t;

constexpr Micros kMicrosPerMilli = 1000;

/// Coarse failure classes. The CLI maps each to a distinct exit code.
enum class ErrorCategory {
  contract,  // precondition violated by the caller
  config,    // bad experiment or simulation configuration
  parse,     // malformed input file or argument
  io,        // filesystem failure
  sro,       // oracle refused or failed to produce a value
};

std::string_view to_string(ErrorCategory c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

[[noreturn]] void fail(ErrorCategory category, const std::string& what);

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorCategory::contract, what);
}

std::string to_hex(ByteView bytes);
Bytes from_hex(std::string_view hex);

inline ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

/// Appends the big-endian encoding of v.
void append_u64(Bytes& out, std::uint64_t v);
std::uint64_t load_u64_be(ByteView bytes);

}  // namespace bercow
