// Hash primitives. HASH throughout the library is SHA-512.
#pragma once

#include "bercow/common.hpp"

namespace bercow {

Digest sha512(ByteView data);
Digest hmac_sha512(ByteView key, ByteView data);

/// Incremental message builder for domain-separated hashing.
class HashInput {
 public:
  explicit HashInput(std::string_view domain) { add(domain); }

  HashInput& add(ByteView bytes) {
    append_u64(buf_, bytes.size());
    buf_.insert(buf_.end(), bytes.begin(), bytes.end());
    return *this;
  }
  HashInput& add(std::string_view s) { return add(as_bytes(s)); }
  HashInput& add_u64(std::uint64_t v) {
    append_u64(buf_, v);
    return *this;
  }

  Digest digest() const { return sha512(buf_); }
  const Bytes& bytes() const { return buf_; }

 private:
  Bytes buf_;
};

}  // namespace bercow
