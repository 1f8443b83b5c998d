#include "bercow/crypto.hpp"

#include <memory>

#include <openssl/core_names.h>
#include <openssl/evp.h>

namespace bercow {

namespace {

// OpenSSL 3 re-fetches algorithms on every one-shot call; keep one fetched
// context per thread instead.
struct DigestCtx {
  std::unique_ptr<EVP_MD, decltype(&EVP_MD_free)> md{EVP_MD_fetch(nullptr, "SHA512", nullptr), EVP_MD_free};
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx{EVP_MD_CTX_new(), EVP_MD_CTX_free};
};

struct MacCtx {
  MacCtx() {
    std::unique_ptr<EVP_MAC, decltype(&EVP_MAC_free)> mac{EVP_MAC_fetch(nullptr, "HMAC", nullptr), EVP_MAC_free};
    if (!mac) return;
    ctx.reset(EVP_MAC_CTX_new(mac.get()));
    char digest[] = "SHA512";
    OSSL_PARAM params[] = {OSSL_PARAM_construct_utf8_string(OSSL_MAC_PARAM_DIGEST, digest, 0),
                           OSSL_PARAM_construct_end()};
    if (ctx && EVP_MAC_CTX_set_params(ctx.get(), params) != 1) ctx.reset();
  }
  std::unique_ptr<EVP_MAC_CTX, decltype(&EVP_MAC_CTX_free)> ctx{nullptr, EVP_MAC_CTX_free};
};

}  // namespace

Digest sha512(ByteView data) {
  thread_local DigestCtx d;
  Digest out{};
  unsigned int len = 0;
  if (!d.md || !d.ctx || EVP_DigestInit_ex(d.ctx.get(), d.md.get(), nullptr) != 1 ||
      EVP_DigestUpdate(d.ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(d.ctx.get(), out.data(), &len) != 1 || len != out.size()) {
    fail(ErrorCategory::sro, "SHA-512 failed");
  }
  return out;
}

Digest hmac_sha512(ByteView key, ByteView data) {
  thread_local MacCtx m;
  Digest out{};
  std::size_t len = 0;
  // A zero-length key must still be passed as non-null to reset the state.
  static const unsigned char empty = 0;
  const unsigned char* k = key.empty() ? &empty : key.data();
  if (!m.ctx || EVP_MAC_init(m.ctx.get(), k, key.size(), nullptr) != 1 ||
      EVP_MAC_update(m.ctx.get(), data.data(), data.size()) != 1 ||
      EVP_MAC_final(m.ctx.get(), out.data(), &len, out.size()) != 1 || len != out.size()) {
    fail(ErrorCategory::sro, "HMAC-SHA512 failed");
  }
  return out;
}

}  // namespace bercow
