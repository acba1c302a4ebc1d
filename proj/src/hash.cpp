#include "seal/hash.hpp"

#include <openssl/evp.h>

#include <stdexcept>

namespace seal {

namespace {

// One context per thread; re-initialized per digest. Avoids the
// alloc/free cost of EVP_Digest in hash-heavy loops.
EVP_MD_CTX* thread_ctx() {
  thread_local EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  return ctx;
}

}  // namespace

Seed256 sha256(std::initializer_list<std::span<const std::uint8_t>> parts) {
  EVP_MD_CTX* ctx = thread_ctx();
  if (EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 init failed");
  }
  for (const auto& part : parts) {
    if (!part.empty() && EVP_DigestUpdate(ctx, part.data(), part.size()) != 1) {
      throw std::runtime_error("sha256 update failed");
    }
  }
  Seed256 digest{};
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(ctx, digest.data(), &len) != 1 || len != digest.size()) {
    throw std::runtime_error("sha256 final failed");
  }
  return digest;
}

Seed256 sha256(std::span<const std::uint8_t> data) {
  return sha256({data});
}

}  // namespace seal
