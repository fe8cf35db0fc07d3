#include "openssl_shake.hpp"

#include <openssl/evp.h>

#include <memory>
#include <stdexcept>

namespace ref {

std::vector<std::uint8_t> openssl_shake256(const std::vector<std::uint8_t>& message, std::size_t out_bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  std::vector<std::uint8_t> out(out_bytes);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_shake256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), message.data(), message.size()) != 1 ||
      EVP_DigestFinalXOF(ctx.get(), out.data(), out.size()) != 1) {
    throw std::runtime_error("openssl shake256 failed");
  }
  return out;
}

}  // namespace ref
