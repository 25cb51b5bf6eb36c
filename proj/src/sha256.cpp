// SPDX-License-Identifier: Apache-2.0
#include "kadmesh/sha256.hpp"

#include <openssl/evp.h>

#include <stdexcept>

namespace kadmesh {

Sha256Digest sha256(std::span<const uint8_t> data) {
  Sha256Digest digest{};
  unsigned int written = 0;
  if (EVP_Digest(data.data(), data.size(), digest.data(), &written,
                 EVP_sha256(), nullptr) != 1 ||
      written != digest.size()) {
    throw std::runtime_error("sha256 digest failed");
  }
  return digest;
}

Sha256Digest sha256(std::string_view data) {
  return sha256(std::span<const uint8_t>(
      reinterpret_cast<const uint8_t*>(data.data()), data.size()));
}

}  // namespace kadmesh
