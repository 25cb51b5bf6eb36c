// SPDX-License-Identifier: Apache-2.0
#include "kadmesh/ident.hpp"

#include <bit>
#include <stdexcept>

#include "kadmesh/multibase.hpp"

namespace kadmesh {

Distance xor_distance(const NodeId& a, const NodeId& b) {
  Distance d;
  for (size_t i = 0; i < kIdSize; ++i) {
    d.bytes[i] = a.bytes[i] ^ b.bytes[i];
  }
  return d;
}

size_t common_prefix_len(const NodeId& a, const NodeId& b) {
  for (size_t i = 0; i < kIdSize; ++i) {
    const uint8_t x = a.bytes[i] ^ b.bytes[i];
    if (x != 0) {
      return i * 8 + static_cast<size_t>(std::countl_zero(x));
    }
  }
  return kIdBits;
}

size_t leading_zero_bits(std::span<const uint8_t> data) {
  for (size_t i = 0; i < data.size(); ++i) {
    if (data[i] != 0) {
      return i * 8 + static_cast<size_t>(std::countl_zero(data[i]));
    }
  }
  return data.size() * 8;
}

std::vector<uint8_t> Multihash::encode() const {
  std::vector<uint8_t> out;
  out.reserve(2 + digest.size());
  out.push_back(code);
  out.push_back(length);
  out.insert(out.end(), digest.begin(), digest.end());
  return out;
}

std::optional<Multihash> Multihash::decode(std::span<const uint8_t> data) {
  if (data.size() < 2) {
    return std::nullopt;
  }
  Multihash mh;
  mh.code = data[0];
  mh.length = data[1];
  if (data.size() != 2u + mh.length) {
    return std::nullopt;
  }
  mh.digest.assign(data.begin() + 2, data.end());
  return mh;
}

std::vector<uint8_t> Cid::bytes() const {
  std::vector<uint8_t> out;
  if (version == CidVersion::v1) {
    out.push_back(kCidV1Prefix);
    out.push_back(kCodecRaw);
  }
  const auto mh = multihash.encode();
  out.insert(out.end(), mh.begin(), mh.end());
  return out;
}

Key Cid::key() const {
  Key k;
  if (multihash.digest.size() == kIdSize) {
    std::copy(multihash.digest.begin(), multihash.digest.end(), k.bytes.begin());
  }
  return k;
}

namespace {

Cid cid_from_multihash(Multihash mh, CidVersion version) {
  Cid cid;
  cid.version = version;
  cid.multihash = std::move(mh);
  if (version == CidVersion::v0) {
    cid.text = base58btc_encode(cid.multihash.encode());
  } else {
    cid.text = base32_encode(cid.bytes(), Base32Case::lower);
  }
  return cid;
}

}  // namespace

Cid make_cid(std::span<const uint8_t> content, CidVersion version) {
  const auto digest = sha256(content);
  Multihash mh;
  mh.code = kMultihashSha256;
  mh.length = kIdSize;
  mh.digest.assign(digest.begin(), digest.end());
  return cid_from_multihash(std::move(mh), version);
}

Cid make_cid(std::string_view content, CidVersion version) {
  return make_cid(std::span<const uint8_t>(
                      reinterpret_cast<const uint8_t*>(content.data()),
                      content.size()),
                  version);
}

std::optional<Cid> parse_cid(std::string_view text) {
  if (text.starts_with("Qm")) {
    const auto bytes = base58btc_decode(text);
    if (!bytes) {
      return std::nullopt;
    }
    return cid_from_multihash_bytes(*bytes, CidVersion::v0);
  }
  const auto bytes = base32_decode(text);
  if (!bytes || bytes->size() < 2 || (*bytes)[0] != kCidV1Prefix ||
      (*bytes)[1] != kCodecRaw) {
    return std::nullopt;
  }
  return cid_from_multihash_bytes(
      std::span<const uint8_t>(*bytes).subspan(2), CidVersion::v1);
}

std::optional<Cid> cid_from_multihash_bytes(std::span<const uint8_t> data,
                                            CidVersion version) {
  auto mh = Multihash::decode(data);
  if (!mh || mh->code != kMultihashSha256 || mh->length != kIdSize) {
    return std::nullopt;
  }
  return cid_from_multihash(std::move(*mh), version);
}

std::string peer_id_text(const NodeId& id) {
  Multihash mh;
  mh.code = kMultihashSha256;
  mh.length = kIdSize;
  mh.digest.assign(id.bytes.begin(), id.bytes.end());
  return base58btc_encode(mh.encode());
}

std::optional<NodeId> peer_id_from_text(std::string_view text) {
  const auto bytes = base58btc_decode(text);
  if (!bytes) {
    return std::nullopt;
  }
  const auto mh = Multihash::decode(*bytes);
  if (!mh || mh->code != kMultihashSha256 || mh->length != kIdSize) {
    return std::nullopt;
  }
  NodeId id;
  std::copy(mh->digest.begin(), mh->digest.end(), id.bytes.begin());
  return id;
}

NodeId generate_node_id(std::mt19937_64& rng, int difficulty,
                        int* attempts_out) {
  if (difficulty < 0 || difficulty > kMaxIdDifficulty) {
    throw std::invalid_argument("identity difficulty out of range");
  }
  int attempts = 0;
  for (;;) {
    std::array<uint8_t, 16> seed;
    for (size_t i = 0; i < seed.size(); i += 8) {
      const uint64_t word = rng();
      for (size_t j = 0; j < 8; ++j) {
        seed[i + j] = static_cast<uint8_t>(word >> (8 * j));
      }
    }
    const auto digest = sha256(seed);
    ++attempts;
    if (leading_zero_bits(digest) >= static_cast<size_t>(difficulty)) {
      if (attempts_out != nullptr) {
        *attempts_out = attempts;
      }
      NodeId id;
      std::copy(digest.begin(), digest.end(), id.bytes.begin());
      return id;
    }
  }
}

NodeId generate_node_id(uint64_t seed, int difficulty, int* attempts_out) {
  std::mt19937_64 rng(seed);
  return generate_node_id(rng, difficulty, attempts_out);
}

}  // namespace kadmesh
