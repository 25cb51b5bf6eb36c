// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kadmesh/sha256.hpp"

namespace kadmesh {

inline constexpr size_t kIdSize = 32;
inline constexpr size_t kIdBits = kIdSize * 8;

/// 256-bit identifier in the XOR key space. Peers and content keys share
/// this space.
struct NodeId {
  std::array<uint8_t, kIdSize> bytes{};

  auto operator<=>(const NodeId&) const = default;
};

/// Content keys are points in the same space as node ids.
using Key = NodeId;

/// XOR of two identifiers, ordered lexicographically big-endian.
struct Distance {
  std::array<uint8_t, kIdSize> bytes{};

  auto operator<=>(const Distance&) const = default;

  bool is_zero() const {
    for (uint8_t b : bytes) {
      if (b != 0) {
        return false;
      }
    }
    return true;
  }
};

Distance xor_distance(const NodeId& a, const NodeId& b);

/// Number of leading identical bits, in [0, 256]; 256 iff a == b.
size_t common_prefix_len(const NodeId& a, const NodeId& b);

/// Leading zero bits of a digest (used for identity hardening).
size_t leading_zero_bits(std::span<const uint8_t> data);

// -- multihash / CID ---------------------------------------------------------

inline constexpr uint8_t kMultihashSha256 = 0x12;
inline constexpr uint8_t kCidV1Prefix = 0x01;
inline constexpr uint8_t kCodecRaw = 0x55;

struct Multihash {
  uint8_t code = kMultihashSha256;
  uint8_t length = kIdSize;
  std::vector<uint8_t> digest;

  /// code || length || digest
  std::vector<uint8_t> encode() const;
  static std::optional<Multihash> decode(std::span<const uint8_t> data);

  bool operator==(const Multihash&) const = default;
};

enum class CidVersion : uint8_t { v0 = 0, v1 = 1 };

/// Content identifier. v0 text is base58btc of the encoded multihash, v1
/// text is lowercase unpadded base32 of 0x01 || 0x55 || multihash.
struct Cid {
  CidVersion version = CidVersion::v0;
  Multihash multihash;
  std::string text;

  /// Encoded byte form: v0 = multihash bytes, v1 = version/codec prefixed.
  std::vector<uint8_t> bytes() const;

  /// The cid's digest as a point in the key space.
  Key key() const;

  bool operator==(const Cid&) const = default;
};

Cid make_cid(std::span<const uint8_t> content, CidVersion version);
Cid make_cid(std::string_view content, CidVersion version);

/// Rebuilds a Cid from canonical text. v0 is recognized by its "Qm" prefix.
std::optional<Cid> parse_cid(std::string_view text);

/// Cid for an already-computed sha2-256 multihash byte form.
std::optional<Cid> cid_from_multihash_bytes(std::span<const uint8_t> data,
                                            CidVersion version);

// -- peer identity -----------------------------------------------------------

/// "Qm..." display form: base58btc of the id wrapped as a sha2-256 multihash.
std::string peer_id_text(const NodeId& id);
std::optional<NodeId> peer_id_from_text(std::string_view text);

/// Derives an id by hashing random 16-byte seeds until the digest carries at
/// least `difficulty` leading zero bits. Difficulty 0 accepts the first
/// candidate. attempts_out, when given, receives the number of hash
/// evaluations.
NodeId generate_node_id(std::mt19937_64& rng, int difficulty,
                        int* attempts_out = nullptr);
NodeId generate_node_id(uint64_t seed, int difficulty,
                        int* attempts_out = nullptr);

inline constexpr int kMaxIdDifficulty = 24;

}  // namespace kadmesh
