// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace kadmesh {

/// Unsigned LEB128 varint, 7 bits per byte, low group first.
inline void varint_encode(uint64_t value, std::vector<uint8_t>& out) {
  while (value >= 0x80) {
    out.push_back(static_cast<uint8_t>(value) | 0x80);
    value >>= 7;
  }
  out.push_back(static_cast<uint8_t>(value));
}

inline std::vector<uint8_t> varint_encode(uint64_t value) {
  std::vector<uint8_t> out;
  varint_encode(value, out);
  return out;
}

/// Decodes one varint from the front of `data`. Returns (value, bytes
/// consumed), or nullopt on truncated input or a group past the 64-bit range.
inline std::optional<std::pair<uint64_t, size_t>> varint_decode(
    std::span<const uint8_t> data) {
  uint64_t value = 0;
  int shift = 0;
  for (size_t i = 0; i < data.size(); ++i) {
    if (shift > 63) {
      return std::nullopt;
    }
    const uint64_t group = data[i] & 0x7F;
    if (shift == 63 && group > 1) {
      return std::nullopt;
    }
    value |= group << shift;
    if ((data[i] & 0x80) == 0) {
      return std::make_pair(value, i + 1);
    }
    shift += 7;
  }
  return std::nullopt;
}

}  // namespace kadmesh
