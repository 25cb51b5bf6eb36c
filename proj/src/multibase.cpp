// SPDX-License-Identifier: Apache-2.0
#include "kadmesh/multibase.hpp"

#include <array>

namespace kadmesh {

namespace {

constexpr std::string_view kB58Alphabet =
    "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz";

constexpr std::array<int8_t, 256> make_b58_reverse() {
  std::array<int8_t, 256> table{};
  for (auto& v : table) {
    v = -1;
  }
  for (size_t i = 0; i < kB58Alphabet.size(); ++i) {
    table[static_cast<uint8_t>(kB58Alphabet[i])] = static_cast<int8_t>(i);
  }
  return table;
}

constexpr auto kB58Reverse = make_b58_reverse();

constexpr std::string_view kB32Lower = "abcdefghijklmnopqrstuvwxyz234567";
constexpr std::string_view kB32Upper = "ABCDEFGHIJKLMNOPQRSTUVWXYZ234567";

}  // namespace

std::string base58btc_encode(std::span<const uint8_t> data) {
  size_t zeroes = 0;
  while (zeroes < data.size() && data[zeroes] == 0) {
    ++zeroes;
  }

  // base256 -> base58, log(256)/log(58) rounded up
  std::vector<uint8_t> digits((data.size() - zeroes) * 138 / 100 + 1);
  for (size_t i = zeroes; i < data.size(); ++i) {
    int carry = data[i];
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
      carry += 256 * (*it);
      *it = static_cast<uint8_t>(carry % 58);
      carry /= 58;
    }
  }

  auto first = digits.begin();
  while (first != digits.end() && *first == 0) {
    ++first;
  }

  std::string out;
  out.reserve(zeroes + static_cast<size_t>(digits.end() - first));
  out.assign(zeroes, '1');
  for (; first != digits.end(); ++first) {
    out += kB58Alphabet[*first];
  }
  return out;
}

std::optional<std::vector<uint8_t>> base58btc_decode(std::string_view text) {
  size_t zeroes = 0;
  while (zeroes < text.size() && text[zeroes] == '1') {
    ++zeroes;
  }

  // base58 -> base256, log(58)/log(256) rounded up
  std::vector<uint8_t> bytes((text.size() - zeroes) * 733 / 1000 + 1);
  for (size_t i = zeroes; i < text.size(); ++i) {
    int carry = kB58Reverse[static_cast<uint8_t>(text[i])];
    if (carry < 0) {
      return std::nullopt;
    }
    for (auto it = bytes.rbegin(); it != bytes.rend(); ++it) {
      carry += 58 * (*it);
      *it = static_cast<uint8_t>(carry % 256);
      carry /= 256;
    }
  }

  auto first = bytes.begin();
  while (first != bytes.end() && *first == 0) {
    ++first;
  }

  std::vector<uint8_t> out;
  out.reserve(zeroes + static_cast<size_t>(bytes.end() - first));
  out.assign(zeroes, 0);
  out.insert(out.end(), first, bytes.end());
  return out;
}

std::string base32_encode(std::span<const uint8_t> data, Base32Case letter_case) {
  const std::string_view alphabet =
      letter_case == Base32Case::lower ? kB32Lower : kB32Upper;
  std::string out;
  out.reserve((data.size() * 8 + 4) / 5);

  uint32_t buffer = 0;
  int bits = 0;
  for (uint8_t byte : data) {
    buffer = (buffer << 8) | byte;
    bits += 8;
    while (bits >= 5) {
      bits -= 5;
      out += alphabet[(buffer >> bits) & 0x1F];
    }
  }
  if (bits > 0) {
    out += alphabet[(buffer << (5 - bits)) & 0x1F];
  }
  return out;
}

std::optional<std::vector<uint8_t>> base32_decode(std::string_view text) {
  std::vector<uint8_t> out;
  out.reserve(text.size() * 5 / 8);

  uint32_t buffer = 0;
  int bits = 0;
  for (char c : text) {
    int value;
    if (c >= 'a' && c <= 'z') {
      value = c - 'a';
    } else if (c >= 'A' && c <= 'Z') {
      value = c - 'A';
    } else if (c >= '2' && c <= '7') {
      value = c - '2' + 26;
    } else {
      return std::nullopt;
    }
    buffer = (buffer << 5) | static_cast<uint32_t>(value);
    bits += 5;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<uint8_t>((buffer >> bits) & 0xFF));
    }
  }
  // trailing bits must be zero padding
  if (bits > 0 && (buffer & ((1u << bits) - 1)) != 0) {
    return std::nullopt;
  }
  return out;
}

}  // namespace kadmesh
