// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kadmesh {

/// base58btc (Bitcoin alphabet), big-endian bignum form with '1' padding
/// for leading zero bytes.
std::string base58btc_encode(std::span<const uint8_t> data);
std::optional<std::vector<uint8_t>> base58btc_decode(std::string_view text);

enum class Base32Case { lower, upper };

/// RFC 4648 base32, no padding. Decoding accepts either case.
std::string base32_encode(std::span<const uint8_t> data, Base32Case letter_case);
std::optional<std::vector<uint8_t>> base32_decode(std::string_view text);

}  // namespace kadmesh
