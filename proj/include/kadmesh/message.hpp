// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "kadmesh/routing.hpp"

namespace kadmesh {

enum class MessageKind : uint8_t {
  FIND_NODE = 0,
  FIND_NODE_REPLY = 1,
  ADD_PROVIDER = 2,
  GET_PROVIDERS = 3,
  GET_PROVIDERS_REPLY = 4,
};

inline constexpr size_t kMessageKindCount = 5;

std::string_view to_string(MessageKind kind);

// The work a message is doing, used for the maintenance/query breakdown.
// Replies inherit the purpose of the request they answer.
enum class WorkPurpose : uint8_t {
  Bootstrap = 0,
  Provide = 1,
  FindProviders = 2,
  Refresh = 3,
  RandomWalk = 4,
  Cleanup = 5,
  Handshake = 6,
  Identity = 7,
};

inline constexpr size_t kWorkPurposeCount = 8;

std::string_view to_string(WorkPurpose purpose);

bool is_maintenance(WorkPurpose purpose);

struct Message {
  MessageKind kind = MessageKind::FIND_NODE;
  Key key{};
  std::vector<Contact> contacts;        // reply payload: closer peers
  std::vector<Contact> provider_peers;  // ADD_PROVIDER / GET_PROVIDERS_REPLY

  // Transport metadata, not part of the wire form: request correlation
  // and work attribution.
  uint64_t request_id = 0;
  WorkPurpose purpose = WorkPurpose::Bootstrap;

  // What the serialized header claims the key length is. Receivers drop
  // messages whose claim does not match the fixed key size; tests tamper
  // with this to drive that path.
  size_t declared_key_len = kIdSize;

  // Canonical byte form, used for size accounting only:
  // kind byte, varint key length, key bytes, then each contact list as
  // varint count followed by (id bytes, varint addr count, 4-byte addrs).
  std::vector<uint8_t> serialize() const;
  size_t wire_size() const;
};

}  // namespace kadmesh
