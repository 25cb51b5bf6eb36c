// SPDX-License-Identifier: Apache-2.0
#include "kadmesh/message.hpp"

#include "kadmesh/varint.hpp"

namespace kadmesh {

std::string_view to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::FIND_NODE:
      return "find_node";
    case MessageKind::FIND_NODE_REPLY:
      return "find_node_reply";
    case MessageKind::ADD_PROVIDER:
      return "add_provider";
    case MessageKind::GET_PROVIDERS:
      return "get_providers";
    case MessageKind::GET_PROVIDERS_REPLY:
      return "get_providers_reply";
  }
  return "unknown";
}

std::string_view to_string(WorkPurpose purpose) {
  switch (purpose) {
    case WorkPurpose::Bootstrap:
      return "bootstrap";
    case WorkPurpose::Provide:
      return "provide";
    case WorkPurpose::FindProviders:
      return "find_providers";
    case WorkPurpose::Refresh:
      return "refresh";
    case WorkPurpose::RandomWalk:
      return "random_walk";
    case WorkPurpose::Cleanup:
      return "cleanup";
    case WorkPurpose::Handshake:
      return "handshake";
    case WorkPurpose::Identity:
      return "identity";
  }
  return "unknown";
}

bool is_maintenance(WorkPurpose purpose) {
  return purpose == WorkPurpose::Refresh ||
         purpose == WorkPurpose::RandomWalk ||
         purpose == WorkPurpose::Cleanup;
}

namespace {

void write_contacts(const std::vector<Contact>& contacts,
                    std::vector<uint8_t>& out) {
  varint_encode(contacts.size(), out);
  for (const auto& contact : contacts) {
    out.insert(out.end(), contact.id.bytes.begin(), contact.id.bytes.end());
    varint_encode(contact.addrs.size(), out);
    for (const uint32_t addr : contact.addrs) {
      for (int shift = 0; shift < 32; shift += 8) {
        out.push_back(static_cast<uint8_t>(addr >> shift));
      }
    }
  }
}

}  // namespace

std::vector<uint8_t> Message::serialize() const {
  std::vector<uint8_t> out;
  out.push_back(static_cast<uint8_t>(kind));
  varint_encode(key.bytes.size(), out);
  out.insert(out.end(), key.bytes.begin(), key.bytes.end());
  write_contacts(contacts, out);
  write_contacts(provider_peers, out);
  return out;
}

size_t Message::wire_size() const { return serialize().size(); }

}  // namespace kadmesh
