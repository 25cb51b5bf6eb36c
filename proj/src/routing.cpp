// SPDX-License-Identifier: Apache-2.0
#include "kadmesh/routing.hpp"

#include <algorithm>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace kadmesh {

int bucket_index(const NodeId& self, const NodeId& peer, int max_buckets) {
  if (self == peer) {
    throw std::invalid_argument("bucket_index: peer equals self");
  }
  const auto cpl = static_cast<int>(common_prefix_len(self, peer));
  return std::min(cpl, max_buckets - 1);
}

RoutingTable::RoutingTable(NodeId self, int k, int max_buckets)
    : self_(self), k_(k), max_buckets_(max_buckets),
      buckets_(static_cast<size_t>(max_buckets)) {
  if (k < 1 || max_buckets < 1 || max_buckets > static_cast<int>(kIdBits)) {
    throw std::invalid_argument("routing table parameters out of range");
  }
}

InsertResult RoutingTable::insert(const Contact& contact, uint64_t now_ms) {
  if (contact.id == self_) {
    return InsertResult::RejectedSelf;
  }
  auto& bucket = buckets_[bucket_index(self_, contact.id, max_buckets_)];

  auto it = std::find_if(bucket.contacts.begin(), bucket.contacts.end(),
                         [&](const Contact& c) { return c.id == contact.id; });
  if (it != bucket.contacts.end()) {
    // move to most-recently-seen
    Contact refreshed = *it;
    refreshed.last_seen_ms = now_ms;
    if (!contact.addrs.empty()) {
      refreshed.addrs = contact.addrs;
    }
    bucket.contacts.erase(it);
    bucket.contacts.push_back(std::move(refreshed));
    return InsertResult::Refreshed;
  }
  if (bucket.contacts.size() >= static_cast<size_t>(k_)) {
    return InsertResult::DroppedBucketFull;
  }
  Contact added = contact;
  added.last_seen_ms = now_ms;
  bucket.contacts.push_back(std::move(added));
  return InsertResult::Added;
}

bool RoutingTable::remove(const NodeId& id) {
  if (id == self_) {
    return false;
  }
  auto& bucket = buckets_[bucket_index(self_, id, max_buckets_)];
  auto it = std::find_if(bucket.contacts.begin(), bucket.contacts.end(),
                         [&](const Contact& c) { return c.id == id; });
  if (it == bucket.contacts.end()) {
    return false;
  }
  bucket.contacts.erase(it);
  return true;
}

bool RoutingTable::contains(const NodeId& id) const {
  return find(id) != nullptr;
}

const Contact* RoutingTable::find(const NodeId& id) const {
  if (id == self_) {
    return nullptr;
  }
  const auto& bucket = buckets_[bucket_index(self_, id, max_buckets_)];
  for (const auto& c : bucket.contacts) {
    if (c.id == id) {
      return &c;
    }
  }
  return nullptr;
}

std::vector<Contact> RoutingTable::closest(const Key& target, size_t n) const {
  auto contacts = all_contacts();
  std::sort(contacts.begin(), contacts.end(),
            [&](const Contact& a, const Contact& b) {
              return xor_distance(a.id, target) < xor_distance(b.id, target);
            });
  if (contacts.size() > n) {
    contacts.resize(n);
  }
  return contacts;
}

std::vector<Contact> RoutingTable::closest(const Key& target) const {
  return closest(target, static_cast<size_t>(k_));
}

std::vector<std::pair<int, Key>> RoutingTable::refresh_targets(
    std::mt19937_64& rng) const {
  const auto highest = highest_nonempty_bucket();
  if (!highest) {
    return {};
  }

  std::vector<std::pair<int, Key>> targets;
  targets.reserve(static_cast<size_t>(*highest) + 1);
  for (int index = 0; index <= *highest; ++index) {
    Key key;
    for (auto& b : key.bytes) {
      b = static_cast<uint8_t>(rng());
    }
    // first `index` bits follow self, then (below the saturated bucket) one
    // flipped bit pins the shared-prefix length
    const int fixed_bits =
        index < max_buckets_ - 1 ? index + 1 : max_buckets_ - 1;
    for (int bit = 0; bit < fixed_bits; ++bit) {
      const uint8_t mask = static_cast<uint8_t>(0x80u >> (bit % 8));
      uint8_t& byte = key.bytes[static_cast<size_t>(bit / 8)];
      uint8_t want = self_.bytes[static_cast<size_t>(bit / 8)] & mask;
      if (bit == index) {
        want ^= mask;
      }
      byte = static_cast<uint8_t>((byte & ~mask) | want);
    }
    if (key == self_) {
      key.bytes.back() ^= 0x01;
    }
    targets.emplace_back(index, key);
  }
  return targets;
}

size_t RoutingTable::size() const {
  size_t total = 0;
  for (const auto& bucket : buckets_) {
    total += bucket.contacts.size();
  }
  return total;
}

std::vector<Contact> RoutingTable::all_contacts() const {
  std::vector<Contact> out;
  out.reserve(size());
  for (const auto& bucket : buckets_) {
    out.insert(out.end(), bucket.contacts.begin(), bucket.contacts.end());
  }
  return out;
}

std::optional<int> RoutingTable::highest_nonempty_bucket() const {
  for (int i = max_buckets_ - 1; i >= 0; --i) {
    if (!buckets_[static_cast<size_t>(i)].contacts.empty()) {
      return i;
    }
  }
  return std::nullopt;
}

std::string RoutingTable::dump_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (int i = 0; i < max_buckets_; ++i) {
    for (const auto& c : buckets_[static_cast<size_t>(i)].contacts) {
      out.push_back({{"bucket", i},
                     {"peer_id_text", peer_id_text(c.id)},
                     {"last_seen_ms", c.last_seen_ms}});
    }
  }
  return out.dump();
}

}  // namespace kadmesh
