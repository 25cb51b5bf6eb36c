// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "kadmesh/ident.hpp"

namespace kadmesh {

/// A known peer. Addresses are simulated endpoint handles; an empty list
/// means the peer's location is not known (provider results may carry none).
struct Contact {
  NodeId id;
  std::vector<uint32_t> addrs;
  uint64_t last_seen_ms = 0;
};

inline constexpr int kDefaultBucketCapacity = 20;
inline constexpr int kDefaultMaxBuckets = 16;

/// Bucket index for a peer relative to self: shared-prefix length saturated
/// at max_buckets - 1. Throws if peer == self (self is never stored).
int bucket_index(const NodeId& self, const NodeId& peer, int max_buckets);

enum class InsertResult { Added, Refreshed, DroppedBucketFull, RejectedSelf };

/// k-bucket slot; contacts ordered least-recently-seen first.
struct KBucket {
  std::vector<Contact> contacts;
};

/// Flat array of k-buckets indexed by shared-prefix depth. A full bucket
/// drops newcomers; slots free up only through explicit removal.
class RoutingTable {
 public:
  RoutingTable(NodeId self, int k = kDefaultBucketCapacity,
               int max_buckets = kDefaultMaxBuckets);

  const NodeId& self_id() const { return self_; }
  int k() const { return k_; }
  int max_buckets() const { return max_buckets_; }

  InsertResult insert(const Contact& contact, uint64_t now_ms);
  bool remove(const NodeId& id);
  bool contains(const NodeId& id) const;
  const Contact* find(const NodeId& id) const;

  /// Up to n contacts from the whole table, ascending by XOR distance to
  /// target.
  std::vector<Contact> closest(const Key& target, size_t n) const;
  std::vector<Contact> closest(const Key& target) const;

  /// One random key per bucket index from 0 through the highest non-empty
  /// bucket; each key maps back to its paired index.
  std::vector<std::pair<int, Key>> refresh_targets(std::mt19937_64& rng) const;

  size_t size() const;
  bool empty() const { return size() == 0; }
  std::vector<Contact> all_contacts() const;
  const KBucket& bucket(int index) const { return buckets_[index]; }
  std::optional<int> highest_nonempty_bucket() const;

  /// JSON array of {bucket, peer_id_text, last_seen_ms}.
  std::string dump_json() const;

 private:
  NodeId self_;
  int k_;
  int max_buckets_;
  std::vector<KBucket> buckets_;
};

}  // namespace kadmesh
