// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <list>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kadmesh/ident.hpp"

namespace kadmesh {

// Datastore key for one (cid, peer) provider record. Both segments are
// uppercase unpadded base32 and round-trip to the original bytes.
struct ProviderKey {
  std::string text;

  struct Parts {
    std::vector<uint8_t> cid_multihash;
    NodeId peer;
  };

  static ProviderKey make(const Cid& cid, const NodeId& peer);
  static std::optional<Parts> parse(std::string_view text);
};

struct ProviderStoreConfig {
  size_t cache_capacity = 256;
  uint64_t ttl_ms = 3'600'000;
  uint64_t cleanup_interval_ms = 3'600'000;
};

// Provider records for one node: an ordered datastore of
// (cid, peer) -> varint(entered_at) plus an LRU cache keyed by cid.
//
// The cache is a strict subset view of the datastore: a cached cid always
// carries exactly the datastore's peer set for that cid. Reads filter
// expired records but never delete them; only cleanup() removes records.
class ProviderStore {
 public:
  explicit ProviderStore(ProviderStoreConfig config = {});

  void add(const Cid& cid, const NodeId& peer, uint64_t now_ms);

  // Peers whose records satisfy now - entered_at < ttl. A cache hit does
  // not touch the datastore; see datastore_reads().
  std::vector<NodeId> get(const Cid& cid, uint64_t now_ms);

  // Removes every record with now - entered_at >= ttl from both the
  // datastore and the cache. Returns the number of records removed.
  size_t cleanup(uint64_t now_ms);

  size_t record_count() const { return datastore_.size(); }
  size_t cache_size() const { return lru_.size(); }

  // Number of datastore scans taken by cache misses. Stays flat across
  // cache hits, which is how tests observe the cache actually fronting
  // the datastore.
  uint64_t datastore_reads() const { return datastore_reads_; }

  const ProviderStoreConfig& config() const { return config_; }

  // One line per record, in key order: "<key text> <entered_at_ms>".
  std::string dump() const;

 private:
  struct CacheEntry {
    Key cid_key;
    std::map<NodeId, uint64_t> peers;  // peer -> entered_at_ms
  };
  using LruList = std::list<CacheEntry>;

  // Loads the datastore's peer set for one cid. Counts as a datastore read.
  std::map<NodeId, uint64_t> scan_datastore(const Cid& cid);
  void evict_if_over_capacity();

  ProviderStoreConfig config_;
  std::map<std::string, std::vector<uint8_t>> datastore_;
  LruList lru_;  // front = least recently used
  std::map<Key, LruList::iterator> cache_index_;
  uint64_t datastore_reads_ = 0;
};

}  // namespace kadmesh
