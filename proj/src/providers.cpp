// SPDX-License-Identifier: Apache-2.0
#include "kadmesh/providers.hpp"

#include <utility>

#include "kadmesh/multibase.hpp"
#include "kadmesh/varint.hpp"

namespace kadmesh {

namespace {

constexpr std::string_view kPrefix = "/providers/";

uint64_t decode_time(const std::vector<uint8_t>& value) {
  const auto decoded = varint_decode(value);
  return decoded ? decoded->first : 0;
}

bool expired(uint64_t entered_at, uint64_t now, uint64_t ttl) {
  if (now < entered_at) {
    return false;
  }
  return now - entered_at >= ttl;
}

std::string cid_segment(const Cid& cid) {
  return base32_encode(cid.multihash.encode(), Base32Case::upper);
}

}  // namespace

ProviderKey ProviderKey::make(const Cid& cid, const NodeId& peer) {
  std::string text(kPrefix);
  text += cid_segment(cid);
  text += '/';
  text += base32_encode(peer.bytes, Base32Case::upper);
  return ProviderKey{std::move(text)};
}

std::optional<ProviderKey::Parts> ProviderKey::parse(std::string_view text) {
  if (text.substr(0, kPrefix.size()) != kPrefix) {
    return std::nullopt;
  }
  text.remove_prefix(kPrefix.size());
  const size_t slash = text.find('/');
  if (slash == std::string_view::npos) {
    return std::nullopt;
  }
  const auto mh_bytes = base32_decode(text.substr(0, slash));
  const auto peer_bytes = base32_decode(text.substr(slash + 1));
  if (!mh_bytes || !peer_bytes || peer_bytes->size() != kIdSize) {
    return std::nullopt;
  }
  if (!Multihash::decode(*mh_bytes)) {
    return std::nullopt;
  }
  Parts parts;
  parts.cid_multihash = *mh_bytes;
  std::copy(peer_bytes->begin(), peer_bytes->end(),
            parts.peer.bytes.begin());
  return parts;
}

ProviderStore::ProviderStore(ProviderStoreConfig config)
    : config_(config) {}

void ProviderStore::add(const Cid& cid, const NodeId& peer,
                        uint64_t now_ms) {
  datastore_[ProviderKey::make(cid, peer).text] = varint_encode(now_ms);
  const auto it = cache_index_.find(cid.key());
  if (it != cache_index_.end()) {
    lru_.splice(lru_.end(), lru_, it->second);
    it->second->peers[peer] = now_ms;
    return;
  }
  CacheEntry entry;
  entry.cid_key = cid.key();
  entry.peers = scan_datastore(cid);
  lru_.push_back(std::move(entry));
  cache_index_[cid.key()] = std::prev(lru_.end());
  evict_if_over_capacity();
}

std::vector<NodeId> ProviderStore::get(const Cid& cid, uint64_t now_ms) {
  const CacheEntry* entry = nullptr;
  const auto it = cache_index_.find(cid.key());
  if (it != cache_index_.end()) {
    lru_.splice(lru_.end(), lru_, it->second);
    entry = &*it->second;
  } else {
    auto peers = scan_datastore(cid);
    if (peers.empty()) {
      return {};
    }
    CacheEntry fresh;
    fresh.cid_key = cid.key();
    fresh.peers = std::move(peers);
    lru_.push_back(std::move(fresh));
    cache_index_[cid.key()] = std::prev(lru_.end());
    evict_if_over_capacity();
    entry = &lru_.back();
  }
  std::vector<NodeId> live;
  for (const auto& [peer, entered_at] : entry->peers) {
    if (!expired(entered_at, now_ms, config_.ttl_ms)) {
      live.push_back(peer);
    }
  }
  return live;
}

size_t ProviderStore::cleanup(uint64_t now_ms) {
  size_t removed = 0;
  for (auto it = datastore_.begin(); it != datastore_.end();) {
    if (expired(decode_time(it->second), now_ms, config_.ttl_ms)) {
      it = datastore_.erase(it);
      ++removed;
    } else {
      ++it;
    }
  }
  for (auto it = lru_.begin(); it != lru_.end();) {
    for (auto peer = it->peers.begin(); peer != it->peers.end();) {
      if (expired(peer->second, now_ms, config_.ttl_ms)) {
        peer = it->peers.erase(peer);
      } else {
        ++peer;
      }
    }
    if (it->peers.empty()) {
      cache_index_.erase(it->cid_key);
      it = lru_.erase(it);
    } else {
      ++it;
    }
  }
  return removed;
}

std::string ProviderStore::dump() const {
  std::string out;
  for (const auto& [key, value] : datastore_) {
    out += key;
    out += ' ';
    out += std::to_string(decode_time(value));
    out += '\n';
  }
  return out;
}

std::map<NodeId, uint64_t> ProviderStore::scan_datastore(const Cid& cid) {
  ++datastore_reads_;
  std::string prefix(kPrefix);
  prefix += cid_segment(cid);
  prefix += '/';
  std::map<NodeId, uint64_t> peers;
  for (auto it = datastore_.lower_bound(prefix); it != datastore_.end();
       ++it) {
    if (it->first.compare(0, prefix.size(), prefix) != 0) {
      break;
    }
    const auto parts = ProviderKey::parse(it->first);
    if (parts) {
      peers[parts->peer] = decode_time(it->second);
    }
  }
  return peers;
}

void ProviderStore::evict_if_over_capacity() {
  while (lru_.size() > config_.cache_capacity) {
    cache_index_.erase(lru_.front().cid_key);
    lru_.pop_front();
  }
}

}  // namespace kadmesh
