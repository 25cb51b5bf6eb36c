// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <deque>
#include <random>
#include <sstream>

#include "kadmesh/multibase.hpp"
#include "kadmesh/providers.hpp"
#include "kadmesh/varint.hpp"

using namespace kadmesh;

namespace {

NodeId random_id(std::mt19937_64& rng) {
  NodeId id;
  for (auto& b : id.bytes) {
    b = static_cast<uint8_t>(rng());
  }
  return id;
}

Cid cid_for(int i) {
  return make_cid("content " + std::to_string(i), CidVersion::v0);
}

/// Reference LRU: a plain deque of cid keys, front = least recently used.
struct ReferenceLru {
  std::deque<Key> order;
  size_t capacity;

  std::vector<Key> touch(const Key& key) {
    const auto it = std::find(order.begin(), order.end(), key);
    if (it != order.end()) {
      order.erase(it);
    }
    order.push_back(key);
    std::vector<Key> evicted;
    while (order.size() > capacity) {
      evicted.push_back(order.front());
      order.pop_front();
    }
    return evicted;
  }
};

}  // namespace

TEST_CASE("provider key layout and round trip") {
  std::mt19937_64 rng(211);
  const Cid cid = make_cid("hello world!", CidVersion::v0);
  const NodeId peer = random_id(rng);

  const ProviderKey key = ProviderKey::make(cid, peer);
  CHECK(key.text.rfind("/providers/", 0) == 0);
  const std::string expected =
      "/providers/" +
      base32_encode(cid.multihash.encode(), Base32Case::upper) + "/" +
      base32_encode(peer.bytes, Base32Case::upper);
  CHECK(key.text == expected);

  const auto parts = ProviderKey::parse(key.text);
  REQUIRE(parts.has_value());
  CHECK(parts->cid_multihash == cid.multihash.encode());
  CHECK(parts->peer == peer);

  CHECK_FALSE(ProviderKey::parse("/other/abc/def").has_value());
  CHECK_FALSE(ProviderKey::parse("/providers/onesegment").has_value());
  CHECK_FALSE(ProviderKey::parse("/providers/AA/AA").has_value());
}

TEST_CASE("provider key round-trips for random pairs") {
  std::mt19937_64 rng(223);
  for (int i = 0; i < 1000; ++i) {
    std::string content = "blob " + std::to_string(rng());
    const Cid cid = make_cid(
        content, (i % 2 == 0) ? CidVersion::v0 : CidVersion::v1);
    const NodeId peer = random_id(rng);
    const auto parts = ProviderKey::parse(ProviderKey::make(cid, peer).text);
    REQUIRE(parts.has_value());
    CHECK(parts->cid_multihash == cid.multihash.encode());
    CHECK(parts->peer == peer);
  }
}

TEST_CASE("add then get returns the provider") {
  std::mt19937_64 rng(227);
  ProviderStore store;
  const Cid cid = cid_for(0);
  const NodeId peer = random_id(rng);

  CHECK(store.get(cid, 0).empty());

  store.add(cid, peer, 10);
  const auto got = store.get(cid, 20);
  REQUIRE(got.size() == 1);
  CHECK(got[0] == peer);
  CHECK(store.record_count() == 1);
}

TEST_CASE("re-adding the same pair refreshes entered_at") {
  std::mt19937_64 rng(229);
  ProviderStore store;
  const Cid cid = cid_for(1);
  const NodeId peer = random_id(rng);

  store.add(cid, peer, 100);
  store.add(cid, peer, 2000);
  CHECK(store.record_count() == 1);

  std::istringstream lines(store.dump());
  std::string key_text;
  uint64_t entered_at = 0;
  lines >> key_text >> entered_at;
  CHECK(key_text == ProviderKey::make(cid, peer).text);
  CHECK(entered_at == 2000);
}

TEST_CASE("ttl boundary: alive at ttl - 1, gone at exactly ttl") {
  std::mt19937_64 rng(233);
  ProviderStore store;
  const uint64_t ttl = store.config().ttl_ms;
  const Cid cid = cid_for(2);
  store.add(cid, random_id(rng), 0);

  CHECK(store.get(cid, ttl - 1).size() == 1);
  CHECK(store.get(cid, ttl).empty());
  // reads filter without deleting
  CHECK(store.record_count() == 1);
}

TEST_CASE("cleanup removes exactly the expired records") {
  std::mt19937_64 rng(239);
  ProviderStore store;
  const uint64_t ttl = store.config().ttl_ms;

  CHECK(store.cleanup(ttl) == 0);

  // 10 records at t=0 all expire at the one-hour mark
  for (int i = 0; i < 10; ++i) {
    store.add(cid_for(i), random_id(rng), 0);
  }
  CHECK(store.cleanup(ttl) == 10);
  CHECK(store.record_count() == 0);
  CHECK(store.cache_size() == 0);

  // mixed ages: removed set equals a brute-force filter by age
  struct Entry {
    Cid cid;
    NodeId peer;
    uint64_t at;
  };
  std::vector<Entry> entries;
  for (int i = 0; i < 200; ++i) {
    Entry e{cid_for(i % 60), random_id(rng), rng() % (2 * ttl)};
    store.add(e.cid, e.peer, e.at);
    entries.push_back(e);
  }
  const uint64_t now = 2 * ttl;
  const size_t expected_removed =
      static_cast<size_t>(std::count_if(
          entries.begin(), entries.end(),
          [&](const Entry& e) { return now - e.at >= ttl; }));
  CHECK(store.cleanup(now) == expected_removed);
  for (const auto& e : entries) {
    const auto got = store.get(e.cid, now);
    const bool found = std::find(got.begin(), got.end(), e.peer) != got.end();
    CHECK(found == (now - e.at < ttl));
  }
}

TEST_CASE("cache holds at most 256 cids while the datastore keeps all") {
  std::mt19937_64 rng(241);
  ProviderStore store;
  const NodeId peer = random_id(rng);
  for (int i = 0; i < 257; ++i) {
    store.add(cid_for(i), peer, 0);
  }
  CHECK(store.cache_size() == 256);
  CHECK(store.record_count() == 257);
  // the evicted cid is still answerable from the datastore
  CHECK(store.get(cid_for(0), 1).size() == 1);
}

TEST_CASE("cache hits do not touch the datastore") {
  std::mt19937_64 rng(251);
  ProviderStore store;
  const Cid cid = cid_for(0);
  store.add(cid, random_id(rng), 0);

  uint64_t reads = store.datastore_reads();
  for (int i = 0; i < 5; ++i) {
    CHECK(store.get(cid, 1).size() == 1);
  }
  CHECK(store.datastore_reads() == reads);

  // evict cid 0, the next get must go back to the datastore
  for (int i = 1; i <= 256; ++i) {
    store.add(cid_for(i), random_id(rng), 0);
  }
  reads = store.datastore_reads();
  CHECK(store.get(cid, 1).size() == 1);
  CHECK(store.datastore_reads() == reads + 1);
  // and is a cache hit again afterwards
  CHECK(store.get(cid, 1).size() == 1);
  CHECK(store.datastore_reads() == reads + 1);
}

TEST_CASE("eviction order matches a reference lru on the same trace") {
  std::mt19937_64 rng(257);
  ProviderStoreConfig config;
  config.cache_capacity = 8;
  ProviderStore store(config);
  ReferenceLru reference{{}, config.cache_capacity};

  std::vector<Cid> cids;
  for (int i = 0; i < 24; ++i) {
    cids.push_back(cid_for(i));
  }
  const NodeId peer = random_id(rng);

  // membership check driven by the read counter: a cached cid answers a
  // get without a datastore scan, an evicted one costs exactly one scan.
  // the probes themselves promote, so the reference mirrors them too.
  const auto probe_all = [&](uint64_t now) {
    for (const auto& cid : cids) {
      const bool expect_cached =
          std::find(reference.order.begin(), reference.order.end(),
                    cid.key()) != reference.order.end();
      const uint64_t before = store.datastore_reads();
      store.get(cid, now);
      CHECK(store.datastore_reads() == before + (expect_cached ? 0 : 1));
      reference.touch(cid.key());
    }
  };

  // seed every cid with a record so gets always touch the lru
  for (const auto& cid : cids) {
    store.add(cid, peer, 0);
    reference.touch(cid.key());
  }

  for (int step = 0; step < 2000; ++step) {
    const Cid& cid = cids[rng() % cids.size()];
    if (rng() % 2 == 0) {
      store.add(cid, peer, static_cast<uint64_t>(step));
    } else {
      store.get(cid, static_cast<uint64_t>(step));
    }
    reference.touch(cid.key());
    CHECK(store.cache_size() == reference.order.size());
    if (step % 250 == 0) {
      probe_all(static_cast<uint64_t>(step));
    }
  }
  probe_all(2000);
}

TEST_CASE("cache stays coherent with the datastore across operations") {
  std::mt19937_64 rng(263);
  ProviderStoreConfig config;
  config.cache_capacity = 16;
  config.ttl_ms = 500;
  ProviderStore store(config);

  std::vector<Cid> cids;
  for (int i = 0; i < 40; ++i) {
    cids.push_back(cid_for(i));
  }
  std::vector<NodeId> peers;
  for (int i = 0; i < 6; ++i) {
    peers.push_back(random_id(rng));
  }

  // shadow model: (cid, peer) -> entered_at
  std::map<std::pair<Key, NodeId>, uint64_t> model;
  for (uint64_t now = 0; now < 3000; now += 7) {
    const Cid& cid = cids[rng() % cids.size()];
    const NodeId& peer = peers[rng() % peers.size()];
    switch (rng() % 3) {
      case 0:
        store.add(cid, peer, now);
        model[{cid.key(), peer}] = now;
        break;
      case 1: {
        std::vector<NodeId> expected;
        for (const auto& [key, at] : model) {
          if (key.first == cid.key() && now - at < config.ttl_ms) {
            expected.push_back(key.second);
          }
        }
        std::sort(expected.begin(), expected.end());
        auto got = store.get(cid, now);
        std::sort(got.begin(), got.end());
        CHECK(got == expected);
        break;
      }
      case 2: {
        const size_t removed = store.cleanup(now);
        size_t expected_removed = 0;
        for (auto it = model.begin(); it != model.end();) {
          if (now - it->second >= config.ttl_ms) {
            it = model.erase(it);
            ++expected_removed;
          } else {
            ++it;
          }
        }
        CHECK(removed == expected_removed);
        break;
      }
    }
    CHECK(store.record_count() == model.size());
    CHECK(store.cache_size() <= config.cache_capacity);
  }
}

TEST_CASE("dump lists records in key order with decoded times") {
  std::mt19937_64 rng(269);
  ProviderStore store;
  std::vector<std::pair<std::string, uint64_t>> expected;
  for (int i = 0; i < 12; ++i) {
    const Cid cid = cid_for(i);
    const NodeId peer = random_id(rng);
    const uint64_t at = rng() % 100000;
    store.add(cid, peer, at);
    expected.emplace_back(ProviderKey::make(cid, peer).text, at);
  }
  std::sort(expected.begin(), expected.end());

  std::istringstream lines(store.dump());
  for (const auto& [key_text, at] : expected) {
    std::string got_key;
    uint64_t got_at = 0;
    REQUIRE(static_cast<bool>(lines >> got_key >> got_at));
    CHECK(got_key == key_text);
    CHECK(got_at == at);
  }
  std::string rest;
  CHECK_FALSE(static_cast<bool>(lines >> rest));
}
