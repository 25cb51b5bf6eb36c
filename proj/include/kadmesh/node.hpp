// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "kadmesh/message.hpp"
#include "kadmesh/providers.hpp"
#include "kadmesh/routing.hpp"

namespace kadmesh {

class Simulator;

enum class LookupMode { nodes, providers };

struct LookupResult {
  std::vector<Contact> contacts;   // closest responders, nearest first
  std::vector<Contact> providers;  // providers mode only
  int hops = 0;
  uint64_t messages = 0;
};

using LookupCallback = std::function<void(const LookupResult&)>;
using ProvideCallback =
    std::function<void(const std::optional<std::string>& error)>;
using FindProvidersCallback =
    std::function<void(const std::vector<Contact>& providers,
                       const LookupResult& state)>;

// One DHT participant: routing table, provider store, and the iterative
// lookup state machines. Driven entirely by simulator events; never blocks.
class Node {
 public:
  Node(Simulator* sim, int index, NodeId id);

  const NodeId& id() const { return id_; }
  int index() const { return index_; }
  Contact contact() const;
  RoutingTable& table() { return table_; }
  const RoutingTable& table() const { return table_; }
  ProviderStore& providers() { return providers_; }
  const ProviderStore& providers() const { return providers_; }

  // Inserts the seed peer and runs a self-lookup. If every query fails
  // the table is left holding just the seed contact.
  void bootstrap(const Contact& seed);

  // Classic iterative lookup with strict round parallelism: up to alpha
  // queries per round, next round only after every reply or timeout of
  // the current one. The hop count is the number of rounds that sent at
  // least one query. Returns the lookup id.
  uint64_t start_lookup(const Key& target, LookupMode mode,
                        WorkPurpose purpose, LookupCallback callback,
                        size_t provider_limit = 0,
                        std::optional<uint64_t> timeout_ms = std::nullopt);

  // Stores the record locally, then sends ADD_PROVIDER to the k closest
  // peers the lookup finds. The error is set only when every attempted
  // send fails: "failed to provide to <failed> of <attempted> peers".
  void provide(const Cid& cid, ProvideCallback callback);

  // Local store first, then a providers-mode lookup. Early exit (on by
  // default) stops at the first round that discovers any provider.
  void find_providers(const Cid& cid, size_t limit,
                      FindProvidersCallback callback);

  // Receiver side. Inserts the sender, then answers FIND_NODE and
  // GET_PROVIDERS; ADD_PROVIDER and replies produce no response.
  std::optional<Message> on_deliver(const Message& msg,
                                    const Contact& from);
  void on_request_timeout(uint64_t request_id);

  // Periodic services; rescheduling is the simulator's job.
  void on_refresh_tick();
  void on_cleanup_tick();
  void on_random_walk_tick();

  size_t active_lookups() const { return lookups_.size(); }

 private:
  struct ShortlistEntry {
    Contact contact;
    bool queried = false;
    bool responded = false;
  };
  struct Lookup {
    uint64_t id = 0;
    Key target{};
    LookupMode mode = LookupMode::nodes;
    WorkPurpose purpose = WorkPurpose::Bootstrap;
    std::vector<ShortlistEntry> shortlist;  // sorted by distance to target
    std::set<NodeId> seen;
    std::map<uint64_t, NodeId> inflight;  // request_id -> queried peer
    std::vector<Contact> providers_found;
    size_t provider_limit = 0;
    uint64_t timeout_ms = 0;
    int hops = 0;
    uint64_t messages = 0;
    LookupCallback callback;
  };

  void merge_contact(Lookup& lookup, const Contact& contact);
  void launch_round(Lookup& lookup);
  bool lookup_finished(const Lookup& lookup) const;
  void finish_lookup(uint64_t lookup_id);
  void resolve_request(uint64_t request_id, const Message* reply);
  std::optional<Message> handle_request(const Message& msg,
                                        const Contact& from);
  Cid cid_from_key(const Key& key) const;

  Simulator* sim_;
  int index_;
  NodeId id_;
  RoutingTable table_;
  ProviderStore providers_;
  std::map<uint64_t, Lookup> lookups_;
  std::map<uint64_t, uint64_t> request_to_lookup_;
  uint64_t lookup_seq_ = 0;
  uint64_t dropped_malformed_ = 0;

 public:
  uint64_t dropped_malformed() const { return dropped_malformed_; }
};

}  // namespace kadmesh
