// SPDX-License-Identifier: Apache-2.0
#include "kadmesh/node.hpp"

#include <algorithm>
#include <cstdio>

#include "kadmesh/simnet.hpp"

namespace kadmesh {

namespace {

// Hard per-lookup message budget; generous multiple of anything a real
// run needs, so hitting it marks a runaway, not a tight resource.
uint64_t lookup_message_cap(const SimConfig& config) {
  const uint64_t base = static_cast<uint64_t>(config.alpha) *
                        static_cast<uint64_t>(config.k) * 16;
  return std::max<uint64_t>(base, 256);
}

}  // namespace

Node::Node(Simulator* sim, int index, NodeId id)
    : sim_(sim),
      index_(index),
      id_(id),
      table_(id, sim->config().k, sim->config().max_buckets),
      providers_(ProviderStoreConfig{
          sim->config().provider_cache_capacity,
          sim->config().provider_ttl_ms,
          sim->config().cleanup_interval_ms}) {}

Contact Node::contact() const {
  return Contact{id_, {static_cast<uint32_t>(index_)}, sim_->now()};
}

void Node::bootstrap(const Contact& seed) {
  if (seed.id == id_) {
    return;
  }
  table_.insert(seed, sim_->now());
  start_lookup(id_, LookupMode::nodes, WorkPurpose::Bootstrap,
               [this, seed](const LookupResult&) {
                 // an unreachable seed peer was removed by the timeout
                 // path; keep it so the node is not left stranded
                 if (table_.empty()) {
                   table_.insert(seed, sim_->now());
                 }
               });
}

uint64_t Node::start_lookup(const Key& target, LookupMode mode,
                            WorkPurpose purpose, LookupCallback callback,
                            size_t provider_limit,
                            std::optional<uint64_t> timeout_ms) {
  const uint64_t id = ++lookup_seq_;
  Lookup lookup;
  lookup.id = id;
  lookup.target = target;
  lookup.mode = mode;
  lookup.purpose = purpose;
  lookup.provider_limit = provider_limit;
  lookup.timeout_ms = timeout_ms.value_or(sim_->config().query_timeout_ms);
  lookup.callback = std::move(callback);
  lookup.seen.insert(id_);

  auto& state = lookups_.emplace(id, std::move(lookup)).first->second;
  for (const auto& contact :
       table_.closest(target, static_cast<size_t>(sim_->config().k))) {
    merge_contact(state, contact);
  }
  // the local node is itself a live member of the key space; it answers
  // for its own position without a query, so results can equal the
  // global k-nearest set exactly
  {
    const auto pos = std::lower_bound(
        state.shortlist.begin(), state.shortlist.end(), id_,
        [&](const ShortlistEntry& entry, const NodeId& value) {
          const Distance a = xor_distance(entry.contact.id, state.target);
          const Distance b = xor_distance(value, state.target);
          if (a != b) {
            return a < b;
          }
          return entry.contact.id < value;
        });
    state.shortlist.insert(pos, ShortlistEntry{contact(), true, true});
  }
  launch_round(state);
  if (state.inflight.empty()) {
    finish_lookup(id);
  }
  return id;
}

void Node::provide(const Cid& cid, ProvideCallback callback) {
  providers_.add(cid, id_, sim_->now());
  const Key target = cid.key();
  start_lookup(
      target, LookupMode::nodes, WorkPurpose::Provide,
      [this, target, callback = std::move(callback)](
          const LookupResult& result) {
        std::vector<Contact> targets = result.contacts;
        std::erase_if(targets,
                      [&](const Contact& c) { return c.id == id_; });
        if (targets.empty()) {
          // lookup could not reach anyone; fall back to whoever the
          // table still names so the failure is observable per peer
          targets = table_.closest(
              target, static_cast<size_t>(sim_->config().k));
        }
        size_t attempted = 0;
        size_t failed = 0;
        for (const auto& peer : targets) {
          ++attempted;
          Message msg;
          msg.kind = MessageKind::ADD_PROVIDER;
          msg.key = target;
          msg.provider_peers = {contact()};
          msg.purpose = WorkPurpose::Provide;
          if (!sim_->send(index_, peer.id, std::move(msg))) {
            ++failed;
          }
        }
        if (attempted > 0 && failed == attempted) {
          char text[64];
          std::snprintf(text, sizeof(text),
                        "failed to provide to %zu of %zu peers", failed,
                        attempted);
          callback(std::string(text));
        } else {
          callback(std::nullopt);
        }
      });
}

void Node::find_providers(const Cid& cid, size_t limit,
                          FindProvidersCallback callback) {
  std::vector<Contact> local;
  for (const NodeId& peer : providers_.get(cid, sim_->now())) {
    if (peer == id_) {
      local.push_back(contact());
    } else if (const Contact* known = table_.find(peer)) {
      local.push_back(*known);
    } else {
      local.push_back(Contact{peer, {}, 0});
    }
  }
  const bool satisfied =
      !local.empty() && (sim_->config().lookup_early_exit ||
                         (limit > 0 && local.size() >= limit));
  if (satisfied) {
    if (limit > 0 && local.size() > limit) {
      local.resize(limit);
    }
    callback(local, LookupResult{});
    return;
  }
  start_lookup(
      cid.key(), LookupMode::providers, WorkPurpose::FindProviders,
      [local = std::move(local), limit,
       callback = std::move(callback)](const LookupResult& result) {
        std::vector<Contact> merged = local;
        for (const auto& found : result.providers) {
          const bool duplicate = std::any_of(
              merged.begin(), merged.end(),
              [&](const Contact& c) { return c.id == found.id; });
          if (!duplicate) {
            merged.push_back(found);
          }
        }
        if (limit > 0 && merged.size() > limit) {
          merged.resize(limit);
        }
        callback(merged, result);
      },
      limit);
}

std::optional<Message> Node::on_deliver(const Message& msg,
                                        const Contact& from) {
  if (msg.declared_key_len != kIdSize) {
    ++dropped_malformed_;
    return std::nullopt;
  }
  table_.insert(from, sim_->now());
  switch (msg.kind) {
    case MessageKind::FIND_NODE:
    case MessageKind::GET_PROVIDERS:
    case MessageKind::ADD_PROVIDER:
      return handle_request(msg, from);
    case MessageKind::FIND_NODE_REPLY:
    case MessageKind::GET_PROVIDERS_REPLY:
      resolve_request(msg.request_id, &msg);
      return std::nullopt;
  }
  return std::nullopt;
}

std::optional<Message> Node::handle_request(const Message& msg,
                                            const Contact& from) {
  const auto closer = [&](const Key& target) {
    auto contacts = table_.closest(
        target, static_cast<size_t>(sim_->config().k) + 1);
    std::erase_if(contacts,
                  [&](const Contact& c) { return c.id == from.id; });
    if (contacts.size() > static_cast<size_t>(sim_->config().k)) {
      contacts.resize(static_cast<size_t>(sim_->config().k));
    }
    return contacts;
  };

  Message reply;
  reply.key = msg.key;
  reply.request_id = msg.request_id;
  reply.purpose = msg.purpose;
  switch (msg.kind) {
    case MessageKind::FIND_NODE:
      reply.kind = MessageKind::FIND_NODE_REPLY;
      reply.contacts = closer(msg.key);
      return reply;
    case MessageKind::GET_PROVIDERS: {
      reply.kind = MessageKind::GET_PROVIDERS_REPLY;
      reply.contacts = closer(msg.key);
      for (const NodeId& peer :
           providers_.get(cid_from_key(msg.key), sim_->now())) {
        if (peer == id_) {
          reply.provider_peers.push_back(contact());
        } else if (const Contact* known = table_.find(peer)) {
          reply.provider_peers.push_back(*known);
        } else {
          reply.provider_peers.push_back(Contact{peer, {}, 0});
        }
      }
      return reply;
    }
    case MessageKind::ADD_PROVIDER: {
      const NodeId provider =
          msg.provider_peers.empty() ? from.id : msg.provider_peers[0].id;
      providers_.add(cid_from_key(msg.key), provider, sim_->now());
      return std::nullopt;
    }
    default:
      return std::nullopt;
  }
}

void Node::on_request_timeout(uint64_t request_id) {
  resolve_request(request_id, nullptr);
}

void Node::on_refresh_tick() {
  for (const auto& [bucket, key] : table_.refresh_targets(sim_->rng())) {
    start_lookup(key, LookupMode::nodes, WorkPurpose::Refresh, {});
  }
}

void Node::on_cleanup_tick() {
  const size_t removed = providers_.cleanup(sim_->now());
  sim_->metrics().record_cleanup_removed(removed);
  sim_->metrics().record_work(WorkPurpose::Cleanup, 1);
}

void Node::on_random_walk_tick() {
  // walk target: digest of fresh random bytes, not an identity
  int attempts = 0;
  const NodeId target = generate_node_id(sim_->rng(), 0, &attempts);
  sim_->metrics().record_hash(
      sim_->config().hash_weight * static_cast<uint64_t>(attempts),
      WorkPurpose::RandomWalk);
  start_lookup(target, LookupMode::nodes, WorkPurpose::RandomWalk, {}, 0,
               sim_->config().random_walk_timeout_ms);
}

void Node::merge_contact(Lookup& lookup, const Contact& contact) {
  if (!lookup.seen.insert(contact.id).second) {
    return;
  }
  const auto pos = std::lower_bound(
      lookup.shortlist.begin(), lookup.shortlist.end(), contact,
      [&](const ShortlistEntry& entry, const Contact& value) {
        const Distance a = xor_distance(entry.contact.id, lookup.target);
        const Distance b = xor_distance(value.id, lookup.target);
        if (a != b) {
          return a < b;
        }
        return entry.contact.id < value.id;
      });
  lookup.shortlist.insert(pos, ShortlistEntry{contact, false, false});
}

void Node::launch_round(Lookup& lookup) {
  const auto& config = sim_->config();
  const size_t window = static_cast<size_t>(config.k);
  const uint64_t cap = lookup_message_cap(config);
  int live = 0;
  bool sent_any = false;
  while (live < config.alpha) {
    size_t candidate = lookup.shortlist.size();
    const size_t limit = std::min(window, lookup.shortlist.size());
    for (size_t i = 0; i < limit; ++i) {
      if (!lookup.shortlist[i].queried) {
        candidate = i;
        break;
      }
    }
    if (candidate == lookup.shortlist.size()) {
      break;
    }
    if (lookup.messages >= cap) {
      sim_->metrics().record_lookup_cap_hit();
      break;
    }
    lookup.shortlist[candidate].queried = true;
    const NodeId peer = lookup.shortlist[candidate].contact.id;

    Message msg;
    msg.kind = lookup.mode == LookupMode::nodes
                   ? MessageKind::FIND_NODE
                   : MessageKind::GET_PROVIDERS;
    msg.key = lookup.target;
    msg.request_id = sim_->next_request_id();
    msg.purpose = lookup.purpose;
    const uint64_t request_id = msg.request_id;
    if (!sim_->send(index_, peer, std::move(msg))) {
      // link gone: the failure is visible at send time. The peer stays
      // in the table (a cut link is not a departure); it just leaves
      // this lookup's shortlist.
      lookup.shortlist.erase(lookup.shortlist.begin() +
                             static_cast<ptrdiff_t>(candidate));
      continue;
    }
    ++lookup.messages;
    ++live;
    sent_any = true;
    lookup.inflight.emplace(request_id, peer);
    request_to_lookup_[request_id] = lookup.id;
    sim_->schedule(sim_->now() + lookup.timeout_ms,
                   RequestTimeout{index_, request_id});
  }
  if (sent_any) {
    ++lookup.hops;
  }
}

bool Node::lookup_finished(const Lookup& lookup) const {
  if (lookup.mode == LookupMode::providers &&
      !lookup.providers_found.empty()) {
    if (sim_->config().lookup_early_exit) {
      return true;
    }
    if (lookup.provider_limit > 0 &&
        lookup.providers_found.size() >= lookup.provider_limit) {
      return true;
    }
  }
  const size_t window = std::min(
      static_cast<size_t>(sim_->config().k), lookup.shortlist.size());
  for (size_t i = 0; i < window; ++i) {
    if (!lookup.shortlist[i].queried) {
      return false;
    }
  }
  return true;
}

void Node::finish_lookup(uint64_t lookup_id) {
  const auto it = lookups_.find(lookup_id);
  if (it == lookups_.end()) {
    return;
  }
  Lookup lookup = std::move(it->second);
  lookups_.erase(it);

  LookupResult result;
  result.hops = lookup.hops;
  result.messages = lookup.messages;
  result.providers = std::move(lookup.providers_found);
  const size_t k = static_cast<size_t>(sim_->config().k);
  for (const auto& entry : lookup.shortlist) {
    if (entry.responded) {
      result.contacts.push_back(entry.contact);
      if (result.contacts.size() == k) {
        break;
      }
    }
  }
  sim_->metrics().record_lookup_done(result.hops);
  if (lookup.callback) {
    lookup.callback(result);
  }
}

void Node::resolve_request(uint64_t request_id, const Message* reply) {
  const auto map_it = request_to_lookup_.find(request_id);
  if (map_it == request_to_lookup_.end()) {
    return;  // already resolved, or its lookup is gone
  }
  const uint64_t lookup_id = map_it->second;
  request_to_lookup_.erase(map_it);

  const auto it = lookups_.find(lookup_id);
  if (it == lookups_.end()) {
    return;
  }
  Lookup& lookup = it->second;
  const auto inflight_it = lookup.inflight.find(request_id);
  if (inflight_it == lookup.inflight.end()) {
    return;
  }
  const NodeId peer = inflight_it->second;
  lookup.inflight.erase(inflight_it);

  if (reply != nullptr) {
    for (auto& entry : lookup.shortlist) {
      if (entry.contact.id == peer) {
        entry.responded = true;
        entry.contact.last_seen_ms = sim_->now();
        break;
      }
    }
    for (const auto& contact : reply->contacts) {
      table_.insert(contact, sim_->now());
      merge_contact(lookup, contact);
    }
    if (lookup.mode == LookupMode::providers) {
      for (const auto& found : reply->provider_peers) {
        const bool duplicate = std::any_of(
            lookup.providers_found.begin(), lookup.providers_found.end(),
            [&](const Contact& c) { return c.id == found.id; });
        if (!duplicate) {
          lookup.providers_found.push_back(found);
        }
      }
    }
  } else {
    // timeout: treat the peer as departed
    sim_->metrics().record_timeout();
    table_.remove(peer);
    std::erase_if(lookup.shortlist, [&](const ShortlistEntry& entry) {
      return entry.contact.id == peer;
    });
  }

  if (!lookup.inflight.empty()) {
    return;  // round still in progress
  }
  if (lookup_finished(lookup)) {
    finish_lookup(lookup_id);
    return;
  }
  launch_round(lookup);
  if (lookup.inflight.empty()) {
    finish_lookup(lookup_id);
  }
}

Cid Node::cid_from_key(const Key& key) const {
  Multihash mh;
  mh.digest.assign(key.bytes.begin(), key.bytes.end());
  return *cid_from_multihash_bytes(mh.encode(), CidVersion::v0);
}

}  // namespace kadmesh
