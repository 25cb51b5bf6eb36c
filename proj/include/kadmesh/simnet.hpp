// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <queue>
#include <random>
#include <set>
#include <variant>
#include <vector>

#include "kadmesh/message.hpp"
#include "kadmesh/metrics.hpp"

namespace kadmesh {

class Node;

struct SimConfig {
  int nodes = 40;
  int k = 20;
  int alpha = 3;
  int max_buckets = 16;
  uint64_t refresh_interval_ms = 600'000;     // 0 disables the service
  uint64_t cleanup_interval_ms = 3'600'000;   // 0 disables the service
  uint64_t provider_ttl_ms = 3'600'000;
  size_t provider_cache_capacity = 256;
  bool random_walk_enabled = true;
  uint64_t random_walk_interval_ms = 300'000;
  uint64_t random_walk_timeout_ms = 10'000;
  uint64_t latency_base_ms = 10;
  uint64_t latency_jitter_ms = 5;   // uniform in [0, jitter]
  uint64_t latency_setup_ms = 50;   // once per ordered node pair
  uint64_t duration_ms = 3'600'000;
  uint64_t seed = 1;
  uint64_t query_timeout_ms = 10'000;
  bool lookup_early_exit = true;
  int id_difficulty = 0;
  uint64_t event_cap = 20'000'000;
  uint64_t handshake_weight = 10;
  uint64_t hash_weight = 1;
};

// Event payloads. Deliver carries the message and both endpoints;
// the periodic ticks and lifecycle events carry their node index.
struct Deliver {
  Message msg;
  int from;
  int to;
};
struct RequestTimeout {
  int node;
  uint64_t request_id;
};
struct RefreshTick {
  int node;
};
struct CleanupTick {
  int node;
};
struct RandomWalkTick {
  int node;
};
struct NodeJoin {
  int node;
};
struct NodeLeave {
  int node;
};

using EventPayload = std::variant<Deliver, RequestTimeout, RefreshTick,
                                  CleanupTick, RandomWalkTick, NodeJoin,
                                  NodeLeave>;

// Single-threaded discrete-event simulator. All nondeterminism flows from
// the seeded generator, so a (seed, scenario) pair fixes the entire event
// trace. Events fire in (fire_at, sequence) order.
class Simulator {
 public:
  explicit Simulator(SimConfig config);
  ~Simulator();

  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  uint64_t now() const { return now_ms_; }
  const SimConfig& config() const { return config_; }
  Metrics& metrics() { return metrics_; }
  const Metrics& metrics() const { return metrics_; }
  std::mt19937_64& rng() { return rng_; }

  // Throws std::invalid_argument on a past-dated event.
  void schedule(uint64_t fire_at, EventPayload payload);

  // Processes every event with fire_at <= t_end, leaves the clock at
  // t_end, returns the number of events processed. Throws
  // std::runtime_error when the configured event cap is exceeded.
  uint64_t run_until(uint64_t t_end);

  // Drains the queue completely; usable only when no periodic service is
  // scheduled (their rescheduling never lets the queue empty).
  uint64_t run_until_idle();

  bool step();  // one event; false when the queue is empty

  // Node lifecycle.
  int spawn_node();
  void spawn_chain(int n);
  Node& node(int index) { return *nodes_[static_cast<size_t>(index)]; }
  const Node& node(int index) const {
    return *nodes_[static_cast<size_t>(index)];
  }
  size_t node_count() const { return nodes_.size(); }
  int index_of(const NodeId& id) const;
  bool alive(int index) const;
  void kill(int index);
  void revive(int index);

  // Link failures. A severed link fails sends immediately and drops
  // whatever is already in flight on it.
  void sever(int a, int b);
  void sever_all(int index);
  bool severed(int a, int b) const;

  // Sends msg from one node to another. Returns false without side
  // effects when the link is severed or an endpoint is unknown; a send
  // to a dead node succeeds and the delivery is dropped later, which is
  // what the sender's timeout eventually discovers.
  bool send(int from, const NodeId& to, Message msg);

  uint64_t next_request_id() { return ++request_id_seq_; }

  uint64_t events_processed() const { return events_processed_; }

 private:
  struct QueuedEvent {
    uint64_t fire_at;
    uint64_t seq;
    EventPayload payload;
  };
  struct EventOrder {
    bool operator()(const QueuedEvent& a, const QueuedEvent& b) const {
      if (a.fire_at != b.fire_at) {
        return a.fire_at > b.fire_at;
      }
      return a.seq > b.seq;
    }
  };

  void dispatch(const EventPayload& payload);
  void deliver(const Deliver& event);
  uint64_t latency(int from, int to);
  void schedule_services(int index);

  SimConfig config_;
  uint64_t now_ms_ = 0;
  uint64_t seq_ = 0;
  uint64_t request_id_seq_ = 0;
  uint64_t events_processed_ = 0;
  std::priority_queue<QueuedEvent, std::vector<QueuedEvent>, EventOrder>
      queue_;
  std::mt19937_64 rng_;
  std::vector<std::unique_ptr<Node>> nodes_;
  std::vector<bool> alive_;
  std::map<NodeId, int> registry_;
  std::set<std::pair<int, int>> severed_;     // ordered pairs, both ways
  std::set<std::pair<int, int>> handshaken_;  // ordered pairs
  Metrics metrics_;
};

}  // namespace kadmesh
