// SPDX-License-Identifier: Apache-2.0
#include "kadmesh/simnet.hpp"

#include <stdexcept>

#include "kadmesh/node.hpp"

namespace kadmesh {

Simulator::Simulator(SimConfig config)
    : config_(std::move(config)), rng_(config_.seed) {}

Simulator::~Simulator() = default;

void Simulator::schedule(uint64_t fire_at, EventPayload payload) {
  if (fire_at < now_ms_) {
    throw std::invalid_argument("schedule: event fires in the past");
  }
  queue_.push(QueuedEvent{fire_at, seq_++, std::move(payload)});
}

uint64_t Simulator::run_until(uint64_t t_end) {
  uint64_t processed = 0;
  while (!queue_.empty() && queue_.top().fire_at <= t_end) {
    if (++processed > config_.event_cap) {
      throw std::runtime_error("run_until: event cap exceeded");
    }
    const QueuedEvent event = queue_.top();
    queue_.pop();
    now_ms_ = event.fire_at;
    ++events_processed_;
    dispatch(event.payload);
  }
  if (t_end > now_ms_) {
    now_ms_ = t_end;
  }
  return processed;
}

uint64_t Simulator::run_until_idle() {
  uint64_t processed = 0;
  while (step()) {
    if (++processed > config_.event_cap) {
      throw std::runtime_error("run_until_idle: event cap exceeded");
    }
  }
  return processed;
}

bool Simulator::step() {
  if (queue_.empty()) {
    return false;
  }
  const QueuedEvent event = queue_.top();
  queue_.pop();
  now_ms_ = event.fire_at;
  ++events_processed_;
  dispatch(event.payload);
  return true;
}

int Simulator::spawn_node() {
  const int index = static_cast<int>(nodes_.size());
  int attempts = 0;
  const NodeId id = generate_node_id(rng_, config_.id_difficulty, &attempts);
  metrics_.record_hash(
      config_.hash_weight * static_cast<uint64_t>(attempts),
      WorkPurpose::Identity);
  nodes_.push_back(std::make_unique<Node>(this, index, id));
  alive_.push_back(true);
  registry_[id] = index;
  schedule_services(index);
  return index;
}

void Simulator::spawn_chain(int n) {
  if (n < 1) {
    throw std::invalid_argument("spawn_chain: need at least one node");
  }
  const int first = spawn_node();
  for (int i = 1; i < n; ++i) {
    spawn_node();
  }
  // node i starts knowing only node i + 1; the last node knows nobody
  for (int i = first; i < first + n - 1; ++i) {
    node(i).bootstrap(node(i + 1).contact());
  }
}

int Simulator::index_of(const NodeId& id) const {
  const auto it = registry_.find(id);
  return it == registry_.end() ? -1 : it->second;
}

bool Simulator::alive(int index) const {
  return index >= 0 && index < static_cast<int>(alive_.size()) &&
         alive_[static_cast<size_t>(index)];
}

void Simulator::kill(int index) { alive_[static_cast<size_t>(index)] = false; }

void Simulator::revive(int index) {
  alive_[static_cast<size_t>(index)] = true;
}

void Simulator::sever(int a, int b) {
  severed_.insert({a, b});
  severed_.insert({b, a});
}

void Simulator::sever_all(int index) {
  for (int other = 0; other < static_cast<int>(nodes_.size()); ++other) {
    if (other != index) {
      sever(index, other);
    }
  }
}

bool Simulator::severed(int a, int b) const {
  return severed_.count({a, b}) > 0;
}

bool Simulator::send(int from, const NodeId& to, Message msg) {
  const int to_index = index_of(to);
  if (to_index < 0 || from < 0 ||
      from >= static_cast<int>(nodes_.size())) {
    return false;
  }
  if (severed(from, to_index)) {
    return false;
  }
  metrics_.record_send(msg.kind, msg.wire_size(), msg.purpose);
  const uint64_t delay = latency(from, to_index);
  schedule(now_ms_ + delay, Deliver{std::move(msg), from, to_index});
  return true;
}

uint64_t Simulator::latency(int from, int to) {
  uint64_t delay = config_.latency_base_ms;
  if (config_.latency_jitter_ms > 0) {
    delay += rng_() % (config_.latency_jitter_ms + 1);
  }
  if (handshaken_.insert({from, to}).second) {
    delay += config_.latency_setup_ms;
    metrics_.record_handshake(config_.handshake_weight);
  }
  return delay;
}

void Simulator::schedule_services(int index) {
  if (config_.refresh_interval_ms > 0) {
    schedule(now_ms_ + config_.refresh_interval_ms, RefreshTick{index});
  }
  if (config_.cleanup_interval_ms > 0) {
    schedule(now_ms_ + config_.cleanup_interval_ms, CleanupTick{index});
  }
  if (config_.random_walk_enabled && config_.random_walk_interval_ms > 0) {
    schedule(now_ms_ + config_.random_walk_interval_ms,
             RandomWalkTick{index});
  }
}

void Simulator::dispatch(const EventPayload& payload) {
  if (const auto* event = std::get_if<Deliver>(&payload)) {
    deliver(*event);
  } else if (const auto* event = std::get_if<RequestTimeout>(&payload)) {
    if (alive(event->node)) {
      node(event->node).on_request_timeout(event->request_id);
    }
  } else if (const auto* event = std::get_if<RefreshTick>(&payload)) {
    if (alive(event->node)) {
      metrics_.record_tick(WorkPurpose::Refresh,
                           static_cast<size_t>(event->node));
      node(event->node).on_refresh_tick();
    }
    schedule(now_ms_ + config_.refresh_interval_ms, RefreshTick{event->node});
  } else if (const auto* event = std::get_if<CleanupTick>(&payload)) {
    if (alive(event->node)) {
      metrics_.record_tick(WorkPurpose::Cleanup,
                           static_cast<size_t>(event->node));
      node(event->node).on_cleanup_tick();
    }
    schedule(now_ms_ + config_.cleanup_interval_ms, CleanupTick{event->node});
  } else if (const auto* event = std::get_if<RandomWalkTick>(&payload)) {
    if (alive(event->node)) {
      metrics_.record_tick(WorkPurpose::RandomWalk,
                           static_cast<size_t>(event->node));
      node(event->node).on_random_walk_tick();
    }
    schedule(now_ms_ + config_.random_walk_interval_ms,
             RandomWalkTick{event->node});
  } else if (const auto* event = std::get_if<NodeJoin>(&payload)) {
    revive(event->node);
  } else if (const auto* event = std::get_if<NodeLeave>(&payload)) {
    kill(event->node);
  }
}

void Simulator::deliver(const Deliver& event) {
  // a link cut or a crash after the send drops the packet in flight
  if (!alive(event.to) || severed(event.from, event.to)) {
    metrics_.record_dropped();
    return;
  }
  metrics_.record_delivered();
  const Contact from{node(event.from).id(),
                     {static_cast<uint32_t>(event.from)},
                     now_ms_};
  auto reply = node(event.to).on_deliver(event.msg, from);
  if (reply) {
    send(event.to, from.id, std::move(*reply));
  }
}

}  // namespace kadmesh
