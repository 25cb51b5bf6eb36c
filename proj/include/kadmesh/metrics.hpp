// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "kadmesh/message.hpp"

namespace kadmesh {

// Counters for one simulation run. Work units replace CPU sampling:
// handling a message costs one unit, a connection handshake and a hash
// evaluation cost configurable weights. The maintenance share is the
// refresh + random walk + cleanup fraction of total work.
class Metrics {
 public:
  void record_send(MessageKind kind, size_t bytes, WorkPurpose purpose);
  void record_delivered() { ++delivered_; }
  void record_dropped() { ++dropped_; }
  void record_timeout() { ++timeouts_; }
  void record_handshake(uint64_t weight);
  void record_hash(uint64_t weight, WorkPurpose purpose);
  void record_work(WorkPurpose purpose, uint64_t units);
  void record_lookup_done(int hops);
  void record_lookup_cap_hit() { ++lookup_cap_hits_; }
  void record_cleanup_removed(size_t count) { cleanup_removed_ += count; }
  void record_tick(WorkPurpose service, size_t node_index);

  uint64_t sent(MessageKind kind) const;
  uint64_t bytes(MessageKind kind) const;
  uint64_t sent_total() const;
  uint64_t bytes_total() const;
  uint64_t delivered() const { return delivered_; }
  uint64_t dropped() const { return dropped_; }
  uint64_t in_flight() const { return sent_total() - delivered_ - dropped_; }
  uint64_t timeouts() const { return timeouts_; }

  uint64_t work(WorkPurpose purpose) const;
  uint64_t work_total() const;
  uint64_t maintenance_work() const;
  uint64_t query_work() const;
  double maintenance_share() const;

  uint64_t lookups_done() const { return lookups_done_; }
  uint64_t lookup_cap_hits() const { return lookup_cap_hits_; }
  uint64_t cleanup_removed() const { return cleanup_removed_; }
  const std::map<int, uint64_t>& hop_histogram() const { return hops_; }

  uint64_t ticks(WorkPurpose service) const;
  const std::vector<uint64_t>& ticks_per_node(WorkPurpose service) const;

  // Stable, fully ordered JSON object; equal runs give equal strings.
  std::string to_json() const;

 private:
  std::array<uint64_t, kMessageKindCount> sent_{};
  std::array<uint64_t, kMessageKindCount> bytes_{};
  std::array<uint64_t, kWorkPurposeCount> work_{};
  uint64_t delivered_ = 0;
  uint64_t dropped_ = 0;
  uint64_t timeouts_ = 0;
  uint64_t lookups_done_ = 0;
  uint64_t lookup_cap_hits_ = 0;
  uint64_t cleanup_removed_ = 0;
  std::map<int, uint64_t> hops_;
  // indexed by service purpose: Refresh, RandomWalk, Cleanup
  std::map<WorkPurpose, std::vector<uint64_t>> ticks_;
};

}  // namespace kadmesh
