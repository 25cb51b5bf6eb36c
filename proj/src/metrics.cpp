// SPDX-License-Identifier: Apache-2.0
#include "kadmesh/metrics.hpp"

#include <nlohmann/json.hpp>

namespace kadmesh {

namespace {
constexpr std::array<WorkPurpose, 3> kTickServices = {
    WorkPurpose::Refresh, WorkPurpose::RandomWalk, WorkPurpose::Cleanup};
}

void Metrics::record_send(MessageKind kind, size_t bytes,
                          WorkPurpose purpose) {
  sent_[static_cast<size_t>(kind)] += 1;
  bytes_[static_cast<size_t>(kind)] += bytes;
  work_[static_cast<size_t>(purpose)] += 1;
}

void Metrics::record_handshake(uint64_t weight) {
  work_[static_cast<size_t>(WorkPurpose::Handshake)] += weight;
}

void Metrics::record_hash(uint64_t weight, WorkPurpose purpose) {
  work_[static_cast<size_t>(purpose)] += weight;
}

void Metrics::record_work(WorkPurpose purpose, uint64_t units) {
  work_[static_cast<size_t>(purpose)] += units;
}

void Metrics::record_lookup_done(int hops) {
  ++lookups_done_;
  ++hops_[hops];
}

void Metrics::record_tick(WorkPurpose service, size_t node_index) {
  auto& per_node = ticks_[service];
  if (per_node.size() <= node_index) {
    per_node.resize(node_index + 1, 0);
  }
  ++per_node[node_index];
}

uint64_t Metrics::sent(MessageKind kind) const {
  return sent_[static_cast<size_t>(kind)];
}

uint64_t Metrics::bytes(MessageKind kind) const {
  return bytes_[static_cast<size_t>(kind)];
}

uint64_t Metrics::sent_total() const {
  uint64_t total = 0;
  for (const auto n : sent_) {
    total += n;
  }
  return total;
}

uint64_t Metrics::bytes_total() const {
  uint64_t total = 0;
  for (const auto n : bytes_) {
    total += n;
  }
  return total;
}

uint64_t Metrics::work(WorkPurpose purpose) const {
  return work_[static_cast<size_t>(purpose)];
}

uint64_t Metrics::work_total() const {
  uint64_t total = 0;
  for (const auto n : work_) {
    total += n;
  }
  return total;
}

uint64_t Metrics::maintenance_work() const {
  return work(WorkPurpose::Refresh) + work(WorkPurpose::RandomWalk) +
         work(WorkPurpose::Cleanup);
}

uint64_t Metrics::query_work() const {
  return work(WorkPurpose::Bootstrap) + work(WorkPurpose::Provide) +
         work(WorkPurpose::FindProviders);
}

double Metrics::maintenance_share() const {
  const uint64_t total = work_total();
  if (total == 0) {
    return 0.0;
  }
  return static_cast<double>(maintenance_work()) /
         static_cast<double>(total);
}

uint64_t Metrics::ticks(WorkPurpose service) const {
  uint64_t total = 0;
  for (const auto n : ticks_per_node(service)) {
    total += n;
  }
  return total;
}

const std::vector<uint64_t>& Metrics::ticks_per_node(
    WorkPurpose service) const {
  static const std::vector<uint64_t> kEmpty;
  const auto it = ticks_.find(service);
  return it == ticks_.end() ? kEmpty : it->second;
}

std::string Metrics::to_json() const {
  nlohmann::json out;
  for (size_t i = 0; i < kMessageKindCount; ++i) {
    const auto name = std::string(to_string(static_cast<MessageKind>(i)));
    out["messages"][name]["sent"] = sent_[i];
    out["messages"][name]["bytes"] = bytes_[i];
  }
  out["messages_total"] = sent_total();
  out["bytes_total"] = bytes_total();
  out["delivered"] = delivered_;
  out["dropped"] = dropped_;
  out["in_flight"] = in_flight();
  out["timeouts"] = timeouts_;
  for (size_t i = 0; i < kWorkPurposeCount; ++i) {
    out["work"][std::string(to_string(static_cast<WorkPurpose>(i)))] =
        work_[i];
  }
  out["work_total"] = work_total();
  out["maintenance_work"] = maintenance_work();
  out["query_work"] = query_work();
  out["lookups_done"] = lookups_done_;
  out["lookup_cap_hits"] = lookup_cap_hits_;
  out["cleanup_removed"] = cleanup_removed_;
  out["hop_histogram"] = nlohmann::json::object();
  for (const auto& [hops, count] : hops_) {
    out["hop_histogram"][std::to_string(hops)] = count;
  }
  for (const auto service : kTickServices) {
    const auto name = std::string(to_string(service));
    out["ticks"][name]["total"] = ticks(service);
    out["ticks"][name]["per_node"] = ticks_per_node(service);
  }
  return out.dump(2);
}

}  // namespace kadmesh
