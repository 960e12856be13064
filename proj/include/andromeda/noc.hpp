/*
 * Copyright 2026 The Andromeda Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "andromeda/config.hpp"

namespace andromeda {

/// Row-major 2-D mesh: node k sits at column k mod X, row k / X.
struct MeshTopology {
  std::uint32_t mesh_x = 1;
  std::uint32_t mesh_y = 1;

  std::uint32_t nodes() const { return mesh_x * mesh_y; }
  std::pair<std::uint32_t, std::uint32_t> coords(NodeId n) const {
    return {n % mesh_x, n / mesh_x};
  }
  NodeId node_at(std::uint32_t col, std::uint32_t row) const { return row * mesh_x + col; }
  std::uint32_t distance(NodeId a, NodeId b) const;
};

struct Packet {
  NodeId src = 0;
  NodeId dst = 0;
  std::uint32_t tag = 0;
  std::uint64_t payload_bytes = 1;
};

/// Nodes visited after `src`, X first, ending at `dst`; empty when equal.
std::vector<NodeId> route_xy(const MeshTopology& topo, NodeId src, NodeId dst);

std::uint64_t flit_count(std::uint64_t payload_bytes, const TimingParams& t);

/// Closed-form latency over `hops` hops without contention.
Cycle packet_latency_uncontended(std::uint32_t hops, std::uint64_t payload_bytes,
                                 FlowControl fc, RouterKind rk, const TimingParams& t);
Cycle packet_latency_uncontended(const MeshTopology& topo, const Packet& p, FlowControl fc,
                                 RouterKind rk, const TimingParams& t);

/// Busy intervals of one resource; reservations may fill earlier gaps.
class IntervalSchedule {
 public:
  /// Earliest start >= `ready` with `length` free cycles; reserves it.
  Cycle reserve(Cycle ready, Cycle length);
  /// Forgets intervals that end at or before `horizon`.
  void prune(Cycle horizon);
  std::size_t size() const { return busy_.size(); }

 private:
  std::vector<std::pair<Cycle, Cycle>> busy_;  // sorted, disjoint [start, end)
};

/// Link and router occupancy of the whole mesh.
class Network {
 public:
  explicit Network(const SystemConfig& cfg);

  /// Moves `p`, injected at `at`, hop by hop along its XY route and returns
  /// the cycle its last flit reaches the destination. Calls must come in
  /// non-decreasing `at` order.
  Cycle transport(const Packet& p, Cycle at);

  const MeshTopology& topology() const { return topo_; }
  std::uint64_t flit_hops() const { return flit_hops_; }
  std::uint64_t packets() const { return packets_; }
  std::uint64_t bytes_in() const { return bytes_in_; }

 private:
  std::size_t link_index(NodeId from, NodeId to) const;

  MeshTopology topo_;
  FlowControl fc_;
  RouterKind rk_;
  TimingParams timing_;
  std::vector<IntervalSchedule> links_;    // 4 directed links per node
  std::vector<IntervalSchedule> routers_;  // software routers only
  std::uint64_t flit_hops_ = 0;
  std::uint64_t packets_ = 0;
  std::uint64_t bytes_in_ = 0;
};

}  // namespace andromeda
