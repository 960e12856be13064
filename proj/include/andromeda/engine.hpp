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
#include <stdexcept>
#include <string>
#include <vector>

#include "andromeda/config.hpp"
#include "andromeda/trace.hpp"

namespace andromeda {

enum class EventKind : std::uint8_t {
  CoreReady,       // a core resumes, or issues its pending bus request
  BusGrant,        // a node's bus picks the next requester
  Inject,          // a packet enters the network
  PacketArrival,   // a packet's last flit reached its destination
  BarrierRelease,  // all members of a barrier group resume
};

struct SimStats {
  Cycle total_cycles = 0;
  std::vector<Cycle> per_core_busy;
  std::vector<std::uint64_t> cache_hits;
  std::vector<std::uint64_t> cache_misses;
  std::vector<std::uint64_t> writebacks;
  std::vector<Cycle> barrier_wait_cycles;
  std::vector<Cycle> recv_wait_cycles;
  std::vector<Cycle> bus_busy_cycles;        // per node
  std::vector<std::uint64_t> bus_bytes;      // per node, cache-line traffic
  std::vector<std::uint64_t> mmio_bytes;     // per node, network FIFO words
  std::uint64_t flit_hops = 0;
  std::uint64_t packets_sent = 0;
  std::uint64_t packet_bytes = 0;
  std::uint64_t events = 0;
  // Release cycle of every barrier episode, per group, in order.
  std::vector<std::vector<Cycle>> barrier_releases;

  std::uint64_t total_hits() const;
  std::uint64_t total_misses() const;
  double hit_rate() const;
  /// Mean over nodes of bus busy cycles / total cycles.
  double bus_utilization() const;
  /// Stable text rendering of every field, for determinism checks.
  std::string fingerprint() const;
};

class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DeadlockError : public SimulationError {
 public:
  explicit DeadlockError(std::vector<CoreId> blocked);
  const std::vector<CoreId>& blocked() const { return blocked_; }

 private:
  std::vector<CoreId> blocked_;
};

/// Runs `workload` to completion on the nodes 0..n-1 of `cfg`'s mesh, where n
/// is the workload arrangement's node count.
SimStats run(const SystemConfig& cfg, Workload workload);

}  // namespace andromeda
