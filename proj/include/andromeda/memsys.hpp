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
#include <vector>

#include "andromeda/config.hpp"

namespace andromeda {

enum class AccessKind : std::uint8_t { Read, Write };
enum class LineState : std::uint8_t { Invalid, Shared, Modified };

struct MemAccess {
  CoreId core = 0;  // index within the node
  AccessKind kind = AccessKind::Read;
  std::uint64_t addr = 0;
  std::uint32_t bytes = 8;
};

class MemoryFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Set-associative LRU cache tag store. Line numbers (addr / line_bytes) are
/// stored whole as tags.
class Cache {
 public:
  struct Way {
    std::uint64_t tag = 0;
    std::uint64_t stamp = 0;  // last-use time; larger is more recent
    std::uint64_t version = 0;
    LineState state = LineState::Invalid;
  };

  explicit Cache(const CacheConfig& geometry);

  const CacheConfig& geometry() const { return geo_; }
  std::uint64_t line_of(std::uint64_t addr) const { return addr >> line_shift_; }
  std::uint32_t set_of(std::uint64_t line) const {
    return static_cast<std::uint32_t>(line & set_mask_);
  }

  /// Way index holding `line`, or -1.
  int find(std::uint64_t line) const;
  Way& at(std::uint64_t line, int way) {
    return ways_[std::size_t{set_of(line)} * geo_.n_ways + way];
  }
  const Way& at(std::uint64_t line, int way) const {
    return ways_[std::size_t{set_of(line)} * geo_.n_ways + way];
  }
  /// Replacement candidate in the set of `line`: an invalid way if any,
  /// otherwise the least recently used one.
  int victim(std::uint64_t line) const;
  void touch(std::uint64_t line, int way) { at(line, way).stamp = ++clock_; }

  LineState state(std::uint64_t line) const;
  /// Recency rank of each way in `set`, 0 = most recently used.
  std::vector<std::uint32_t> lru_ranks(std::uint32_t set) const;

  // One-entry lookup memo; the engine's hit path checks it first.
  std::uint64_t mru_line = ~std::uint64_t{0};
  int mru_way = -1;

 private:
  CacheConfig geo_;
  unsigned line_shift_;
  std::uint64_t set_mask_;
  std::uint64_t clock_ = 0;
  std::vector<Way> ways_;
};

struct CacheOutcome {
  bool hit = false;
  bool victim_dirty = false;
};

/// Stand-alone single-cache access (no bus, no coherence): updates LRU and
/// state exactly as the node memory system does.
CacheOutcome cache_access(Cache& cache, const MemAccess& a);

/// Round-robin arbiter of one node's shared bus.
class BusArbiter {
 public:
  BusArbiter(std::uint32_t requesters, const TimingParams& t);

  Cycle service_cycles(std::uint64_t bytes) const;

  void enqueue(std::uint32_t requester);
  bool has_pending() const { return pending_ != 0; }
  /// Removes and returns the next requester after the last-granted one.
  std::uint32_t pick();
  /// Occupies the bus for `service` cycles starting no earlier than `at`;
  /// returns the completion cycle.
  Cycle occupy(Cycle at, Cycle service);

  /// Convenience for isolated use: one transaction of `bytes` issued at `at`.
  Cycle transaction(std::uint32_t requester, std::uint64_t bytes, Cycle at);

  Cycle busy_until() const { return busy_until_; }
  Cycle busy_cycles() const { return busy_cycles_; }
  std::uint32_t pointer() const { return ptr_; }

 private:
  std::uint32_t n_;
  Cycle overhead_;
  std::uint32_t width_;
  std::uint64_t pending_ = 0;
  std::uint32_t ptr_;
  Cycle busy_until_ = 0;
  Cycle busy_cycles_ = 0;
};

struct SnoopResult {
  std::vector<std::uint32_t> invalidated;  // local core indices
  std::uint32_t writebacks = 0;
};

struct CoreMemStats {
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t writebacks = 0;
};

/// One node: private L1s of its cores, MSI snooping over a shared bus, and
/// the node-local memory.
class NodeMemory {
 public:
  NodeMemory(const SystemConfig& cfg, std::uint32_t cores, std::uint64_t mem_bytes);

  /// Local part of an access. Returns true when it completes in the cache
  /// (hit that needs no bus); false when a bus transaction is required.
  bool probe(const MemAccess& a) {
    check(a);
    auto& c = caches_[a.core];
    const auto line = c.line_of(a.addr);
    if (c.mru_line != line) return probe_lookup(a, line);
    auto& way = c.at(line, c.mru_way);
    if (a.kind == AccessKind::Write) {
      if (way.state != LineState::Modified) return probe_lookup(a, line);
      way.version = ++next_version_;
    }
    c.touch(line, c.mru_way);
    ++stats_[a.core].hits;
    return true;
  }
  /// Bus part of an access that `probe` rejected, evaluated against the
  /// cache state at grant time. Returns the bus service cycles.
  Cycle transact(const MemAccess& a);
  /// Service cycles of one uncached network-interface word.
  Cycle mmio_service();

  /// Invalidates every other copy of `line`; Modified copies write back.
  SnoopResult snoop(std::uint32_t writer, std::uint64_t line);

  /// Version of the data `core` holds for the line containing `addr`
  /// (each write creates a new version); the line must be cached.
  std::uint64_t value_of(std::uint32_t core, std::uint64_t addr) const;
  /// Number of caches holding the line in Modified state.
  std::uint32_t modified_copies(std::uint64_t line) const;

  BusArbiter& bus() { return bus_; }
  const BusArbiter& bus() const { return bus_; }
  const Cache& cache(std::uint32_t core) const { return caches_[core]; }
  const CoreMemStats& stats(std::uint32_t core) const { return stats_[core]; }
  std::uint64_t bus_bytes() const { return bus_bytes_; }
  std::uint64_t mmio_bytes() const { return mmio_bytes_; }
  std::uint64_t mem_bytes() const { return mem_bytes_; }
  std::uint32_t cores() const { return static_cast<std::uint32_t>(caches_.size()); }

 private:
  void check(const MemAccess& a) const {
    const bool size_ok = a.bytes == 1 || a.bytes == 2 || a.bytes == 4 || a.bytes == 8;
    const bool in_line = ((a.addr ^ (a.addr + a.bytes - 1)) & ~line_mask_) == 0;
    if (a.core >= caches_.size() || !size_ok || a.addr + a.bytes > mem_bytes_ || !in_line) {
      fault(a);
    }
  }
  [[noreturn]] void fault(const MemAccess& a) const;
  bool probe_lookup(const MemAccess& a, std::uint64_t line);
  Cycle line_transfer();
  void evict(std::uint32_t core, std::uint64_t line, int way, Cycle& service);

  TimingParams timing_;
  bool coherent_;
  std::uint32_t line_bytes_;
  std::uint64_t line_mask_;
  std::uint64_t mem_bytes_;
  std::vector<Cache> caches_;
  std::vector<CoreMemStats> stats_;
  std::vector<std::uint64_t> sharers_;   // per memory line, bitmask of caches
  std::vector<std::uint64_t> mem_version_;
  std::uint64_t next_version_ = 0;
  BusArbiter bus_;
  std::uint64_t bus_bytes_ = 0;
  std::uint64_t mmio_bytes_ = 0;
};

}  // namespace andromeda
