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

#include "andromeda/memsys.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <numeric>
#include <string>

namespace andromeda {

Cache::Cache(const CacheConfig& geometry)
    : geo_(geometry),
      line_shift_(static_cast<unsigned>(std::countr_zero(geometry.line_bytes))),
      set_mask_(geometry.n_sets - 1),
      ways_(std::size_t{geometry.n_sets} * geometry.n_ways) {}

int Cache::find(std::uint64_t line) const {
  const Way* set = &ways_[std::size_t{set_of(line)} * geo_.n_ways];
  for (std::uint32_t w = 0; w < geo_.n_ways; ++w) {
    if (set[w].state != LineState::Invalid && set[w].tag == line) return static_cast<int>(w);
  }
  return -1;
}

int Cache::victim(std::uint64_t line) const {
  const Way* set = &ways_[std::size_t{set_of(line)} * geo_.n_ways];
  int best = 0;
  for (std::uint32_t w = 0; w < geo_.n_ways; ++w) {
    if (set[w].state == LineState::Invalid) return static_cast<int>(w);
    if (set[w].stamp < set[best].stamp) best = static_cast<int>(w);
  }
  return best;
}

LineState Cache::state(std::uint64_t line) const {
  const int w = find(line);
  return w < 0 ? LineState::Invalid : at(line, w).state;
}

std::vector<std::uint32_t> Cache::lru_ranks(std::uint32_t set) const {
  const Way* ways = &ways_[std::size_t{set} * geo_.n_ways];
  std::vector<std::uint32_t> order(geo_.n_ways);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return ways[a].stamp > ways[b].stamp;
  });
  std::vector<std::uint32_t> rank(geo_.n_ways);
  for (std::uint32_t r = 0; r < geo_.n_ways; ++r) rank[order[r]] = r;
  return rank;
}

CacheOutcome cache_access(Cache& cache, const MemAccess& a) {
  const auto line = cache.line_of(a.addr);
  int w = cache.find(line);
  CacheOutcome out;
  if (w >= 0) {
    out.hit = true;
  } else {
    w = cache.victim(line);
    auto& v = cache.at(line, w);
    out.victim_dirty = v.state == LineState::Modified;
    v.tag = line;
    v.state = LineState::Shared;
  }
  auto& way = cache.at(line, w);
  if (a.kind == AccessKind::Write) way.state = LineState::Modified;
  cache.touch(line, w);
  return out;
}

BusArbiter::BusArbiter(std::uint32_t requesters, const TimingParams& t)
    : n_(requesters),
      overhead_(t.bus_addr_overhead_cycles),
      width_(t.bus_bytes_per_cycle),
      ptr_(requesters - 1) {
  assert(requesters >= 1 && requesters <= 64);
}

Cycle BusArbiter::service_cycles(std::uint64_t bytes) const {
  assert(bytes > 0);
  return overhead_ + (bytes + width_ - 1) / width_;
}

void BusArbiter::enqueue(std::uint32_t requester) {
  pending_ |= std::uint64_t{1} << requester;
}

std::uint32_t BusArbiter::pick() {
  assert(pending_ != 0);
  std::uint32_t r = ptr_;
  do {
    r = r + 1 == n_ ? 0 : r + 1;
  } while (!(pending_ >> r & 1));
  pending_ &= ~(std::uint64_t{1} << r);
  ptr_ = r;
  return r;
}

Cycle BusArbiter::occupy(Cycle at, Cycle service) {
  const Cycle start = std::max(at, busy_until_);
  busy_until_ = start + service;
  busy_cycles_ += service;
  return busy_until_;
}

Cycle BusArbiter::transaction(std::uint32_t requester, std::uint64_t bytes, Cycle at) {
  ptr_ = requester;
  return occupy(at, service_cycles(bytes));
}

NodeMemory::NodeMemory(const SystemConfig& cfg, std::uint32_t cores, std::uint64_t mem_bytes)
    : timing_(cfg.timing),
      coherent_(cfg.coherence_enabled),
      line_bytes_(cfg.cache.line_bytes),
      line_mask_(std::uint64_t{cfg.cache.line_bytes} - 1),
      mem_bytes_(mem_bytes),
      caches_(cores, Cache(cfg.cache)),
      stats_(cores),
      sharers_((mem_bytes + line_bytes_ - 1) / line_bytes_, 0),
      mem_version_(sharers_.size(), 0),
      bus_(cores, cfg.timing) {}

void NodeMemory::fault(const MemAccess& a) const {
  if (a.core >= caches_.size()) throw MemoryFault("access from unknown core");
  if (a.bytes != 1 && a.bytes != 2 && a.bytes != 4 && a.bytes != 8) {
    throw MemoryFault("access size " + std::to_string(a.bytes) + " not in {1,2,4,8}");
  }
  if (a.addr + a.bytes > mem_bytes_) {
    throw MemoryFault("address " + std::to_string(a.addr) + " beyond node memory of " +
                      std::to_string(mem_bytes_) + " bytes");
  }
  if ((a.addr / line_bytes_) != ((a.addr + a.bytes - 1) / line_bytes_)) {
    throw MemoryFault("access at " + std::to_string(a.addr) + " straddles a cache line");
  }
  throw MemoryFault("invalid access");
}

bool NodeMemory::probe_lookup(const MemAccess& a, std::uint64_t line) {
  auto& c = caches_[a.core];
  int w = c.mru_line == line ? c.mru_way : c.find(line);
  if (w < 0) return false;
  auto& way = c.at(line, w);
  if (a.kind == AccessKind::Write && way.state != LineState::Modified) {
    if (coherent_) return false;  // upgrade needs the bus
    way.state = LineState::Modified;
  }
  if (a.kind == AccessKind::Write) way.version = ++next_version_;
  c.touch(line, w);
  c.mru_line = line;
  c.mru_way = w;
  ++stats_[a.core].hits;
  return true;
}

Cycle NodeMemory::line_transfer() {
  bus_bytes_ += line_bytes_;
  return bus_.service_cycles(line_bytes_);
}

void NodeMemory::evict(std::uint32_t core, std::uint64_t line, int way, Cycle& service) {
  auto& c = caches_[core];
  auto& v = c.at(line, way);
  if (v.state == LineState::Invalid) return;
  if (v.state == LineState::Modified) {
    service += line_transfer();
    ++stats_[core].writebacks;
    mem_version_[v.tag] = v.version;
  }
  sharers_[v.tag] &= ~(std::uint64_t{1} << core);
  if (c.mru_line == v.tag) c.mru_line = ~std::uint64_t{0};
  v.state = LineState::Invalid;
}

SnoopResult NodeMemory::snoop(std::uint32_t writer, std::uint64_t line) {
  SnoopResult r;
  if (!coherent_) return r;
  std::uint64_t others = sharers_[line] & ~(std::uint64_t{1} << writer);
  while (others) {
    const auto core = static_cast<std::uint32_t>(std::countr_zero(others));
    others &= others - 1;
    auto& c = caches_[core];
    const int w = c.find(line);
    if (w < 0) continue;
    auto& way = c.at(line, w);
    if (way.state == LineState::Modified) {
      ++r.writebacks;
      ++stats_[core].writebacks;
      bus_bytes_ += line_bytes_;
      mem_version_[line] = way.version;
    }
    way.state = LineState::Invalid;
    if (c.mru_line == line) c.mru_line = ~std::uint64_t{0};
    sharers_[line] &= ~(std::uint64_t{1} << core);
    r.invalidated.push_back(core);
  }
  return r;
}

Cycle NodeMemory::transact(const MemAccess& a) {
  auto& c = caches_[a.core];
  const auto line = c.line_of(a.addr);
  int w = c.find(line);
  Cycle service = 0;

  if (w >= 0) {
    // Upgrade: the line survived in Shared state until the grant.
    auto& way = c.at(line, w);
    if (a.kind == AccessKind::Write && way.state != LineState::Modified) {
      const auto snooped = snoop(a.core, line);
      service += snooped.invalidated.size();
      way.state = LineState::Modified;
    }
    if (a.kind == AccessKind::Write) way.version = ++next_version_;
    ++stats_[a.core].hits;
    c.touch(line, w);
    c.mru_line = line;
    c.mru_way = w;
    return std::max<Cycle>(service, 1);
  }

  ++stats_[a.core].misses;
  w = c.victim(line);
  evict(a.core, line, w, service);

  if (coherent_) {
    if (a.kind == AccessKind::Read) {
      // A Modified copy elsewhere is flushed and demoted to Shared.
      std::uint64_t others = sharers_[line] & ~(std::uint64_t{1} << a.core);
      while (others) {
        const auto core = static_cast<std::uint32_t>(std::countr_zero(others));
        others &= others - 1;
        auto& oc = caches_[core];
        const int ow = oc.find(line);
        if (ow < 0) continue;
        auto& way = oc.at(line, ow);
        if (way.state == LineState::Modified) {
          service += line_transfer();
          ++stats_[core].writebacks;
          mem_version_[line] = way.version;
          way.state = LineState::Shared;
        }
      }
    } else {
      const auto snooped = snoop(a.core, line);
      service += snooped.invalidated.size() +
                 snooped.writebacks * bus_.service_cycles(line_bytes_);
    }
  }

  service += line_transfer();
  auto& way = c.at(line, w);
  way.tag = line;
  way.version = mem_version_[line];
  way.state = a.kind == AccessKind::Write ? LineState::Modified : LineState::Shared;
  if (a.kind == AccessKind::Write) way.version = ++next_version_;
  sharers_[line] |= std::uint64_t{1} << a.core;
  c.touch(line, w);
  c.mru_line = line;
  c.mru_way = w;
  return service;
}

Cycle NodeMemory::mmio_service() {
  mmio_bytes_ += timing_.nic_word_bytes;
  return bus_.service_cycles(timing_.nic_word_bytes);
}

std::uint64_t NodeMemory::value_of(std::uint32_t core, std::uint64_t addr) const {
  const auto& c = caches_[core];
  const auto line = c.line_of(addr);
  const int w = c.find(line);
  if (w < 0) throw MemoryFault("line not cached");
  return c.at(line, w).version;
}

std::uint32_t NodeMemory::modified_copies(std::uint64_t line) const {
  std::uint32_t n = 0;
  for (const auto& c : caches_) n += c.state(line) == LineState::Modified;
  return n;
}

}  // namespace andromeda
