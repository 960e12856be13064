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

#include "andromeda/engine.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <queue>
#include <sstream>
#include <unordered_map>

#include "andromeda/memsys.hpp"
#include "andromeda/noc.hpp"

namespace andromeda {

std::uint64_t SimStats::total_hits() const {
  return std::accumulate(cache_hits.begin(), cache_hits.end(), std::uint64_t{0});
}

std::uint64_t SimStats::total_misses() const {
  return std::accumulate(cache_misses.begin(), cache_misses.end(), std::uint64_t{0});
}

double SimStats::hit_rate() const {
  const auto h = total_hits();
  const auto all = h + total_misses();
  return all == 0 ? 0.0 : static_cast<double>(h) / static_cast<double>(all);
}

double SimStats::bus_utilization() const {
  if (bus_busy_cycles.empty() || total_cycles == 0) return 0.0;
  double sum = 0;
  for (auto b : bus_busy_cycles) sum += static_cast<double>(b) / static_cast<double>(total_cycles);
  return sum / static_cast<double>(bus_busy_cycles.size());
}

std::string SimStats::fingerprint() const {
  std::ostringstream out;
  auto list = [&](const char* name, const auto& v) {
    out << name << '=';
    for (const auto& x : v) out << x << ',';
    out << ';';
  };
  out << "total=" << total_cycles << ';';
  list("busy", per_core_busy);
  list("hits", cache_hits);
  list("misses", cache_misses);
  list("wb", writebacks);
  list("bwait", barrier_wait_cycles);
  list("rwait", recv_wait_cycles);
  list("bus", bus_busy_cycles);
  list("bbytes", bus_bytes);
  list("mmio", mmio_bytes);
  out << "flits=" << flit_hops << ";packets=" << packets_sent << ";pbytes=" << packet_bytes
      << ";events=" << events << ';';
  for (std::size_t g = 0; g < barrier_releases.size(); ++g) {
    out << 'g' << g;
    list("", barrier_releases[g]);
  }
  return out.str();
}

namespace {

std::string describe_blocked(const std::vector<CoreId>& cores) {
  std::string s = "simulation deadlock; blocked cores:";
  for (auto c : cores) s += " " + std::to_string(c);
  return s;
}

}  // namespace

DeadlockError::DeadlockError(std::vector<CoreId> blocked)
    : SimulationError(describe_blocked(blocked)), blocked_(std::move(blocked)) {}

namespace {

struct Event {
  Cycle time;
  std::uint32_t entity;
  std::uint64_t seq;
  EventKind kind;
  std::uint32_t arg;
};

struct Later {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    if (a.entity != b.entity) return a.entity > b.entity;
    return a.seq > b.seq;
  }
};

enum class Status : std::uint8_t { Running, WaitBus, WaitBarrier, WaitRecv, Done };
enum class BusOp : std::uint8_t { Access, Mmio };

struct Core {
  TraceProducer producer;
  std::span<const TraceStep> batch;
  std::size_t idx = 0;
  Cycle t = 0;
  Status status = Status::Done;
  std::uint32_t node = 0;
  std::uint32_t local = 0;
  BusOp op = BusOp::Access;
  MemAccess pending;
  std::uint64_t mmio_left = 0;
  bool inject_after = false;
  std::uint32_t outgoing = 0;  // index into Engine::packets_
  std::uint64_t recv_bytes = 0;
  Cycle blocked_at = 0;
  Cycle finish = 0;
  Cycle barrier_wait = 0;
  Cycle recv_wait = 0;
};

struct Group {
  std::vector<CoreId> members;
  std::vector<bool> is_member;
  std::uint32_t arrived = 0;
  Cycle latest = 0;
  std::vector<Cycle> releases;
};

struct Delivered {
  Cycle arrival;
  std::uint64_t bytes;
};

class Engine {
 public:
  Engine(const SystemConfig& cfg, Workload& w)
      : cfg_(cfg), arr_(w.arrangement), network_(cfg) {
    const auto report = validate(cfg, arr_);
    if (!report.ok()) throw SimulationError(report.summary());
    n_cores_ = arr_.total_cores();
    if (w.cores.size() != n_cores_) {
      throw SimulationError("workload has " + std::to_string(w.cores.size()) +
                            " producers for " + std::to_string(n_cores_) + " cores");
    }
    nodes_.reserve(arr_.nodes);
    for (std::uint32_t n = 0; n < arr_.nodes; ++n) {
      nodes_.emplace_back(cfg, arr_.cores_per_node, cfg.node_mem_bytes.at(n));
    }
    grant_pending_.assign(arr_.nodes, false);
    cores_.resize(n_cores_);
    for (CoreId c = 0; c < n_cores_; ++c) {
      auto& core = cores_[c];
      core.node = c / arr_.cores_per_node;
      core.local = c % arr_.cores_per_node;
      core.producer = std::move(w.cores[c]);
      core.status = core.producer ? Status::Running : Status::Done;
    }
    for (const auto& members : w.barrier_groups) {
      Group g;
      g.members = members;
      g.is_member.assign(n_cores_, false);
      for (auto m : members) {
        if (m >= n_cores_) throw SimulationError("barrier member outside the arrangement");
        if (g.is_member[m]) throw SimulationError("duplicate barrier member");
        g.is_member[m] = true;
      }
      groups_.push_back(std::move(g));
    }
  }

  SimStats run() {
    for (CoreId c = 0; c < n_cores_; ++c) {
      if (cores_[c].status == Status::Running) advance(c);
    }
    Cycle now = 0;
    while (!queue_.empty()) {
      const Event ev = queue_.top();
      queue_.pop();
      ++events_;
      now = ev.time;
      switch (ev.kind) {
        case EventKind::CoreReady: on_bus_request(ev.arg, now); break;
        case EventKind::BusGrant: on_grant(ev.arg, now); break;
        case EventKind::Inject: on_inject(ev.arg, now); break;
        case EventKind::PacketArrival: on_arrival(ev.arg, now); break;
        case EventKind::BarrierRelease: on_release(ev.arg, now); break;
      }
    }
    std::vector<CoreId> blocked;
    for (CoreId c = 0; c < n_cores_; ++c) {
      if (cores_[c].status != Status::Done) blocked.push_back(c);
    }
    if (!blocked.empty()) throw DeadlockError(std::move(blocked));
    return collect(now);
  }

 private:
  std::uint32_t bus_entity(std::uint32_t node) const { return n_cores_ + node; }
  std::uint32_t arrival_entity(NodeId dst) const { return n_cores_ + arr_.nodes + dst; }
  std::uint32_t barrier_entity(std::uint32_t g) const { return n_cores_ + 2 * arr_.nodes + g; }

  void schedule(Cycle t, std::uint32_t entity, EventKind kind, std::uint32_t arg) {
    queue_.push(Event{t, entity, seq_++, kind, arg});
  }

  static std::uint64_t channel(NodeId src, NodeId dst, std::uint32_t tag) {
    return (std::uint64_t{src} << 48) | (std::uint64_t{dst} << 32) | tag;
  }

  void request_bus(CoreId c) {
    auto& core = cores_[c];
    core.status = Status::WaitBus;
    schedule(core.t, c, EventKind::CoreReady, c);
  }

  void start_mmio(CoreId c, std::uint64_t bytes, bool inject_after) {
    auto& core = cores_[c];
    const std::uint64_t word = cfg_.timing.nic_word_bytes;
    core.mmio_left = (bytes + word - 1) / word;
    core.inject_after = inject_after;
    core.op = BusOp::Mmio;
    core.t += cfg_.timing.cache_hit_cycles;
    request_bus(c);
  }

  // Executes steps of core `c` until it needs a shared resource or blocks.
  void advance(CoreId c) {
    auto& core = cores_[c];
    core.status = Status::Running;
    auto& mem = nodes_[core.node];
    const Cycle hit = cfg_.timing.cache_hit_cycles;
    for (;;) {
      if (core.idx == core.batch.size()) {
        if (!core.producer.next_batch()) {
          core.status = Status::Done;
          core.finish = core.t;
          return;
        }
        core.batch = core.producer.batch();
        core.idx = 0;
      }
      const TraceStep& s = core.batch[core.idx++];
      switch (s.kind) {
        case StepKind::Compute:
          core.t += s.value;
          break;
        case StepKind::Access: {
          const MemAccess a{core.local, s.access, s.value, s.bytes};
          core.t += hit;
          if (!mem.probe(a)) {
            core.pending = a;
            core.op = BusOp::Access;
            request_bus(c);
            return;
          }
          break;
        }
        case StepKind::Barrier:
          arrive(c, s.peer);
          return;
        case StepKind::Send: {
          if (s.peer >= arr_.nodes) throw SimulationError("send to a node outside the arrangement");
          if (s.value == 0) throw SimulationError("empty message");
          core.outgoing = static_cast<std::uint32_t>(packets_.size());
          packets_.push_back(Packet{core.node, s.peer, s.tag, s.value});
          start_mmio(c, s.value, true);
          return;
        }
        case StepKind::Recv: {
          if (s.peer >= arr_.nodes) throw SimulationError("receive from a node outside the arrangement");
          const auto key = channel(s.peer, core.node, s.tag);
          auto it = mailbox_.find(key);
          if (it != mailbox_.end() && !it->second.empty()) {
            const auto d = it->second.front();
            it->second.pop_front();
            check_size(d.bytes, s.value);
            if (d.arrival > core.t) {
              core.recv_wait += d.arrival - core.t;
              core.t = d.arrival;
            }
            start_mmio(c, s.value, false);
            return;
          }
          core.status = Status::WaitRecv;
          core.blocked_at = core.t;
          core.recv_bytes = s.value;
          waiters_[key].push_back(c);
          return;
        }
      }
    }
  }

  static void check_size(std::uint64_t sent, std::uint64_t expected) {
    if (sent != expected) {
      throw SimulationError("message of " + std::to_string(sent) + " bytes received where " +
                            std::to_string(expected) + " were expected");
    }
  }

  void arrive(CoreId c, std::uint32_t gid) {
    if (gid >= groups_.size()) throw SimulationError("unknown barrier group " + std::to_string(gid));
    auto& g = groups_[gid];
    if (!g.is_member[c]) {
      throw SimulationError("core " + std::to_string(c) + " is not in barrier group " +
                            std::to_string(gid));
    }
    auto& core = cores_[c];
    core.status = Status::WaitBarrier;
    core.blocked_at = core.t;
    g.latest = std::max(g.latest, core.t);
    if (++g.arrived < g.members.size()) return;
    const Cycle release = g.latest + cfg_.timing.barrier_base_cycles +
                          cfg_.timing.barrier_per_core_cycles * g.members.size();
    g.releases.push_back(release);
    g.arrived = 0;
    g.latest = 0;
    schedule(release, barrier_entity(gid), EventKind::BarrierRelease, gid);
  }

  void on_release(std::uint32_t gid, Cycle now) {
    for (const CoreId m : groups_[gid].members) {
      auto& core = cores_[m];
      core.barrier_wait += now - core.blocked_at;
      core.t = now;
      advance(m);
    }
  }

  void on_bus_request(CoreId c, Cycle now) {
    const auto node = cores_[c].node;
    auto& bus = nodes_[node].bus();
    bus.enqueue(cores_[c].local);
    if (!grant_pending_[node]) {
      grant_pending_[node] = true;
      schedule(std::max(now, bus.busy_until()), bus_entity(node), EventKind::BusGrant, node);
    }
  }

  void on_grant(std::uint32_t node, Cycle now) {
    grant_pending_[node] = false;
    auto& mem = nodes_[node];
    auto& bus = mem.bus();
    if (!bus.has_pending()) return;
    const CoreId c = node * arr_.cores_per_node + bus.pick();
    auto& core = cores_[c];
    const Cycle service = core.op == BusOp::Mmio ? mem.mmio_service() : mem.transact(core.pending);
    core.t = bus.occupy(now, service);
    if (bus.has_pending()) {
      grant_pending_[node] = true;
      schedule(bus.busy_until(), bus_entity(node), EventKind::BusGrant, node);
    }
    if (core.op == BusOp::Mmio) {
      if (--core.mmio_left > 0) {
        core.t += cfg_.timing.cache_hit_cycles;
        request_bus(c);
        return;
      }
      if (core.inject_after) {
        core.inject_after = false;
        schedule(core.t, c, EventKind::Inject, core.outgoing);
      }
    }
    advance(c);
  }

  void on_inject(std::uint32_t packet, Cycle now) {
    const auto& p = packets_[packet];
    const Cycle arrival = network_.transport(p, now);
    schedule(arrival, arrival_entity(p.dst), EventKind::PacketArrival, packet);
  }

  void on_arrival(std::uint32_t packet, Cycle now) {
    const auto& p = packets_[packet];
    const auto key = channel(p.src, p.dst, p.tag);
    auto w = waiters_.find(key);
    if (w != waiters_.end() && !w->second.empty()) {
      const CoreId c = w->second.front();
      w->second.pop_front();
      auto& core = cores_[c];
      check_size(p.payload_bytes, core.recv_bytes);
      if (now > core.blocked_at) {
        core.recv_wait += now - core.blocked_at;
        core.t = now;
      }
      start_mmio(c, core.recv_bytes, false);
      return;
    }
    mailbox_[key].push_back(Delivered{now, p.payload_bytes});
  }

  SimStats collect(Cycle last_event) {
    SimStats s;
    s.per_core_busy.resize(n_cores_);
    s.cache_hits.resize(n_cores_);
    s.cache_misses.resize(n_cores_);
    s.writebacks.resize(n_cores_);
    s.barrier_wait_cycles.resize(n_cores_);
    s.recv_wait_cycles.resize(n_cores_);
    Cycle total = last_event;
    for (CoreId c = 0; c < n_cores_; ++c) {
      const auto& core = cores_[c];
      total = std::max(total, core.finish);
      s.per_core_busy[c] = core.finish - core.barrier_wait - core.recv_wait;
      const auto& ms = nodes_[core.node].stats(core.local);
      s.cache_hits[c] = ms.hits;
      s.cache_misses[c] = ms.misses;
      s.writebacks[c] = ms.writebacks;
      s.barrier_wait_cycles[c] = core.barrier_wait;
      s.recv_wait_cycles[c] = core.recv_wait;
    }
    s.total_cycles = total;
    for (const auto& n : nodes_) {
      s.bus_busy_cycles.push_back(n.bus().busy_cycles());
      s.bus_bytes.push_back(n.bus_bytes());
      s.mmio_bytes.push_back(n.mmio_bytes());
    }
    s.flit_hops = network_.flit_hops();
    s.packets_sent = network_.packets();
    s.packet_bytes = network_.bytes_in();
    s.events = events_;
    for (auto& g : groups_) s.barrier_releases.push_back(std::move(g.releases));
    return s;
  }

  const SystemConfig& cfg_;
  Arrangement arr_;
  std::uint32_t n_cores_ = 0;
  std::vector<NodeMemory> nodes_;
  std::vector<bool> grant_pending_;
  std::vector<Core> cores_;
  std::vector<Group> groups_;
  Network network_;
  std::vector<Packet> packets_;
  std::unordered_map<std::uint64_t, std::deque<Delivered>> mailbox_;
  std::unordered_map<std::uint64_t, std::deque<CoreId>> waiters_;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::uint64_t seq_ = 0;
  std::uint64_t events_ = 0;
};

}  // namespace

TraceProducer from_steps(std::vector<TraceStep> steps) {
  for (const auto& s : steps) co_yield s;
}

std::vector<TraceStep> collect(TraceProducer producer) {
  std::vector<TraceStep> out;
  while (producer.next_batch()) {
    const auto b = producer.batch();
    out.insert(out.end(), b.begin(), b.end());
  }
  return out;
}

SimStats run(const SystemConfig& cfg, Workload workload) {
  Engine engine(cfg, workload);
  return engine.run();
}

}  // namespace andromeda
