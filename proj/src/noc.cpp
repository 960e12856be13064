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

#include "andromeda/noc.hpp"

#include <algorithm>
#include <cassert>

namespace andromeda {

std::uint32_t MeshTopology::distance(NodeId a, NodeId b) const {
  const auto [ax, ay] = coords(a);
  const auto [bx, by] = coords(b);
  return (ax > bx ? ax - bx : bx - ax) + (ay > by ? ay - by : by - ay);
}

std::vector<NodeId> route_xy(const MeshTopology& topo, NodeId src, NodeId dst) {
  std::vector<NodeId> path;
  auto [x, y] = topo.coords(src);
  const auto [dx, dy] = topo.coords(dst);
  while (x != dx) {
    x = x < dx ? x + 1 : x - 1;
    path.push_back(topo.node_at(x, y));
  }
  while (y != dy) {
    y = y < dy ? y + 1 : y - 1;
    path.push_back(topo.node_at(x, y));
  }
  return path;
}

std::uint64_t flit_count(std::uint64_t payload_bytes, const TimingParams& t) {
  return (payload_bytes + t.link_flit_bytes - 1) / t.link_flit_bytes;
}

namespace {

Cycle router_delay(std::uint64_t flits, RouterKind rk, const TimingParams& t) {
  return rk == RouterKind::SoftwareCore ? flits * t.sw_router_cycles_per_flit
                                        : t.hw_router_delay_cycles;
}

}  // namespace

Cycle packet_latency_uncontended(std::uint32_t hops, std::uint64_t payload_bytes,
                                 FlowControl fc, RouterKind rk, const TimingParams& t) {
  if (hops == 0) return 0;
  const Cycle s = flit_count(payload_bytes, t);
  const Cycle r = router_delay(s, rk, t);
  if (fc == FlowControl::StoreAndForward) return hops * (r + s);
  return hops * (r + 1) + (s - 1);
}

Cycle packet_latency_uncontended(const MeshTopology& topo, const Packet& p, FlowControl fc,
                                 RouterKind rk, const TimingParams& t) {
  return packet_latency_uncontended(topo.distance(p.src, p.dst), p.payload_bytes, fc, rk, t);
}

Cycle IntervalSchedule::reserve(Cycle ready, Cycle length) {
  Cycle start = ready;
  auto it = std::lower_bound(busy_.begin(), busy_.end(), ready,
                             [](const auto& iv, Cycle t) { return iv.second <= t; });
  for (; it != busy_.end(); ++it) {
    if (it->first >= start + length) break;
    start = std::max(start, it->second);
  }
  if (length > 0) busy_.insert(it, {start, start + length});
  return start;
}

void IntervalSchedule::prune(Cycle horizon) {
  auto keep = std::find_if(busy_.begin(), busy_.end(),
                           [&](const auto& iv) { return iv.second > horizon; });
  busy_.erase(busy_.begin(), keep);
}

Network::Network(const SystemConfig& cfg)
    : topo_{cfg.mesh_x, cfg.mesh_y},
      fc_(cfg.flow_control),
      rk_(cfg.router_kind),
      timing_(cfg.timing),
      links_(std::size_t{cfg.nodes()} * 4),
      routers_(rk_ == RouterKind::SoftwareCore ? cfg.nodes() : 0) {}

std::size_t Network::link_index(NodeId from, NodeId to) const {
  const auto [fx, fy] = topo_.coords(from);
  const auto [tx, ty] = topo_.coords(to);
  std::size_t dir = tx > fx ? 0 : tx < fx ? 1 : ty > fy ? 2 : 3;
  assert(topo_.distance(from, to) == 1);
  return std::size_t{from} * 4 + dir;
}

Cycle Network::transport(const Packet& p, Cycle at) {
  ++packets_;
  bytes_in_ += p.payload_bytes;
  if (p.src == p.dst) return at;

  const auto path = route_xy(topo_, p.src, p.dst);
  const Cycle s = flit_count(p.payload_bytes, timing_);
  const Cycle r = router_delay(s, rk_, timing_);
  flit_hops_ += path.size() * s;

  // `head` is when the packet (SAF) or its header flit (CT) is at `here`.
  Cycle head = at;
  Cycle tail = at;
  NodeId here = p.src;
  for (const NodeId next : path) {
    Cycle ready = head;
    if (rk_ == RouterKind::SoftwareCore) {
      auto& router = routers_[here];
      router.prune(at);
      ready = router.reserve(ready, r) + r;
    } else {
      ready += r;
    }
    auto& link = links_[link_index(here, next)];
    link.prune(at);
    const Cycle start = link.reserve(ready, s);
    if (fc_ == FlowControl::StoreAndForward) {
      head = start + s;
    } else {
      head = start + 1;
    }
    tail = start + s;
    here = next;
  }
  return tail;
}

}  // namespace andromeda
