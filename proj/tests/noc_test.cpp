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

#include <cstdlib>
#include <random>

#include "andromeda/noc.hpp"
#include "doctest.h"

using namespace andromeda;

namespace {

// Flit-by-flit walk of one packet through an idle mesh. At every router the
// routing decision takes R cycles once the header (cut-through) or the whole
// packet (store-and-forward) is present; afterwards one flit per cycle
// crosses the link, never before it has itself arrived.
Cycle flit_walk(std::uint32_t hops, std::uint64_t flits, Cycle r, bool cut_through) {
  std::vector<Cycle> here(flits, 0);  // arrival cycle of each flit at the current node
  for (std::uint32_t h = 0; h < hops; ++h) {
    const Cycle decide = (cut_through ? here.front() : here.back()) + r;
    std::vector<Cycle> next(flits);
    Cycle link_free = 0;
    for (std::uint64_t f = 0; f < flits; ++f) {
      const Cycle start = std::max({decide, here[f], link_free});
      next[f] = start + 1;
      link_free = start + 1;
    }
    here = next;
  }
  return here.back();
}

SystemConfig mesh_cfg(FlowControl fc, RouterKind rk) {
  SystemConfig c = preset("NOC_SW");
  c.flow_control = fc;
  c.router_kind = rk;
  c.timing = nominal_timing();
  return c;
}

}  // namespace

TEST_CASE("route_xy: examples") {
  const MeshTopology t{4, 4};
  CHECK(route_xy(t, 3, 3).empty());
  CHECK(route_xy(t, 5, 6) == std::vector<NodeId>{6});
  CHECK(route_xy(t, 0, 15) == std::vector<NodeId>{1, 2, 3, 7, 11, 15});
  CHECK(t.coords(0) == std::pair<std::uint32_t, std::uint32_t>{0, 0});
  CHECK(t.coords(6) == std::pair<std::uint32_t, std::uint32_t>{2, 1});
}

TEST_CASE("route_xy: every pair of the 4x4 mesh") {
  const MeshTopology t{4, 4};
  for (NodeId s = 0; s < 16; ++s) {
    for (NodeId d = 0; d < 16; ++d) {
      const auto path = route_xy(t, s, d);
      const int manhattan = std::abs(int(s % 4) - int(d % 4)) + std::abs(int(s / 4) - int(d / 4));
      CHECK(static_cast<int>(path.size()) == manhattan);
      NodeId prev = s;
      bool y_phase = false;
      for (const NodeId n : path) {
        const int dx = std::abs(int(n % 4) - int(prev % 4));
        const int dy = std::abs(int(n / 4) - int(prev / 4));
        CHECK(dx + dy == 1);
        if (dy == 1) y_phase = true;
        CHECK_FALSE((y_phase && dx == 1));  // no X move after a Y move
        prev = n;
      }
      CHECK(prev == d);
    }
  }
}

TEST_CASE("latency: closed-form examples") {
  const auto t = nominal_timing();
  CHECK(packet_latency_uncontended(4, 64, FlowControl::StoreAndForward,
                                   RouterKind::HardwareSwitch, t) == 40);
  CHECK(packet_latency_uncontended(4, 64, FlowControl::CutThrough, RouterKind::HardwareSwitch,
                                   t) == 19);
  for (std::uint32_t h = 1; h <= 6; ++h) {
    const auto saf =
        packet_latency_uncontended(h, 8, FlowControl::StoreAndForward, RouterKind::HardwareSwitch, t);
    const auto ct =
        packet_latency_uncontended(h, 8, FlowControl::CutThrough, RouterKind::HardwareSwitch, t);
    CHECK(saf == ct);
    CHECK(saf == h * (t.hw_router_delay_cycles + 1));
  }
}

// SAF - CT = (H - 1)(S - 1): with a single hop there is nothing to cut
// through, so the two schemes also coincide at H = 1.
TEST_CASE("latency: cut-through <= store-and-forward") {
  const auto t = nominal_timing();
  for (const auto rk : {RouterKind::HardwareSwitch, RouterKind::SoftwareCore}) {
    for (std::uint32_t h = 1; h <= 6; ++h) {
      for (std::uint64_t s = 1; s <= 64; ++s) {
        const auto bytes = s * t.link_flit_bytes;
        const auto saf = packet_latency_uncontended(h, bytes, FlowControl::StoreAndForward, rk, t);
        const auto ct = packet_latency_uncontended(h, bytes, FlowControl::CutThrough, rk, t);
        CHECK(ct <= saf);
        CHECK(saf - ct == (h - 1) * (s - 1));
        if (h >= 2) CHECK((ct == saf) == (s == 1));
      }
    }
  }
}

TEST_CASE("latency: software router never beats the switch") {
  const auto t = nominal_timing();
  REQUIRE(t.sw_router_cycles_per_flit >= t.hw_router_delay_cycles);
  for (const auto fc : {FlowControl::StoreAndForward, FlowControl::CutThrough}) {
    for (std::uint32_t h = 1; h <= 6; ++h) {
      for (std::uint64_t bytes = 1; bytes <= 512; bytes += 37) {
        CHECK(packet_latency_uncontended(h, bytes, fc, RouterKind::SoftwareCore, t) >=
              packet_latency_uncontended(h, bytes, fc, RouterKind::HardwareSwitch, t));
      }
    }
  }
}

TEST_CASE("latency: closed forms agree with a flit-level walk") {
  const auto t = nominal_timing();
  for (const auto rk : {RouterKind::HardwareSwitch, RouterKind::SoftwareCore}) {
    for (const bool ct : {false, true}) {
      for (std::uint32_t h = 1; h <= 6; ++h) {
        for (std::uint64_t s = 1; s <= 40; ++s) {
          const Cycle r = rk == RouterKind::SoftwareCore ? s * t.sw_router_cycles_per_flit
                                                         : t.hw_router_delay_cycles;
          const auto fc = ct ? FlowControl::CutThrough : FlowControl::StoreAndForward;
          CHECK(packet_latency_uncontended(h, s * 8, fc, rk, t) == flit_walk(h, s, r, ct));
        }
      }
    }
  }
}

TEST_CASE("transport: idle mesh delivers at the uncontended latency") {
  for (const auto fc : {FlowControl::StoreAndForward, FlowControl::CutThrough}) {
    for (const auto rk : {RouterKind::HardwareSwitch, RouterKind::SoftwareCore}) {
      const auto cfg = mesh_cfg(fc, rk);
      const MeshTopology topo{4, 4};
      for (NodeId d = 0; d < 16; ++d) {
        Network net(cfg);
        const Packet p{0, d, 1, 100};
        CHECK(net.transport(p, 50) ==
              50 + packet_latency_uncontended(topo, p, fc, rk, cfg.timing));
        CHECK(net.flit_hops() == topo.distance(0, d) * flit_count(100, cfg.timing));
      }
    }
  }
}

TEST_CASE("transport: shared link delays the later packet by its occupancy") {
  for (const auto fc : {FlowControl::StoreAndForward, FlowControl::CutThrough}) {
    const auto cfg = mesh_cfg(fc, RouterKind::HardwareSwitch);
    const auto rk = RouterKind::HardwareSwitch;
    Network net(cfg);
    const Packet p{0, 1, 1, 64};  // 8 flits on link 0>1
    const Packet q{0, 2, 2, 64};  // 0>1 then 1>2
    const Cycle a = net.transport(p, 0);
    const Cycle b = net.transport(q, 0);
    CHECK(a == packet_latency_uncontended(1, 64, fc, rk, cfg.timing));
    // Both are ready for link 0>1 at the same cycle; q waits out p's 8 flits.
    CHECK(b == packet_latency_uncontended(2, 64, fc, rk, cfg.timing) + 8);
  }
}

TEST_CASE("transport: identical packets on one link serialize") {
  const auto cfg = mesh_cfg(FlowControl::StoreAndForward, RouterKind::HardwareSwitch);
  Network net(cfg);
  const Cycle a = net.transport({0, 1, 1, 64}, 0);
  const Cycle b = net.transport({0, 1, 2, 64}, 0);
  CHECK(a == 2 + 8);
  CHECK(b == a + 8);
}

TEST_CASE("transport: opposite directions do not interfere") {
  const auto cfg = mesh_cfg(FlowControl::CutThrough, RouterKind::HardwareSwitch);
  Network net(cfg);
  const Cycle a = net.transport({0, 3, 1, 256}, 0);
  const Cycle b = net.transport({3, 0, 1, 256}, 0);
  CHECK(a == b);
  CHECK(a == packet_latency_uncontended(3, 256, FlowControl::CutThrough,
                                        RouterKind::HardwareSwitch, cfg.timing));
}

TEST_CASE("transport: random traffic never beats the uncontended bound") {
  for (const auto fc : {FlowControl::StoreAndForward, FlowControl::CutThrough}) {
    for (const auto rk : {RouterKind::HardwareSwitch, RouterKind::SoftwareCore}) {
      const auto cfg = mesh_cfg(fc, rk);
      Network net(cfg);
      std::mt19937_64 rng(11);
      Cycle at = 0;
      std::uint64_t bytes = 0;
      for (int i = 0; i < 500; ++i) {
        at += rng() % 20;
        const Packet p{NodeId(rng() % 16), NodeId(rng() % 16), 0, 1 + rng() % 300};
        bytes += p.payload_bytes;
        const Cycle arrival = net.transport(p, at);
        CHECK(arrival >= at + packet_latency_uncontended(net.topology(), p, fc, rk, cfg.timing));
      }
      CHECK(net.packets() == 500);
      CHECK(net.bytes_in() == bytes);
    }
  }
}

TEST_CASE("interval schedule: gap filling") {
  IntervalSchedule s;
  CHECK(s.reserve(10, 5) == 10);  // [10,15)
  CHECK(s.reserve(0, 5) == 0);    // [0,5) fits before
  CHECK(s.reserve(3, 5) == 5);    // [5,10) exactly fills the gap
  CHECK(s.reserve(0, 1) == 15);
  s.prune(12);
  CHECK(s.size() == 2);
}
