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

#include <cstring>

#include "andromeda/benchmarks.hpp"
#include "detail.hpp"

namespace andromeda {

namespace {

constexpr std::uint32_t kTagInit = 1, kTagExchange = 2;
constexpr std::uint64_t kBodyBytes = sizeof(Body);
constexpr std::uint64_t kOffX = 0, kOffY = 4, kOffZ = 8, kOffVx = 12, kOffVy = 16, kOffVz = 20,
                        kOffM = 24;

struct NBodyNodePlan {
  NBodyLayout layout;
  Partition owned;
};

TraceProducer nbody_core(std::uint32_t node, std::uint32_t local, Arrangement arr,
                         std::vector<NBodyNodePlan> plans, std::uint64_t n, NBodyParams p,
                         TimingParams t) {
  const auto& plan = plans[node];
  const bool distributed = arr.nodes > 1;
  const bool comm = distributed && local == 0;
  const auto cost = copy_cost(t);
  const auto group = node_group(node);

  if (distributed) {
    if (comm) {
      for (const auto& op : bcast_ops(0, node, arr.nodes, plans[0].layout.bodies, n * kBodyBytes,
                                      plan.layout.bodies, kTagInit, cost)) {
        for (std::size_t i = 0; i < op.size(); ++i) co_yield op[i];
      }
    }
    co_yield TraceStep::barrier(group);
  }
  const auto mine = partition_even(plan.owned.len, arr.cores_per_node, local);
  const std::uint64_t begin = plan.owned.start + mine.start;
  const std::uint64_t end = begin + mine.len;
  for (std::uint32_t step = 0; step < p.steps; ++step) {
    {
      auto sub = nbody_forces_trace(plan.layout, n, begin, end, plan.owned.start, t);
      while (sub.next_batch()) {
        co_yield sub.batch();
      }
    }
    co_yield TraceStep::barrier(group);
    {
      auto sub = nbody_update_trace(plan.layout, begin, end, plan.owned.start, t);
      while (sub.next_batch()) {
        co_yield sub.batch();
      }
    }
    co_yield TraceStep::barrier(group);
    if (distributed) {
      if (comm) {
        // All-gather as one broadcast per node, in node order.
        for (NodeId r = 0; r < arr.nodes; ++r) {
          const auto& owner = plans[r].owned;
          if (owner.len == 0) continue;
          const std::uint64_t addr = plan.layout.bodies + owner.start * kBodyBytes;
          for (const auto& op : bcast_ops(r, node, arr.nodes, addr, owner.len * kBodyBytes, addr,
                                          kTagExchange, cost)) {
            for (std::size_t i = 0; i < op.size(); ++i) co_yield op[i];
          }
        }
      }
      co_yield TraceStep::barrier(group);
    }
  }
}

}  // namespace

Cycle nbody_pair_cycles(const TimingParams& t) {
  return 8 * t.fp_add_cycles + 9 * t.fp_mul_cycles + t.fp_div_cycles + t.fp_sqrt_cycles;
}

double nbody_flops_per_cycle(std::uint64_t n, std::uint32_t steps, Cycle cycles) {
  if (cycles == 0 || n < 2) return 0.0;
  return static_cast<double>(kPairFlops * n * (n - 1) * steps) / static_cast<double>(cycles);
}

std::vector<Body> make_bodies(std::uint32_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<Body> bodies(n);
  for (auto& b : bodies) {
    b.x = static_cast<float>(detail::uniform(rng, 0.0, 1.0));
    b.y = static_cast<float>(detail::uniform(rng, 0.0, 1.0));
    b.z = static_cast<float>(detail::uniform(rng, 0.0, 1.0));
    b.vx = b.vy = b.vz = 0.0f;
    b.m = static_cast<float>(detail::uniform(rng, 0.5, 1.5) / n);
  }
  return bodies;
}

TraceProducer nbody_forces_trace(NBodyLayout l, std::uint64_t n, std::uint64_t begin,
                                 std::uint64_t end, std::uint64_t acc_offset, TimingParams t) {
  const Cycle pair = nbody_pair_cycles(t);
  for (std::uint64_t i = begin; i < end; ++i) {
    const std::uint64_t bi = l.bodies + i * kBodyBytes;
    co_yield TraceStep::read(bi + kOffX, 4);
    co_yield TraceStep::read(bi + kOffY, 4);
    co_yield TraceStep::read(bi + kOffZ, 4);
    co_yield TraceStep::read(bi + kOffM, 4);
    for (std::uint64_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const std::uint64_t bj = l.bodies + j * kBodyBytes;
      co_yield TraceStep::read(bj + kOffX, 4);
      co_yield TraceStep::read(bj + kOffY, 4);
      co_yield TraceStep::read(bj + kOffZ, 4);
      co_yield TraceStep::read(bj + kOffM, 4);
      co_yield TraceStep::compute(pair);
    }
    const std::uint64_t ai = l.acc + (i - acc_offset) * sizeof(Vec3f);
    co_yield TraceStep::write(ai, 4);
    co_yield TraceStep::write(ai + 4, 4);
    co_yield TraceStep::write(ai + 8, 4);
    co_yield TraceStep::compute(t.int_op_cycles);
  }
}

TraceProducer nbody_update_trace(NBodyLayout l, std::uint64_t begin, std::uint64_t end,
                                 std::uint64_t acc_offset, TimingParams t) {
  // a = F/m, v += a·dt, r += v·dt on three components.
  const Cycle cost = 3 * t.fp_div_cycles + 6 * t.fp_mul_cycles + 6 * t.fp_add_cycles;
  for (std::uint64_t i = begin; i < end; ++i) {
    const std::uint64_t ai = l.acc + (i - acc_offset) * sizeof(Vec3f);
    const std::uint64_t bi = l.bodies + i * kBodyBytes;
    co_yield TraceStep::read(ai, 4);
    co_yield TraceStep::read(ai + 4, 4);
    co_yield TraceStep::read(ai + 8, 4);
    co_yield TraceStep::read(bi + kOffM, 4);
    co_yield TraceStep::read(bi + kOffVx, 4);
    co_yield TraceStep::read(bi + kOffVy, 4);
    co_yield TraceStep::read(bi + kOffVz, 4);
    co_yield TraceStep::read(bi + kOffX, 4);
    co_yield TraceStep::read(bi + kOffY, 4);
    co_yield TraceStep::read(bi + kOffZ, 4);
    co_yield TraceStep::compute(cost);
    co_yield TraceStep::write(bi + kOffVx, 4);
    co_yield TraceStep::write(bi + kOffVy, 4);
    co_yield TraceStep::write(bi + kOffVz, 4);
    co_yield TraceStep::write(bi + kOffX, 4);
    co_yield TraceStep::write(bi + kOffY, 4);
    co_yield TraceStep::write(bi + kOffZ, 4);
  }
}

NBodyResult nbody_run(const SystemConfig& cfg, const Arrangement& arr, std::vector<Body> bodies,
                      const NBodyParams& p) {
  const auto report = validate(cfg, arr);
  if (!report.ok()) throw SimulationError(report.summary());
  const std::uint64_t n = bodies.size();

  std::vector<NBodyNodePlan> plans(arr.nodes);
  for (NodeId node = 0; node < arr.nodes; ++node) {
    plans[node].owned = partition_even(n, arr.nodes, node);
    NodeAllocator alloc(cfg.node_mem_bytes.at(node), node);
    plans[node].layout.bodies = alloc.alloc(n * kBodyBytes);
    plans[node].layout.acc = alloc.alloc(plans[node].owned.len * sizeof(Vec3f));
  }

  // Functional execution on per-node copies.
  Mailbox mb;
  auto copies = bcast<Body>(mb, 0, bodies, arr.nodes, kTagInit);
  std::vector<std::vector<Vec3f>> acc(arr.nodes);
  for (NodeId node = 0; node < arr.nodes; ++node) acc[node].resize(plans[node].owned.len);
  for (std::uint32_t step = 0; step < p.steps; ++step) {
    for (NodeId node = 0; node < arr.nodes; ++node) {
      const auto& own = plans[node].owned;
      parallel::nbody_forces(copies[node], acc[node], own.start, own.len, p.g, arr.cores_per_node);
    }
    for (NodeId node = 0; node < arr.nodes; ++node) {
      const auto& own = plans[node].owned;
      parallel::nbody_update(copies[node], acc[node], own.start, own.len, p.dt,
                             arr.cores_per_node);
    }
    for (NodeId r = 0; r < arr.nodes && arr.nodes > 1; ++r) {
      const auto& own = plans[r].owned;
      if (own.len == 0) continue;
      const std::span<const Body> slice(copies[r].data() + own.start, own.len);
      const auto received = bcast<Body>(mb, r, slice, arr.nodes, kTagExchange);
      for (NodeId node = 0; node < arr.nodes; ++node) {
        std::copy(received[node].begin(), received[node].end(), copies[node].begin() + own.start);
      }
    }
  }

  std::vector<Body> oracle = bodies;
  reference::nbody_run(oracle, p.steps, p.g, p.dt);
  for (NodeId node = 0; node < arr.nodes; ++node) {
    if (std::memcmp(copies[node].data(), oracle.data(), n * kBodyBytes) != 0) {
      throw VerificationError("N-body state on node " + std::to_string(node) +
                              " differs from the serial reference");
    }
  }

  NBodyResult res;
  res.bodies = std::move(copies[0]);

  Workload w;
  w.arrangement = arr;
  w.barrier_groups = standard_groups(arr);
  for (CoreId c = 0; c < arr.total_cores(); ++c) {
    w.cores.push_back(nbody_core(c / arr.cores_per_node, c % arr.cores_per_node, arr, plans, n, p,
                                 cfg.timing));
  }
  res.stats = run(cfg, std::move(w));
  return res;
}

}  // namespace andromeda
