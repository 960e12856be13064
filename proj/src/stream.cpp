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

#include <algorithm>
#include <cstring>
#include <limits>

#include "andromeda/benchmarks.hpp"
#include "detail.hpp"

namespace andromeda {

namespace {

constexpr std::uint32_t kTagB = 1, kTagC = 2, kTagA = 3;

struct StreamNodePlan {
  StreamLayout layout;
  Partition slice;  // global elements held by the node
};

TraceProducer stream_core(std::uint32_t node, std::uint32_t local, Arrangement arr,
                          std::vector<StreamNodePlan> plans, StreamParams p, TimingParams t) {
  const auto& plan = plans[node];
  const bool comm = arr.nodes > 1 && local == 0;
  const auto cost = copy_cost(t);
  const auto& root = plans[0].layout;

  std::vector<Slice> b_slices, c_slices, a_slices;
  for (const auto& pl : plans) {
    b_slices.push_back({root.b + pl.slice.start * 8, pl.slice.len * 8});
    c_slices.push_back({root.c + pl.slice.start * 8, pl.slice.len * 8});
    a_slices.push_back({root.a + pl.slice.start * 8, pl.slice.len * 8});
  }
  if (comm) {
    for (const auto& op : scatter_ops(0, node, arr.nodes, b_slices, plan.layout.b, kTagB, cost)) {
      for (std::size_t i = 0; i < op.size(); ++i) co_yield op[i];
    }
    for (const auto& op : scatter_ops(0, node, arr.nodes, c_slices, plan.layout.c, kTagC, cost)) {
      for (std::size_t i = 0; i < op.size(); ++i) co_yield op[i];
    }
  }
  co_yield TraceStep::barrier(node_group(node));
  const auto mine = partition_even(plan.slice.len, arr.cores_per_node, local);
  for (std::uint32_t r = 0; r < p.reps; ++r) {
    for (const auto k : kStreamKernels) {
      auto sub = stream_kernel_trace(k, plan.layout, mine.start, mine.end(), t);
      while (sub.next_batch()) {
        co_yield sub.batch();
      }
      co_yield TraceStep::barrier(node_group(node));
    }
  }
  if (comm) {
    for (const auto& op : gather_ops(0, node, arr.nodes, a_slices, plan.layout.a, kTagA, cost)) {
      for (std::size_t i = 0; i < op.size(); ++i) co_yield op[i];
    }
  }
}

}  // namespace

TraceProducer stream_kernel_trace(StreamKernel k, StreamLayout l, std::uint64_t begin,
                                  std::uint64_t end, TimingParams t) {
  Cycle cost = t.int_op_cycles;
  if (k == StreamKernel::Scale) cost += t.fp_mul_cycles;
  if (k == StreamKernel::Add) cost += t.fp_add_cycles;
  if (k == StreamKernel::Triad) cost += t.fp_mul_cycles + t.fp_add_cycles;
  const bool reads_c = k == StreamKernel::Add || k == StreamKernel::Triad;
  for (std::uint64_t i = begin; i < end; ++i) {
    co_yield TraceStep::read(l.b + 8 * i, 8);
    if (reads_c) co_yield TraceStep::read(l.c + 8 * i, 8);
    co_yield TraceStep::write(l.a + 8 * i, 8);
    co_yield TraceStep::compute(cost);
  }
}

StreamResult stream_run(const SystemConfig& cfg, const Arrangement& arr, const StreamParams& p) {
  const auto report = validate(cfg, arr);
  if (!report.ok()) throw SimulationError(report.summary());
  if (p.reps == 0) throw VerificationError("STREAM needs at least one repetition");

  StreamResult res;
  res.a.assign(p.n, 1.0);
  res.b.assign(p.n, 2.0);
  res.c.assign(p.n, 1.0);
  if (p.seed != 0) {
    std::mt19937_64 rng(p.seed);
    for (auto& x : res.b) x = detail::uniform(rng, -1.0, 1.0);
    for (auto& x : res.c) x = detail::uniform(rng, -1.0, 1.0);
  }

  std::vector<StreamNodePlan> plans(arr.nodes);
  for (NodeId n = 0; n < arr.nodes; ++n) {
    plans[n].slice = partition_even(p.n, arr.nodes, n);
    NodeAllocator alloc(cfg.node_mem_bytes.at(n), n);
    const std::uint64_t len = n == 0 ? p.n : plans[n].slice.len;
    plans[n].layout = {alloc.alloc(8 * len), alloc.alloc(8 * len), alloc.alloc(8 * len)};
  }

  // Functional execution: scatter b and c, run the node slices, gather a.
  Mailbox mb;
  std::vector<std::uint64_t> counts;
  for (const auto& pl : plans) counts.push_back(pl.slice.len);
  auto b_parts = scatter<double>(mb, 0, res.b, counts, kTagB);
  auto c_parts = scatter<double>(mb, 0, res.c, counts, kTagC);
  std::vector<std::vector<double>> a_parts(arr.nodes);
  for (NodeId n = 0; n < arr.nodes; ++n) {
    a_parts[n].assign(res.a.begin() + plans[n].slice.start, res.a.begin() + plans[n].slice.end());
    for (std::uint32_t r = 0; r < p.reps; ++r) {
      for (const auto k : kStreamKernels) {
        parallel::stream(k, a_parts[n], b_parts[n], c_parts[n], p.q, arr.cores_per_node);
      }
    }
  }
  auto gathered = gather<double>(mb, 0, a_parts, kTagA);

  std::vector<double> ref_a = res.a;
  reference::stream_sequence(ref_a, res.b, res.c, p.q, p.reps);
  if (gathered.size() != ref_a.size() ||
      std::memcmp(gathered.data(), ref_a.data(), ref_a.size() * sizeof(double)) != 0) {
    throw VerificationError("STREAM result differs from the serial reference");
  }
  for (std::uint64_t i = 0; i < p.n; ++i) {
    if (gathered[i] != res.b[i] + p.q * res.c[i]) {
      throw VerificationError("STREAM validation failed at element " + std::to_string(i));
    }
  }
  res.a = std::move(gathered);

  Workload w;
  w.arrangement = arr;
  w.barrier_groups = standard_groups(arr);
  for (CoreId c = 0; c < arr.total_cores(); ++c) {
    w.cores.push_back(stream_core(c / arr.cores_per_node, c % arr.cores_per_node, arr, plans, p,
                                  cfg.timing));
  }
  res.stats = run(cfg, std::move(w));

  // Kernel time: barrier-to-barrier interval, slowest node.
  res.best_cycles.fill(std::numeric_limits<Cycle>::max());
  for (std::uint32_t r = 0; r < p.reps; ++r) {
    for (std::size_t k = 0; k < 4; ++k) {
      Cycle slowest = 0;
      for (NodeId n = 0; n < arr.nodes; ++n) {
        const auto& rel = res.stats.barrier_releases[node_group(n)];
        const std::size_t idx = 1 + 4 * r + k;
        slowest = std::max(slowest, rel[idx] - rel[idx - 1]);
      }
      res.best_cycles[k] = std::min(res.best_cycles[k], slowest);
    }
  }
  for (std::size_t k = 0; k < 4; ++k) {
    res.bandwidth[k] = static_cast<double>(stream_counted_bytes(kStreamKernels[k]) * p.n) /
                       static_cast<double>(res.best_cycles[k]);
  }
  return res;
}

}  // namespace andromeda
