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

constexpr std::uint32_t kTagA = 1, kTagB = 2, kTagC = 3;

struct MatmulNodePlan {
  MatmulLayout layout;
  Partition rows;  // global rows owned by the node
};

TraceProducer matmul_core(std::uint32_t node, std::uint32_t local, Arrangement arr,
                          std::vector<MatmulNodePlan> plans, std::uint32_t k_dim,
                          std::uint32_t m_dim, TimingParams t) {
  const auto& plan = plans[node];
  const bool distributed = arr.nodes > 1;
  const auto cost = copy_cost(t);
  const auto& root = plans[0].layout;
  const std::uint64_t a_row = 8ull * k_dim, c_row = 8ull * m_dim;

  std::vector<Slice> a_slices, c_slices;
  for (const auto& pl : plans) {
    a_slices.push_back({root.a + pl.rows.start * a_row, pl.rows.len * a_row});
    c_slices.push_back({root.c + pl.rows.start * c_row, pl.rows.len * c_row});
  }
  if (distributed) {
    if (local == 0) {
      for (const auto& op : scatter_ops(0, node, arr.nodes, a_slices, plan.layout.a, kTagA, cost)) {
        for (std::size_t i = 0; i < op.size(); ++i) co_yield op[i];
      }
      for (const auto& op : bcast_ops(0, node, arr.nodes, root.b, 8ull * k_dim * m_dim,
                                      plan.layout.b, kTagB, cost)) {
        for (std::size_t i = 0; i < op.size(); ++i) co_yield op[i];
      }
    }
    co_yield TraceStep::barrier(node_group(node));
  }
  const auto mine = partition_even(plan.rows.len, arr.cores_per_node, local);
  auto sub = matmul_rows_trace(plan.layout, mine.start, mine.end(), k_dim, m_dim, t);
  while (sub.next_batch()) {
    co_yield sub.batch();
  }
  co_yield TraceStep::barrier(node_group(node));
  if (distributed && local == 0) {
    for (const auto& op : gather_ops(0, node, arr.nodes, c_slices, plan.layout.c, kTagC, cost)) {
      for (std::size_t i = 0; i < op.size(); ++i) co_yield op[i];
    }
  }
}

}  // namespace

MatmulInput make_matmul_input(std::uint32_t n, std::uint32_t k, std::uint32_t m,
                              std::uint64_t seed, bool identity_a) {
  MatmulInput in{n, k, m, std::vector<double>(std::size_t{n} * k),
                 std::vector<double>(std::size_t{k} * m)};
  std::mt19937_64 rng(seed);
  if (identity_a) {
    if (n != k) throw VerificationError("identity A needs n == k");
    for (std::uint32_t i = 0; i < n; ++i) in.a[std::size_t{i} * k + i] = 1.0;
  } else {
    for (auto& x : in.a) x = detail::uniform(rng, -1.0, 1.0);
  }
  for (auto& x : in.b) x = detail::uniform(rng, -1.0, 1.0);
  return in;
}

TraceProducer matmul_rows_trace(MatmulLayout l, std::uint64_t row_begin, std::uint64_t row_end,
                                std::uint32_t k_dim, std::uint32_t m_dim, TimingParams t) {
  const Cycle mac = t.fp_mul_cycles + t.fp_add_cycles;
  for (std::uint64_t i = row_begin; i < row_end; ++i) {
    for (std::uint64_t j = 0; j < m_dim; ++j) {
      for (std::uint64_t k = 0; k < k_dim; ++k) {
        co_yield TraceStep::read(l.a + 8 * (i * k_dim + k), 8);
        co_yield TraceStep::read(l.b + 8 * (j * k_dim + k), 8);
        co_yield TraceStep::compute(mac);
      }
      co_yield TraceStep::write(l.c + 8 * (i * m_dim + j), 8);
      co_yield TraceStep::compute(t.int_op_cycles);
    }
  }
}

MatmulResult matmul_run(const SystemConfig& cfg, const Arrangement& arr, const MatmulInput& in) {
  const auto report = validate(cfg, arr);
  if (!report.ok()) throw SimulationError(report.summary());
  const std::uint64_t n = in.n, k = in.k, m = in.m;
  if (in.a.size() != n * k || in.b.size() != k * m) {
    throw VerificationError("matrix sizes do not match their dimensions");
  }

  std::vector<MatmulNodePlan> plans(arr.nodes);
  for (NodeId node = 0; node < arr.nodes; ++node) {
    plans[node].rows = partition_even(n, arr.nodes, node);
    NodeAllocator alloc(cfg.node_mem_bytes.at(node), node);
    const std::uint64_t rows = node == 0 ? n : plans[node].rows.len;
    plans[node].layout.a = alloc.alloc(8 * rows * k);
    plans[node].layout.b = alloc.alloc(8 * k * m);
    plans[node].layout.c = alloc.alloc(8 * rows * m);
  }

  // Functional execution through the same collectives.
  Mailbox mb;
  std::vector<std::uint64_t> counts;
  for (const auto& pl : plans) counts.push_back(pl.rows.len * k);
  const auto a_parts = scatter<double>(mb, 0, in.a, counts, kTagA);
  const auto b_copies = bcast<double>(mb, 0, in.b, arr.nodes, kTagB);
  std::vector<std::vector<double>> c_parts(arr.nodes);
  for (NodeId node = 0; node < arr.nodes; ++node) {
    const auto rows = plans[node].rows.len;
    c_parts[node].assign(rows * m, 0.0);
    parallel::matmul_rows(a_parts[node], b_copies[node], c_parts[node], rows, k, m,
                          arr.cores_per_node);
  }
  MatmulResult res;
  res.c = gather<double>(mb, 0, c_parts, kTagC);

  const auto oracle = reference::matmul(in.a, in.b, n, k, m);
  if (res.c.size() != oracle.size() ||
      std::memcmp(res.c.data(), oracle.data(), oracle.size() * sizeof(double)) != 0) {
    throw VerificationError("Matmul result differs from the serial reference");
  }

  Workload w;
  w.arrangement = arr;
  w.barrier_groups = standard_groups(arr);
  for (CoreId c = 0; c < arr.total_cores(); ++c) {
    w.cores.push_back(matmul_core(c / arr.cores_per_node, c % arr.cores_per_node, arr, plans,
                                  in.k, in.m, cfg.timing));
  }
  res.stats = run(cfg, std::move(w));
  return res;
}

}  // namespace andromeda
