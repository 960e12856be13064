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

#include "andromeda/runtime.hpp"

#include <string>

namespace andromeda {

Partition partition_even(std::uint64_t n_items, std::uint32_t n_workers, std::uint32_t worker) {
  const std::uint64_t base = n_items / n_workers;
  const std::uint64_t rem = n_items % n_workers;
  const std::uint64_t len = base + (worker < rem ? 1 : 0);
  const std::uint64_t start = worker * base + std::min<std::uint64_t>(worker, rem);
  return {start, len};
}

std::vector<std::vector<CoreId>> standard_groups(const Arrangement& arr) {
  std::vector<std::vector<CoreId>> groups(1 + arr.nodes);
  for (CoreId c = 0; c < arr.total_cores(); ++c) {
    groups[kGlobalGroup].push_back(c);
    groups[node_group(c / arr.cores_per_node)].push_back(c);
  }
  return groups;
}

std::uint64_t NodeAllocator::alloc(std::uint64_t bytes) {
  const std::uint64_t start = (next_ + 63) & ~std::uint64_t{63};
  if (start + bytes > capacity_) {
    throw MemoryFault("destination memory overflow on node " + std::to_string(node_) + ": " +
                      std::to_string(start + bytes) + " bytes needed, " +
                      std::to_string(capacity_) + " available");
  }
  next_ = start + bytes;
  return start;
}

CopyCost copy_cost(const TimingParams& t) {
  // Address increment plus loop branch per transferred word.
  return {t.nic_word_bytes, 2 * t.int_op_cycles};
}

namespace {

CopySteps copy(std::uint64_t addr, std::uint64_t bytes, AccessKind kind, CopyCost cost) {
  return CopySteps{addr, bytes, kind, cost.word, cost.loop_cycles};
}

}  // namespace

std::vector<MessageOp> scatter_ops(NodeId root, NodeId self, std::uint32_t nodes,
                                   std::span<const Slice> slices, std::uint64_t local_addr,
                                   std::uint32_t tag, CopyCost cost) {
  std::vector<MessageOp> ops;
  if (self == root) {
    for (NodeId n = 0; n < nodes; ++n) {
      if (n == root || slices[n].bytes == 0) continue;
      ops.push_back({true, n, tag, copy(slices[n].root_addr, slices[n].bytes, AccessKind::Read, cost)});
    }
  } else if (slices[self].bytes > 0) {
    ops.push_back({false, root, tag, copy(local_addr, slices[self].bytes, AccessKind::Write, cost)});
  }
  return ops;
}

std::vector<MessageOp> bcast_ops(NodeId root, NodeId self, std::uint32_t nodes,
                                 std::uint64_t root_addr, std::uint64_t bytes,
                                 std::uint64_t local_addr, std::uint32_t tag, CopyCost cost) {
  std::vector<MessageOp> ops;
  if (bytes == 0) return ops;
  if (self == root) {
    for (NodeId n = 0; n < nodes; ++n) {
      if (n != root) ops.push_back({true, n, tag, copy(root_addr, bytes, AccessKind::Read, cost)});
    }
  } else {
    ops.push_back({false, root, tag, copy(local_addr, bytes, AccessKind::Write, cost)});
  }
  return ops;
}

std::vector<MessageOp> gather_ops(NodeId root, NodeId self, std::uint32_t nodes,
                                  std::span<const Slice> slices, std::uint64_t local_addr,
                                  std::uint32_t tag, CopyCost cost) {
  std::vector<MessageOp> ops;
  if (self == root) {
    for (NodeId n = 0; n < nodes; ++n) {
      if (n == root || slices[n].bytes == 0) continue;
      ops.push_back({false, n, tag, copy(slices[n].root_addr, slices[n].bytes, AccessKind::Write, cost)});
    }
  } else if (slices[self].bytes > 0) {
    ops.push_back({true, root, tag, copy(local_addr, slices[self].bytes, AccessKind::Read, cost)});
  }
  return ops;
}

void Mailbox::send(NodeId src, NodeId dst, std::uint32_t tag, std::vector<std::byte> payload) {
  queues_[{src, dst, tag}].push_back(std::move(payload));
}

std::vector<std::byte> Mailbox::recv(NodeId src, NodeId dst, std::uint32_t tag) {
  auto it = queues_.find({src, dst, tag});
  if (it == queues_.end() || it->second.empty()) {
    throw MessageError("no message from node " + std::to_string(src) + " to node " +
                       std::to_string(dst) + " with tag " + std::to_string(tag));
  }
  auto payload = std::move(it->second.front());
  it->second.pop_front();
  return payload;
}

std::size_t Mailbox::pending() const {
  std::size_t n = 0;
  for (const auto& [key, q] : queues_) n += q.size();
  return n;
}

}  // namespace andromeda
