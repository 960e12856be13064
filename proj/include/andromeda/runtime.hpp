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

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <deque>
#include <map>
#include <span>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "andromeda/config.hpp"
#include "andromeda/memsys.hpp"
#include "andromeda/trace.hpp"

namespace andromeda {

struct Partition {
  std::uint64_t start = 0;
  std::uint64_t len = 0;
  std::uint64_t end() const { return start + len; }
  bool operator==(const Partition&) const = default;
};

/// Contiguous share of `n_items` for `worker`; the first n mod w workers
/// get one extra item.
Partition partition_even(std::uint64_t n_items, std::uint32_t n_workers, std::uint32_t worker);

/// Barrier group numbering used by every benchmark workload: group 0 holds
/// all cores, group 1 + n the cores of node n.
constexpr std::uint32_t kGlobalGroup = 0;
constexpr std::uint32_t node_group(NodeId n) { return 1 + n; }
std::vector<std::vector<CoreId>> standard_groups(const Arrangement& arr);

/// Bump allocator over one node's local address space, 64 B aligned.
class NodeAllocator {
 public:
  explicit NodeAllocator(std::uint64_t capacity, NodeId node = 0)
      : capacity_(capacity), node_(node) {}
  std::uint64_t alloc(std::uint64_t bytes);
  std::uint64_t used() const { return next_; }

 private:
  std::uint64_t capacity_;
  NodeId node_;
  std::uint64_t next_ = 0;
};

/// Word-by-word copy between node memory and the network interface:
/// [Access(word), Compute(loop)] per word.
struct CopySteps {
  std::uint64_t base = 0;
  std::uint64_t bytes = 0;
  AccessKind kind = AccessKind::Read;
  std::uint32_t word = 4;
  Cycle loop_cycles = 2;

  std::size_t size() const { return 2 * ((bytes + word - 1) / word); }
  TraceStep operator[](std::size_t i) const {
    const std::uint64_t off = (i / 2) * word;
    if (i % 2) return TraceStep::compute(loop_cycles);
    const auto width = static_cast<std::uint8_t>(std::min<std::uint64_t>(word, bytes - off));
    return kind == AccessKind::Read ? TraceStep::read(base + off, width)
                                    : TraceStep::write(base + off, width);
  }
};

/// One point-to-point transfer seen from one side: a send copies the
/// buffer out and then posts the message; a receive waits for the message
/// and then copies it in.
struct MessageOp {
  bool is_send = true;
  NodeId peer = 0;
  std::uint32_t tag = 0;
  CopySteps copy;

  std::size_t size() const { return copy.size() + 1; }
  TraceStep operator[](std::size_t i) const {
    if (is_send) {
      return i < copy.size() ? copy[i] : TraceStep::send(peer, tag, copy.bytes);
    }
    return i == 0 ? TraceStep::recv(peer, tag, copy.bytes) : copy[i - 1];
  }
};

struct CopyCost {
  std::uint32_t word = 4;
  Cycle loop_cycles = 2;
};
CopyCost copy_cost(const TimingParams& t);

/// Address and size of one node's slice inside the root's buffer.
struct Slice {
  std::uint64_t root_addr = 0;
  std::uint64_t bytes = 0;
};

/// Step plans of the linear collectives, as executed by the communicating
/// core of node `self`. The root serves peers in ascending node order.
std::vector<MessageOp> scatter_ops(NodeId root, NodeId self, std::uint32_t nodes,
                                   std::span<const Slice> slices, std::uint64_t local_addr,
                                   std::uint32_t tag, CopyCost cost);
std::vector<MessageOp> bcast_ops(NodeId root, NodeId self, std::uint32_t nodes,
                                 std::uint64_t root_addr, std::uint64_t bytes,
                                 std::uint64_t local_addr, std::uint32_t tag, CopyCost cost);
std::vector<MessageOp> gather_ops(NodeId root, NodeId self, std::uint32_t nodes,
                                  std::span<const Slice> slices, std::uint64_t local_addr,
                                  std::uint32_t tag, CopyCost cost);

class MessageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Functional message store: payloads matched by (src, dst, tag), FIFO per
/// channel.
class Mailbox {
 public:
  void send(NodeId src, NodeId dst, std::uint32_t tag, std::vector<std::byte> payload);
  std::vector<std::byte> recv(NodeId src, NodeId dst, std::uint32_t tag);
  std::size_t pending() const;

  template <typename T>
  void send_values(NodeId src, NodeId dst, std::uint32_t tag, std::span<const T> values) {
    std::vector<std::byte> bytes(values.size_bytes());
    if (!bytes.empty()) std::memcpy(bytes.data(), values.data(), bytes.size());
    send(src, dst, tag, std::move(bytes));
  }
  template <typename T>
  std::vector<T> recv_values(NodeId src, NodeId dst, std::uint32_t tag) {
    const auto bytes = recv(src, dst, tag);
    if (bytes.size() % sizeof(T)) throw MessageError("payload size mismatch");
    std::vector<T> out(bytes.size() / sizeof(T));
    if (!bytes.empty()) std::memcpy(out.data(), bytes.data(), bytes.size());
    return out;
  }

 private:
  std::map<std::tuple<NodeId, NodeId, std::uint32_t>, std::deque<std::vector<std::byte>>> queues_;
};

/// Functional collectives over per-node buffers, mirroring the step plans.
/// `counts` are element counts per node.
template <typename T>
std::vector<std::vector<T>> scatter(Mailbox& mb, NodeId root, std::span<const T> root_buf,
                                    std::span<const std::uint64_t> counts,
                                    std::uint32_t tag) {
  const auto nodes = static_cast<std::uint32_t>(counts.size());
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  if (total != root_buf.size()) throw MessageError("scatter counts do not cover the buffer");
  std::vector<std::vector<T>> out(nodes);
  std::uint64_t off = 0;
  for (NodeId n = 0; n < nodes; ++n) {
    const auto slice = root_buf.subspan(off, counts[n]);
    if (n == root) {
      out[n].assign(slice.begin(), slice.end());
    } else if (!slice.empty()) {
      mb.send_values(root, n, tag, slice);
    }
    off += counts[n];
  }
  for (NodeId n = 0; n < nodes; ++n) {
    if (n != root && counts[n] > 0) out[n] = mb.recv_values<T>(root, n, tag);
  }
  return out;
}

template <typename T>
std::vector<std::vector<T>> bcast(Mailbox& mb, NodeId root, std::span<const T> root_buf,
                                  std::uint32_t nodes, std::uint32_t tag) {
  std::vector<std::vector<T>> out(nodes);
  for (NodeId n = 0; n < nodes; ++n) {
    if (n != root) mb.send_values(root, n, tag, root_buf);
  }
  for (NodeId n = 0; n < nodes; ++n) {
    out[n] = n == root ? std::vector<T>(root_buf.begin(), root_buf.end())
                       : mb.recv_values<T>(root, n, tag);
  }
  return out;
}

template <typename T>
std::vector<T> gather(Mailbox& mb, NodeId root, const std::vector<std::vector<T>>& slices,
                      std::uint32_t tag) {
  const auto nodes = static_cast<std::uint32_t>(slices.size());
  for (NodeId n = 0; n < nodes; ++n) {
    if (n != root && !slices[n].empty()) {
      mb.send_values(n, root, tag, std::span<const T>(slices[n]));
    }
  }
  std::vector<T> out;
  for (NodeId n = 0; n < nodes; ++n) {
    if (n == root) {
      out.insert(out.end(), slices[n].begin(), slices[n].end());
    } else if (!slices[n].empty()) {
      const auto part = mb.recv_values<T>(n, root, tag);
      out.insert(out.end(), part.begin(), part.end());
    }
  }
  return out;
}

}  // namespace andromeda
