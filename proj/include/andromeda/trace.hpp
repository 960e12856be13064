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

#include <coroutine>
#include <cstdint>
#include <exception>
#include <span>
#include <utility>
#include <vector>

#include "andromeda/config.hpp"
#include "andromeda/memsys.hpp"

namespace andromeda {

enum class StepKind : std::uint8_t { Compute, Access, Barrier, Send, Recv };

/// One unit of work charged to a core.
///   Compute: value = cycles
///   Access:  value = node-local address, bytes, access
///   Barrier: peer = group id
///   Send:    peer = destination node, tag, value = payload bytes
///   Recv:    peer = source node, tag, value = payload bytes
struct TraceStep {
  StepKind kind = StepKind::Compute;
  AccessKind access = AccessKind::Read;
  std::uint8_t bytes = 0;
  std::uint32_t peer = 0;
  std::uint32_t tag = 0;
  std::uint64_t value = 0;

  static constexpr TraceStep compute(Cycle cycles) {
    return {StepKind::Compute, AccessKind::Read, 0, 0, 0, cycles};
  }
  static constexpr TraceStep read(std::uint64_t addr, std::uint8_t bytes) {
    return {StepKind::Access, AccessKind::Read, bytes, 0, 0, addr};
  }
  static constexpr TraceStep write(std::uint64_t addr, std::uint8_t bytes) {
    return {StepKind::Access, AccessKind::Write, bytes, 0, 0, addr};
  }
  static constexpr TraceStep barrier(std::uint32_t group) {
    return {StepKind::Barrier, AccessKind::Read, 0, group, 0, 0};
  }
  static constexpr TraceStep send(NodeId dst, std::uint32_t tag, std::uint64_t bytes) {
    return {StepKind::Send, AccessKind::Read, 0, dst, tag, bytes};
  }
  static constexpr TraceStep recv(NodeId src, std::uint32_t tag, std::uint64_t bytes) {
    return {StepKind::Recv, AccessKind::Read, 0, src, tag, bytes};
  }
  bool operator==(const TraceStep&) const = default;
};

/// Lazily generated step sequence of one core. Producer coroutines
/// `co_yield` steps; they are buffered and the coroutine only suspends when
/// the buffer is full, so the engine pulls work in batches.
class TraceProducer {
 public:
  static constexpr std::size_t kBatch = 4096;

  struct promise_type {
    std::vector<TraceStep> buffer;
    std::exception_ptr error;

    struct BatchAwaiter {
      bool full;
      bool await_ready() const noexcept { return !full; }
      void await_suspend(std::coroutine_handle<>) const noexcept {}
      void await_resume() const noexcept {}
    };

    TraceProducer get_return_object() {
      return TraceProducer(std::coroutine_handle<promise_type>::from_promise(*this));
    }
    std::suspend_always initial_suspend() noexcept { return {}; }
    std::suspend_always final_suspend() noexcept { return {}; }
    BatchAwaiter yield_value(const TraceStep& step) {
      buffer.push_back(step);
      return {buffer.size() >= kBatch};
    }
    // Splices a whole batch of a nested producer.
    BatchAwaiter yield_value(std::span<const TraceStep> steps) {
      buffer.insert(buffer.end(), steps.begin(), steps.end());
      return {buffer.size() >= kBatch};
    }
    void return_void() {}
    void unhandled_exception() { error = std::current_exception(); }
  };

  TraceProducer() = default;
  explicit TraceProducer(std::coroutine_handle<promise_type> h) : handle_(h) {
    handle_.promise().buffer.reserve(kBatch);
  }
  TraceProducer(TraceProducer&& o) noexcept : handle_(std::exchange(o.handle_, {})) {}
  TraceProducer& operator=(TraceProducer&& o) noexcept {
    if (this != &o) {
      reset();
      handle_ = std::exchange(o.handle_, {});
    }
    return *this;
  }
  TraceProducer(const TraceProducer&) = delete;
  TraceProducer& operator=(const TraceProducer&) = delete;
  ~TraceProducer() { reset(); }

  explicit operator bool() const { return static_cast<bool>(handle_); }

  /// Generates the next batch. Returns false once the producer is exhausted.
  /// Exceptions thrown inside the producer are rethrown here.
  bool next_batch() {
    if (!handle_) return false;
    auto& p = handle_.promise();
    p.buffer.clear();
    if (!handle_.done()) handle_.resume();
    if (p.error) std::rethrow_exception(std::exchange(p.error, nullptr));
    return !p.buffer.empty();
  }
  std::span<const TraceStep> batch() const {
    if (!handle_) return {};
    return handle_.promise().buffer;
  }

 private:
  void reset() {
    if (handle_) handle_.destroy();
    handle_ = {};
  }
  std::coroutine_handle<promise_type> handle_;
};

/// Producer over a fixed step list (tests and small scripted workloads).
TraceProducer from_steps(std::vector<TraceStep> steps);

/// Drains a producer into a vector.
std::vector<TraceStep> collect(TraceProducer producer);

/// The work of a whole run: one producer per core (global core id =
/// node × cores_per_node + local index; an empty producer is an idle core)
/// and the membership of every barrier group.
struct Workload {
  Arrangement arrangement;
  std::vector<TraceProducer> cores;
  std::vector<std::vector<CoreId>> barrier_groups;
};

}  // namespace andromeda
