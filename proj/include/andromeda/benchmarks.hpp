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

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "andromeda/config.hpp"
#include "andromeda/engine.hpp"
#include "andromeda/kernels.hpp"
#include "andromeda/runtime.hpp"
#include "andromeda/trace.hpp"

namespace andromeda {

/// Parallel result disagrees with its serial oracle.
class VerificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---- STREAM ---------------------------------------------------------------

struct StreamParams {
  std::uint64_t n = 128000;
  double q = 3.0;
  std::uint32_t reps = 10;
  // 0 selects the classic initial values a=1, b=2, c=1; anything else
  // draws b and c uniformly from [-1, 1).
  std::uint64_t seed = 0;
};

struct StreamLayout {
  std::uint64_t a = 0, b = 0, c = 0;  // base addresses of double arrays
};

struct StreamResult {
  SimStats stats;
  std::array<Cycle, 4> best_cycles{};  // per kernel, best repetition
  std::array<double, 4> bandwidth{};   // counted bytes / best cycles
  std::vector<double> a, b, c;
};

StreamResult stream_run(const SystemConfig& cfg, const Arrangement& arr, const StreamParams& p);

/// Steps of one core running kernel `k` over elements [begin, end).
TraceProducer stream_kernel_trace(StreamKernel k, StreamLayout layout, std::uint64_t begin,
                                  std::uint64_t end, TimingParams t);

// ---- Matmul ---------------------------------------------------------------

struct MatmulInput {
  std::uint32_t n = 0, k = 0, m = 0;
  std::vector<double> a;  // n×k row-major
  std::vector<double> b;  // k×m column-major
};

/// Entries uniform in [-1, 1). `identity_a` replaces A by the identity
/// (requires n == k).
MatmulInput make_matmul_input(std::uint32_t n, std::uint32_t k, std::uint32_t m,
                              std::uint64_t seed, bool identity_a = false);

struct MatmulLayout {
  std::uint64_t a = 0, b = 0, c = 0;  // local A rows, B, local C rows
};

struct MatmulResult {
  SimStats stats;
  std::vector<double> c;  // n×m row-major
};

MatmulResult matmul_run(const SystemConfig& cfg, const Arrangement& arr, const MatmulInput& in);

/// Steps of one core computing local rows [row_begin, row_end).
TraceProducer matmul_rows_trace(MatmulLayout layout, std::uint64_t row_begin,
                                std::uint64_t row_end, std::uint32_t k, std::uint32_t m,
                                TimingParams t);

// ---- N-body ---------------------------------------------------------------

/// Single-precision operations per pair interaction.
inline constexpr std::uint64_t kPairFlops = 19;

struct NBodyParams {
  std::uint32_t steps = 10;
  float g = 1.0f;
  float dt = 0.01f;
};

/// Positions uniform in the unit cube, zero velocities, masses uniform in
/// [0.5, 1.5) / n.
std::vector<Body> make_bodies(std::uint32_t n, std::uint64_t seed);

struct NBodyLayout {
  std::uint64_t bodies = 0;  // array of Body records
  std::uint64_t acc = 0;     // Vec3f per owned body
};

struct NBodyResult {
  SimStats stats;
  std::vector<Body> bodies;
};

NBodyResult nbody_run(const SystemConfig& cfg, const Arrangement& arr, std::vector<Body> bodies,
                      const NBodyParams& p);

/// Compute cycles charged per pair interaction.
Cycle nbody_pair_cycles(const TimingParams& t);
double nbody_flops_per_cycle(std::uint64_t n, std::uint32_t steps, Cycle cycles);

TraceProducer nbody_forces_trace(NBodyLayout layout, std::uint64_t n, std::uint64_t begin,
                                 std::uint64_t end, std::uint64_t acc_offset, TimingParams t);
TraceProducer nbody_update_trace(NBodyLayout layout, std::uint64_t begin, std::uint64_t end,
                                 std::uint64_t acc_offset, TimingParams t);

}  // namespace andromeda
