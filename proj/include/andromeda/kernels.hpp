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

// Functional benchmark kernels. Each kernel body is a template over "views"
// with get/set accessors, so the same code runs on plain arrays and on
// instrumented views that log every address touched.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace andromeda {

enum class StreamKernel { Copy, Scale, Add, Triad };
inline constexpr StreamKernel kStreamKernels[] = {StreamKernel::Copy, StreamKernel::Scale,
                                                  StreamKernel::Add, StreamKernel::Triad};
const char* to_string(StreamKernel k);
/// Bytes counted per element by the STREAM convention (16, 16, 24, 24).
std::uint64_t stream_counted_bytes(StreamKernel k);

/// One body: position, velocity, mass; single precision, 28 bytes.
struct Body {
  float x, y, z;
  float vx, vy, vz;
  float m;
  bool operator==(const Body&) const = default;
};
static_assert(sizeof(Body) == 28);

struct Vec3f {
  float x = 0, y = 0, z = 0;
  bool operator==(const Vec3f&) const = default;
};

class SingularityError : public std::runtime_error {
 public:
  SingularityError(std::size_t i, std::size_t j)
      : std::runtime_error("coincident bodies " + std::to_string(i) + " and " +
                           std::to_string(j)),
        i_(i),
        j_(j) {}
  std::size_t i() const { return i_; }
  std::size_t j() const { return j_; }

 private:
  std::size_t i_, j_;
};

template <typename T>
struct ArrayView {
  T* data;
  T get(std::size_t i) const { return data[i]; }
  void set(std::size_t i, T v) const { data[i] = v; }
};

struct BodyView {
  Body* data;
  float x(std::size_t i) const { return data[i].x; }
  float y(std::size_t i) const { return data[i].y; }
  float z(std::size_t i) const { return data[i].z; }
  float vx(std::size_t i) const { return data[i].vx; }
  float vy(std::size_t i) const { return data[i].vy; }
  float vz(std::size_t i) const { return data[i].vz; }
  float m(std::size_t i) const { return data[i].m; }
  void set_velocity(std::size_t i, float vx, float vy, float vz) const {
    data[i].vx = vx;
    data[i].vy = vy;
    data[i].vz = vz;
  }
  void set_position(std::size_t i, float x, float y, float z) const {
    data[i].x = x;
    data[i].y = y;
    data[i].z = z;
  }
};

namespace kernel {

template <typename A, typename B, typename C>
void stream_range(StreamKernel k, A a, B b, C c, double q, std::size_t begin, std::size_t end) {
  switch (k) {
    case StreamKernel::Copy:
      for (std::size_t i = begin; i < end; ++i) a.set(i, b.get(i));
      break;
    case StreamKernel::Scale:
      for (std::size_t i = begin; i < end; ++i) a.set(i, q * b.get(i));
      break;
    case StreamKernel::Add:
      for (std::size_t i = begin; i < end; ++i) a.set(i, b.get(i) + c.get(i));
      break;
    case StreamKernel::Triad:
      for (std::size_t i = begin; i < end; ++i) a.set(i, b.get(i) + q * c.get(i));
      break;
  }
}

/// Rows [row_begin, row_end) of C = A·B with A row-major N×K, B column-major
/// K×M and C row-major N×M. Each element accumulates in ascending k.
template <typename MA, typename MB, typename MC>
void matmul_rows(MA a, MB b, MC c, std::size_t row_begin, std::size_t row_end, std::size_t k_dim,
                 std::size_t m_dim) {
  for (std::size_t i = row_begin; i < row_end; ++i) {
    for (std::size_t j = 0; j < m_dim; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < k_dim; ++k) acc += a.get(i * k_dim + k) * b.get(j * k_dim + k);
      c.set(i * m_dim + j, acc);
    }
  }
}

/// Adds the gravitational pull of body j on body i to (fx, fy, fz).
/// 8 additions, 9 multiplications, 1 division, 1 square root. Returns
/// false (and adds nothing) for coincident bodies.
template <typename S>
bool accumulate_pair(S xi, S yi, S zi, S mi, S xj, S yj, S zj, S mj, S g, S& fx, S& fy, S& fz) {
  using std::sqrt;
  const S dx = xj - xi;
  const S dy = yj - yi;
  const S dz = zj - zi;
  const S d2 = dx * dx + dy * dy + dz * dz;
  if (d2 == S(0)) return false;
  const S dist = sqrt(d2);
  const S s = g * mi * mj / (d2 * dist);
  fx += s * dx;
  fy += s * dy;
  fz += s * dz;
  return true;
}

/// Net force on bodies [begin, end) from all n bodies, summed over
/// ascending j; stored at acc[i - acc_offset].
template <typename BV, typename AV>
void nbody_forces_range(BV bodies, AV acc, std::size_t n, std::size_t begin, std::size_t end,
                        std::size_t acc_offset, float g) {
  for (std::size_t i = begin; i < end; ++i) {
    const float xi = bodies.x(i), yi = bodies.y(i), zi = bodies.z(i), mi = bodies.m(i);
    float fx = 0, fy = 0, fz = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      if (!accumulate_pair(xi, yi, zi, mi, bodies.x(j), bodies.y(j), bodies.z(j), bodies.m(j), g,
                           fx, fy, fz)) {
        throw SingularityError(i, j);
      }
    }
    acc.set(i - acc_offset, Vec3f{fx, fy, fz});
  }
}

/// Semi-implicit Euler: a = F/m, v += a·dt, r += v·dt.
template <typename BV, typename AV>
void nbody_update_range(BV bodies, AV acc, std::size_t begin, std::size_t end,
                        std::size_t acc_offset, float dt) {
  for (std::size_t i = begin; i < end; ++i) {
    const Vec3f f = acc.get(i - acc_offset);
    const float m = bodies.m(i);
    const float vx = bodies.vx(i) + (f.x / m) * dt;
    const float vy = bodies.vy(i) + (f.y / m) * dt;
    const float vz = bodies.vz(i) + (f.z / m) * dt;
    const float x = bodies.x(i) + vx * dt;
    const float y = bodies.y(i) + vy * dt;
    const float z = bodies.z(i) + vz * dt;
    bodies.set_velocity(i, vx, vy, vz);
    bodies.set_position(i, x, y, z);
  }
}

}  // namespace kernel

/// Serial oracles.
namespace reference {

void stream(StreamKernel k, std::span<double> a, std::span<const double> b,
            std::span<const double> c, double q);
/// Full STREAM sequence: `reps` repetitions of COPY, SCALE, ADD, TRIAD.
void stream_sequence(std::span<double> a, std::span<const double> b, std::span<const double> c,
                     double q, std::uint32_t reps);
std::vector<double> matmul(std::span<const double> a, std::span<const double> b, std::size_t n,
                           std::size_t k, std::size_t m);
std::vector<Vec3f> nbody_forces(std::span<const Body> bodies, float g);
void nbody_step(std::span<Body> bodies, float g, float dt);
void nbody_run(std::span<Body> bodies, std::uint32_t steps, float g, float dt);

}  // namespace reference

/// OpenMP kernels. Work is split with the same per-core partitions the
/// simulated cores use, one OpenMP iteration per simulated core.
namespace parallel {

void stream(StreamKernel k, std::span<double> a, std::span<const double> b,
            std::span<const double> c, double q, std::uint32_t workers);
/// Rows [row_begin, row_begin + rows) of C, split across `workers`.
/// `a` and `c` hold only those rows.
void matmul_rows(std::span<const double> a, std::span<const double> b, std::span<double> c,
                 std::size_t rows, std::size_t k, std::size_t m, std::uint32_t workers);
/// Forces on bodies [begin, begin + len), split across `workers`.
void nbody_forces(std::span<const Body> bodies, std::span<Vec3f> acc, std::size_t begin,
                  std::size_t len, float g, std::uint32_t workers);
void nbody_update(std::span<Body> bodies, std::span<const Vec3f> acc, std::size_t begin,
                  std::size_t len, float dt, std::uint32_t workers);

}  // namespace parallel

}  // namespace andromeda
