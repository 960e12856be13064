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

#include "andromeda/kernels.hpp"

namespace andromeda {

const char* to_string(StreamKernel k) {
  switch (k) {
    case StreamKernel::Copy: return "copy";
    case StreamKernel::Scale: return "scale";
    case StreamKernel::Add: return "add";
    case StreamKernel::Triad: return "triad";
  }
  return "?";
}

std::uint64_t stream_counted_bytes(StreamKernel k) {
  return k == StreamKernel::Copy || k == StreamKernel::Scale ? 16 : 24;
}

namespace reference {

void stream(StreamKernel k, std::span<double> a, std::span<const double> b,
            std::span<const double> c, double q) {
  kernel::stream_range(k, ArrayView<double>{a.data()},
                       ArrayView<double>{const_cast<double*>(b.data())},
                       ArrayView<double>{const_cast<double*>(c.data())}, q, 0, a.size());
}

void stream_sequence(std::span<double> a, std::span<const double> b, std::span<const double> c,
                     double q, std::uint32_t reps) {
  for (std::uint32_t r = 0; r < reps; ++r) {
    for (auto k : kStreamKernels) stream(k, a, b, c, q);
  }
}

std::vector<double> matmul(std::span<const double> a, std::span<const double> b, std::size_t n,
                           std::size_t k, std::size_t m) {
  std::vector<double> c(n * m, 0.0);
  kernel::matmul_rows(ArrayView<double>{const_cast<double*>(a.data())},
                      ArrayView<double>{const_cast<double*>(b.data())},
                      ArrayView<double>{c.data()}, 0, n, k, m);
  return c;
}

std::vector<Vec3f> nbody_forces(std::span<const Body> bodies, float g) {
  std::vector<Vec3f> f(bodies.size());
  kernel::nbody_forces_range(BodyView{const_cast<Body*>(bodies.data())}, ArrayView<Vec3f>{f.data()},
                             bodies.size(), 0, bodies.size(), 0, g);
  return f;
}

void nbody_step(std::span<Body> bodies, float g, float dt) {
  auto f = nbody_forces(bodies, g);
  kernel::nbody_update_range(BodyView{bodies.data()}, ArrayView<Vec3f>{f.data()}, 0,
                             bodies.size(), 0, dt);
}

void nbody_run(std::span<Body> bodies, std::uint32_t steps, float g, float dt) {
  for (std::uint32_t s = 0; s < steps; ++s) nbody_step(bodies, g, dt);
}

}  // namespace reference
}  // namespace andromeda
