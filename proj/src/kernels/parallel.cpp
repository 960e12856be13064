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

#include <limits>

#include "andromeda/kernels.hpp"
#include "andromeda/runtime.hpp"

namespace andromeda::parallel {

void stream(StreamKernel k, std::span<double> a, std::span<const double> b,
            std::span<const double> c, double q, std::uint32_t workers) {
  const ArrayView<double> va{a.data()};
  const ArrayView<double> vb{const_cast<double*>(b.data())};
  const ArrayView<double> vc{const_cast<double*>(c.data())};
#pragma omp parallel for schedule(static)
  for (std::int64_t w = 0; w < workers; ++w) {
    const auto p = partition_even(a.size(), workers, static_cast<std::uint32_t>(w));
    kernel::stream_range(k, va, vb, vc, q, p.start, p.end());
  }
}

void matmul_rows(std::span<const double> a, std::span<const double> b, std::span<double> c,
                 std::size_t rows, std::size_t k, std::size_t m, std::uint32_t workers) {
  const ArrayView<double> va{const_cast<double*>(a.data())};
  const ArrayView<double> vb{const_cast<double*>(b.data())};
  const ArrayView<double> vc{c.data()};
#pragma omp parallel for schedule(static)
  for (std::int64_t w = 0; w < workers; ++w) {
    const auto p = partition_even(rows, workers, static_cast<std::uint32_t>(w));
    kernel::matmul_rows(va, vb, vc, p.start, p.end(), k, m);
  }
}

void nbody_forces(std::span<const Body> bodies, std::span<Vec3f> acc, std::size_t begin,
                  std::size_t len, float g, std::uint32_t workers) {
  const BodyView vb{const_cast<Body*>(bodies.data())};
  const ArrayView<Vec3f> va{acc.data()};
  // Exceptions cannot leave the parallel region; keep the first singular
  // pair in body order and rethrow afterwards.
  std::size_t bad_i = std::numeric_limits<std::size_t>::max(), bad_j = 0;
#pragma omp parallel for schedule(static)
  for (std::int64_t w = 0; w < workers; ++w) {
    const auto p = partition_even(len, workers, static_cast<std::uint32_t>(w));
    try {
      kernel::nbody_forces_range(vb, va, bodies.size(), begin + p.start, begin + p.end(), begin, g);
    } catch (const SingularityError& e) {
#pragma omp critical(andromeda_singularity)
      if (e.i() < bad_i) {
        bad_i = e.i();
        bad_j = e.j();
      }
    }
  }
  if (bad_i != std::numeric_limits<std::size_t>::max()) throw SingularityError(bad_i, bad_j);
}

void nbody_update(std::span<Body> bodies, std::span<const Vec3f> acc, std::size_t begin,
                  std::size_t len, float dt, std::uint32_t workers) {
  const BodyView vb{bodies.data()};
  const ArrayView<Vec3f> va{const_cast<Vec3f*>(acc.data())};
#pragma omp parallel for schedule(static)
  for (std::int64_t w = 0; w < workers; ++w) {
    const auto p = partition_even(len, workers, static_cast<std::uint32_t>(w));
    kernel::nbody_update_range(vb, va, begin + p.start, begin + p.end(), begin, dt);
  }
}

}  // namespace andromeda::parallel
