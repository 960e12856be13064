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
#include <cstddef>
#include <random>
#include <tuple>

#include "andromeda/benchmarks.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace andromeda;

namespace {

using Logged = std::tuple<std::uint64_t, AccessKind, std::uint8_t>;
using Log = std::vector<Logged>;

// Views that perform the real operation and record the address the simulated
// core would touch for it.
template <typename T>
struct LoggedArray {
  T* data;
  std::uint64_t base;
  Log* log;
  T get(std::size_t i) const {
    log->emplace_back(base + i * sizeof(T), AccessKind::Read, sizeof(T));
    return data[i];
  }
  void set(std::size_t i, T v) const {
    log->emplace_back(base + i * sizeof(T), AccessKind::Write, sizeof(T));
    data[i] = v;
  }
};

struct LoggedVec3 {
  Vec3f* data;
  std::uint64_t base;
  Log* log;
  void words(std::size_t i, AccessKind k) const {
    for (std::uint64_t w = 0; w < 3; ++w) log->emplace_back(base + i * sizeof(Vec3f) + 4 * w, k, 4);
  }
  Vec3f get(std::size_t i) const {
    words(i, AccessKind::Read);
    return data[i];
  }
  void set(std::size_t i, Vec3f v) const {
    words(i, AccessKind::Write);
    data[i] = v;
  }
};

struct LoggedBodies {
  Body* data;
  std::uint64_t base;
  Log* log;
  float rd(std::size_t i, std::size_t off, float v) const {
    log->emplace_back(base + i * sizeof(Body) + off, AccessKind::Read, 4);
    return v;
  }
  void wr(std::size_t i, std::size_t off) const {
    log->emplace_back(base + i * sizeof(Body) + off, AccessKind::Write, 4);
  }
  float x(std::size_t i) const { return rd(i, offsetof(Body, x), data[i].x); }
  float y(std::size_t i) const { return rd(i, offsetof(Body, y), data[i].y); }
  float z(std::size_t i) const { return rd(i, offsetof(Body, z), data[i].z); }
  float vx(std::size_t i) const { return rd(i, offsetof(Body, vx), data[i].vx); }
  float vy(std::size_t i) const { return rd(i, offsetof(Body, vy), data[i].vy); }
  float vz(std::size_t i) const { return rd(i, offsetof(Body, vz), data[i].vz); }
  float m(std::size_t i) const { return rd(i, offsetof(Body, m), data[i].m); }
  void set_velocity(std::size_t i, float vx, float vy, float vz) const {
    wr(i, offsetof(Body, vx));
    wr(i, offsetof(Body, vy));
    wr(i, offsetof(Body, vz));
    data[i].vx = vx;
    data[i].vy = vy;
    data[i].vz = vz;
  }
  void set_position(std::size_t i, float x, float y, float z) const {
    wr(i, offsetof(Body, x));
    wr(i, offsetof(Body, y));
    wr(i, offsetof(Body, z));
    data[i].x = x;
    data[i].y = y;
    data[i].z = z;
  }
};

Log accesses_of(TraceProducer p) {
  Log out;
  for (const auto& s : collect(std::move(p))) {
    if (s.kind == StepKind::Access) out.emplace_back(s.value, s.access, s.bytes);
  }
  return out;
}

bool same_multiset(Log a, Log b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

// Scalar that counts the arithmetic done on it.
struct Counting {
  static inline int add = 0, mul = 0, div = 0, root = 0;
  float v = 0;
  Counting() = default;
  Counting(float x) : v(x) {}  // NOLINT
  friend Counting operator+(Counting a, Counting b) { return ++add, Counting(a.v + b.v); }
  friend Counting operator-(Counting a, Counting b) { return ++add, Counting(a.v - b.v); }
  friend Counting operator*(Counting a, Counting b) { return ++mul, Counting(a.v * b.v); }
  friend Counting operator/(Counting a, Counting b) { return ++div, Counting(a.v / b.v); }
  Counting& operator+=(Counting b) { return ++add, v += b.v, *this; }
  friend bool operator==(Counting a, Counting b) { return a.v == b.v; }
  friend Counting sqrt(Counting a) { return ++root, Counting(std::sqrt(a.v)); }
};

SystemConfig smp(std::uint32_t cores) {
  auto c = preset("BASE");
  c.cores_per_node = cores;
  return c;
}

std::vector<double> randoms(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST_CASE("stream: eight elements on one core") {
  StreamParams p;
  p.n = 8;
  p.reps = 1;
  const auto r = stream_run(smp(1), {1, 1}, p);
  for (double x : r.a) CHECK(x == 5.0);  // b + 3c with b = 2, c = 1
}

TEST_CASE("stream: simulated result matches the oracle") {
  for (const Arrangement arr : {Arrangement{1, 1}, Arrangement{1, 4}, Arrangement{4, 2}}) {
    auto cfg = preset("NOC_SW_C");
    StreamParams p;
    p.n = 1000;
    p.reps = 2;
    p.seed = 5;
    p.q = 0.75;
    const auto r = stream_run(cfg, arr, p);
    CHECK(r.a == oracle::stream_a(r.b, r.c, p.q, p.reps));
    for (const auto k : kStreamKernels) {
      const auto i = static_cast<std::size_t>(k);
      CHECK(r.bandwidth[i] ==
            doctest::Approx(double(stream_counted_bytes(k) * p.n) / r.best_cycles[i]));
    }
  }
}

TEST_CASE("stream: counted bytes") {
  CHECK(stream_counted_bytes(StreamKernel::Copy) == 16);
  CHECK(stream_counted_bytes(StreamKernel::Scale) == 16);
  CHECK(stream_counted_bytes(StreamKernel::Add) == 24);
  CHECK(stream_counted_bytes(StreamKernel::Triad) == 24);
}

TEST_CASE("matmul: identity A reproduces B") {
  const auto in = make_matmul_input(16, 16, 8, 3, true);
  const auto r = matmul_run(smp(4), {1, 4}, in);
  for (std::size_t i = 0; i < 16; ++i) {
    for (std::size_t j = 0; j < 8; ++j) CHECK(r.c[i * 8 + j] == in.b[j * 16 + i]);
  }
}

TEST_CASE("matmul: matches the oracle bitwise") {
  for (const Arrangement arr : {Arrangement{1, 1}, Arrangement{1, 3}, Arrangement{4, 4}}) {
    const auto in = make_matmul_input(13, 7, 5, 11, false);
    const auto r = matmul_run(preset("NOC_SW_C"), arr, in);
    CHECK(r.c == oracle::matmul(in.a, in.b, 13, 7, 5));
  }
}

TEST_CASE("nbody: two unit masses one apart") {
  std::vector<Body> b = {{0, 0, 0, 0, 0, 0, 1}, {1, 0, 0, 0, 0, 0, 1}};
  const auto f = reference::nbody_forces(b, 1.0f);
  CHECK(f[0] == Vec3f{1, 0, 0});
  CHECK(f[1] == Vec3f{-1, 0, 0});
}

TEST_CASE("nbody: pair forces are antisymmetric") {
  const auto bodies = make_bodies(2, 77);
  const auto f = reference::nbody_forces(bodies, 1.0f);
  CHECK(f[0].x == -f[1].x);
  CHECK(f[0].y == -f[1].y);
  CHECK(f[0].z == -f[1].z);
}

TEST_CASE("nbody: single precision agrees with a double oracle") {
  auto bodies = make_bodies(4, 8);
  auto wide = oracle::widen(bodies);
  reference::nbody_step(bodies, 1.0f, 0.01f);
  oracle::nbody_step_double(wide, 1.0, 0.01);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(bodies[i].x == doctest::Approx(wide[i].x).epsilon(1e-5));
    CHECK(bodies[i].vy == doctest::Approx(wide[i].vy).epsilon(1e-5).scale(1e-3));
  }
}

TEST_CASE("nbody: 19 operations per pair") {
  Counting fx, fy, fz;
  kernel::accumulate_pair<Counting>(0.f, 0.f, 0.f, 1.f, 1.f, 2.f, 3.f, 1.f, 1.f, fx, fy, fz);
  CHECK(Counting::add == 8);
  CHECK(Counting::mul == 9);
  CHECK(Counting::div == 1);
  CHECK(Counting::root == 1);
  CHECK(Counting::add + Counting::mul + Counting::div + Counting::root == kPairFlops);

  const auto t = TimingParams{};
  CHECK(nbody_pair_cycles(t) == 8 * t.fp_add_cycles + 9 * t.fp_mul_cycles + t.fp_div_cycles +
                                    t.fp_sqrt_cycles);
}

TEST_CASE("nbody: energy drift stays small") {
  auto bodies = make_bodies(32, 4);
  const double e0 = oracle::nbody_energy(bodies, 1.0);
  reference::nbody_run(bodies, 10, 1.0f, 1e-4f);
  const double e1 = oracle::nbody_energy(bodies, 1.0);
  CHECK(std::abs(e1 - e0) < 0.01 * std::abs(e0));
}

TEST_CASE("nbody: zero steps leave the bodies untouched") {
  const auto bodies = make_bodies(16, 2);
  NBodyParams p;
  p.steps = 0;
  CHECK(nbody_run(smp(2), {1, 2}, bodies, p).bodies == bodies);
}

TEST_CASE("nbody: coincident bodies are an error") {
  std::vector<Body> b = {{0, 0, 0, 0, 0, 0, 1}, {0, 0, 0, 0, 0, 0, 1}};
  CHECK_THROWS_AS(reference::nbody_forces(b, 1.0f), SingularityError);
}

TEST_CASE("nbody: simulated run matches the oracle bitwise") {
  for (const Arrangement arr : {Arrangement{1, 1}, Arrangement{1, 4}, Arrangement{4, 2}}) {
    auto bodies = make_bodies(23, 6);
    NBodyParams p;
    p.steps = 2;
    const auto r = nbody_run(preset("NOC_SW_C"), arr, bodies, p);
    for (std::uint32_t s = 0; s < p.steps; ++s) oracle::nbody_step(bodies, p.g, p.dt);
    CHECK(r.bodies == bodies);
  }
}

TEST_CASE("traces touch exactly the addresses the kernels touch") {
  const TimingParams t;
  SUBCASE("stream") {
    const StreamLayout l{0, 8000, 16000};
    auto a = randoms(1000, 1), b = randoms(1000, 2), c = randoms(1000, 3);
    for (const auto k : kStreamKernels) {
      Log log;
      kernel::stream_range(k, LoggedArray<double>{a.data(), l.a, &log},
                           LoggedArray<double>{b.data(), l.b, &log},
                           LoggedArray<double>{c.data(), l.c, &log}, 2.0, 100, 357);
      CHECK(same_multiset(log, accesses_of(stream_kernel_trace(k, l, 100, 357, t))));
    }
  }
  SUBCASE("matmul") {
    const std::size_t n = 6, k = 5, m = 4;
    auto a = randoms(n * k, 4), b = randoms(k * m, 5);
    std::vector<double> c(n * m);
    const MatmulLayout l{64, 4096, 8192};
    Log log;
    kernel::matmul_rows(LoggedArray<double>{a.data(), l.a, &log},
                        LoggedArray<double>{b.data(), l.b, &log},
                        LoggedArray<double>{c.data(), l.c, &log}, 2, 5, k, m);
    CHECK(same_multiset(log, accesses_of(matmul_rows_trace(l, 2, 5, k, m, t))));
  }
  SUBCASE("nbody") {
    auto bodies = make_bodies(12, 9);
    std::vector<Vec3f> acc(5);
    const NBodyLayout l{128, 4096};
    Log forces;
    kernel::nbody_forces_range(LoggedBodies{bodies.data(), l.bodies, &forces},
                               LoggedVec3{acc.data(), l.acc, &forces}, 12, 4, 9, 4, 1.0f);
    CHECK(same_multiset(forces, accesses_of(nbody_forces_trace(l, 12, 4, 9, 4, t))));
    Log update;
    kernel::nbody_update_range(LoggedBodies{bodies.data(), l.bodies, &update},
                               LoggedVec3{acc.data(), l.acc, &update}, 4, 9, 4, 0.01f);
    CHECK(same_multiset(update, accesses_of(nbody_update_trace(l, 4, 9, 4, t))));
  }
}

TEST_CASE("parallel kernels equal the serial reference bitwise") {
  for (const std::uint32_t workers : {1u, 3u, 8u}) {
    const auto b = randoms(1001, 6), c = randoms(1001, 7);
    for (const auto k : kStreamKernels) {
      std::vector<double> a1(1001), a2(1001);
      reference::stream(k, a1, b, c, 1.5);
      parallel::stream(k, a2, b, c, 1.5, workers);
      CHECK(a1 == a2);
    }

    const auto in = make_matmul_input(17, 9, 11, 2);
    std::vector<double> cm(17 * 11);
    parallel::matmul_rows(in.a, in.b, cm, 17, 9, 11, workers);
    CHECK(cm == reference::matmul(in.a, in.b, 17, 9, 11));

    auto bodies = make_bodies(37, 3);
    auto ref = bodies;
    std::vector<Vec3f> acc(37);
    parallel::nbody_forces(bodies, acc, 0, 37, 1.0f, workers);
    CHECK(acc == reference::nbody_forces(ref, 1.0f));
    parallel::nbody_update(bodies, acc, 0, 37, 0.01f, workers);
    reference::nbody_step(ref, 1.0f, 0.01f);
    CHECK(bodies == ref);
  }
}
