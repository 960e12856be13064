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

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "andromeda/config.hpp"
#include "andromeda/csv.hpp"
#include "andromeda/kernels.hpp"

namespace andromeda {

enum class BenchmarkId { Stream, Matmul, NBody };

BenchmarkId parse_benchmark_id(std::string_view name);

struct BenchmarkSpec {
  BenchmarkId id = BenchmarkId::Stream;
  // STREAM
  std::uint64_t stream_n = 128000;
  StreamKernel stream_kernel = StreamKernel::Copy;
  std::uint32_t stream_reps = 10;
  double q = 3.0;
  // Matmul
  std::uint32_t mm_n = 128, mm_k = 128, mm_m = 128;
  // N-body
  std::uint32_t bodies = 4096;
  std::uint32_t steps = 10;

  std::uint64_t seed = 1;

  /// Benchmark column text, e.g. "matmul:n=128:k=128:m=128".
  std::string label() const;
};

struct ExperimentSpec {
  std::string config_id = "BASE";
  SystemConfig config;
  BenchmarkSpec benchmark;
  std::vector<Arrangement> arrangements;
};

enum class ErrorClass { Validation, Verification, Deadlock, Io, Other };

/// Failure of one experiment, classified for the CLI's exit codes.
class ExperimentError : public std::runtime_error {
 public:
  ExperimentError(ErrorClass cls, const std::string& what) : std::runtime_error(what), cls_(cls) {}
  ErrorClass error_class() const { return cls_; }

 private:
  ErrorClass cls_;
};

/// Classifies any exception thrown by the library.
ErrorClass classify(const std::exception& e);

/// One row per arrangement, in the given order. speedup_vs_single is filled
/// when the list contains the single-core arrangement (1,1).
std::vector<ResultRow> run_experiment(const ExperimentSpec& spec);

struct SweepAxis {
  std::string key;  // any config key, e.g. "n_ways" or "cache.n_ways"
  std::vector<std::string> values;
};

struct SweepSpec {
  ExperimentSpec base;
  std::vector<SweepAxis> axes;  // first axis varies slowest
  unsigned jobs = 1;
};

struct SweepResult {
  std::vector<ResultRow> rows;
  std::vector<std::string> diagnostics;  // skipped points
};

/// Runs the Cartesian product of the axes. Points whose configuration or
/// arrangements do not validate are skipped with a diagnostic. With an empty
/// arrangement list each point runs on its full machine (all nodes, all
/// cores). Speedups are relative to the (1,1) row of the same benchmark and
/// same non-geometry settings.
SweepResult sweep(const SweepSpec& spec);

struct SaturationPoint {
  std::string config_id;
  std::string benchmark;
  std::optional<std::uint32_t> cores;  // none: no saturation observed
};

struct Crossover {
  std::string smp_config;
  Arrangement smp_arrangement;
  std::string noc_config;
  Arrangement noc_arrangement;
  std::optional<double> bodies;  // none: distributed never wins
  bool upper_bound = false;      // distributed already wins at the smallest size
};

struct FlopsRow {
  std::string config_id;
  std::string benchmark;
  Arrangement arrangement;
  double flops_per_cycle = 0.0;
};

struct AnalysisReport {
  std::vector<ResultRow> speedups;  // rows with a speedup value
  std::vector<SaturationPoint> saturation;
  std::vector<Crossover> crossovers;
  std::vector<FlopsRow> flops;

  std::string to_text() const;
};

class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Derived metrics of one sweep's rows. Saturation: smallest core count whose
/// speedup gain over the previous count is below 10%. Crossover: body count
/// where distributed (nodes > 1) cycles first undercut SMP cycles at equal
/// total cores, linearly interpolated.
AnalysisReport analyze(const std::vector<ResultRow>& rows);

/// Value of `key` in a benchmark label ("nbody:n=2048:steps=10", "n").
std::optional<std::uint64_t> label_param(const std::string& label, const std::string& key);
std::string label_kind(const std::string& label);

}  // namespace andromeda
