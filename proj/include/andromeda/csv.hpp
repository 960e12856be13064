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
#include <string_view>
#include <vector>

#include "andromeda/config.hpp"

namespace andromeda {

/// One simulated (configuration, benchmark, arrangement) point.
struct ResultRow {
  std::string config_id;
  std::string benchmark;  // id plus parameters, e.g. "nbody:n=2048:steps=10"
  Arrangement arrangement;
  Cycle cycles = 0;
  std::optional<double> bandwidth_bytes_per_cycle;  // STREAM only
  std::optional<double> speedup_vs_single;
  double cache_hit_rate = 0.0;
  double bus_utilization = 0.0;
  std::uint64_t flit_hops = 0;
  std::uint64_t packets = 0;

  bool operator==(const ResultRow&) const = default;
};

inline constexpr const char* kCsvHeader =
    "config_id,benchmark,arrangement,cycles,bandwidth_bytes_per_cycle,speedup_vs_single,"
    "cache_hit_rate,bus_utilization,flit_hops,packets";

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);

std::string to_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> parse_csv(std::string_view text);

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path);
std::vector<ResultRow> read_csv(const std::string& path);

}  // namespace andromeda
