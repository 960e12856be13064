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

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace andromeda {

using Cycle = std::uint64_t;
using NodeId = std::uint32_t;
using CoreId = std::uint32_t;

enum class RouterKind { SoftwareCore, HardwareSwitch };
enum class FlowControl { StoreAndForward, CutThrough };

std::string_view to_string(RouterKind kind);
std::string_view to_string(FlowControl fc);

/// Geometry of one private L1 data cache.
struct CacheConfig {
  std::uint32_t n_sets = 64;
  std::uint32_t n_ways = 4;
  std::uint32_t line_bytes = 64;

  std::uint64_t total_bytes() const {
    return std::uint64_t{n_sets} * n_ways * line_bytes;
  }
  bool operator==(const CacheConfig&) const = default;
};

/// Calibration constants of the timing model. All values are cycles unless
/// the name says otherwise. The defaults are the calibrated set; see
/// nominal_timing() for the starting point they were tuned from.
struct TimingParams {
  Cycle cache_hit_cycles = 3;
  Cycle bus_addr_overhead_cycles = 5;
  std::uint32_t bus_bytes_per_cycle = 8;
  std::uint32_t link_flit_bytes = 8;
  Cycle hw_router_delay_cycles = 2;
  Cycle sw_router_cycles_per_flit = 20;
  Cycle fp_add_cycles = 2;
  Cycle fp_mul_cycles = 2;
  Cycle fp_div_cycles = 20;
  Cycle fp_sqrt_cycles = 20;
  Cycle int_op_cycles = 1;
  Cycle barrier_base_cycles = 20;
  Cycle barrier_per_core_cycles = 4;
  // Width of one access to the memory-mapped network FIFO.
  std::uint32_t nic_word_bytes = 4;

  bool operator==(const TimingParams&) const = default;
};

/// Pre-calibration constants (hit 2, bus overhead 4, fp add/mul 4).
/// Every calibrated default stays within 50% of these.
TimingParams nominal_timing();

/// One explorable point of the system design space.
struct SystemConfig {
  std::uint32_t mesh_x = 1;
  std::uint32_t mesh_y = 1;
  std::uint32_t cores_per_node = 1;
  RouterKind router_kind = RouterKind::HardwareSwitch;
  FlowControl flow_control = FlowControl::StoreAndForward;
  CacheConfig cache;
  std::vector<std::uint64_t> node_mem_bytes{16u << 20};
  bool coherence_enabled = true;
  TimingParams timing;
  // Accepted for schema compatibility; the timing model has no MMU.
  std::string mmu = "none";

  std::uint32_t nodes() const { return mesh_x * mesh_y; }
  std::uint32_t total_cores() const { return nodes() * cores_per_node; }
  bool operator==(const SystemConfig&) const = default;
};

/// A (nodes, cores-per-node) slice of a configuration that a benchmark
/// actually runs on.
struct Arrangement {
  std::uint32_t nodes = 1;
  std::uint32_t cores_per_node = 1;

  std::uint32_t total_cores() const { return nodes * cores_per_node; }
  std::string to_string() const;
  bool operator==(const Arrangement&) const = default;
};

/// Parses "(4,4)", "(4, 4)" or "4x4".
Arrangement parse_arrangement(std::string_view text);
/// Parses a list such as "(1,1),(4,4)" or "1x1,4x4".
std::vector<Arrangement> parse_arrangements(std::string_view text);

enum class ConfigErrorKind { Syntax, UnknownKey, OutOfRange, UnknownPreset };

class ConfigError : public std::runtime_error {
 public:
  ConfigError(ConfigErrorKind kind, std::string message, std::size_t line = 0,
              std::size_t column = 0);

  ConfigErrorKind kind() const { return kind_; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  ConfigErrorKind kind_;
  std::size_t line_;
  std::size_t column_;
};

struct Violation {
  std::string key;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  std::string summary() const;
};

ValidationReport validate(const SystemConfig& cfg);
/// Checks that `arr` fits inside `cfg`.
ValidationReport validate(const SystemConfig& cfg, const Arrangement& arr);

const std::vector<std::string>& preset_names();
SystemConfig preset(std::string_view name);

/// Applies a single `key = value` setting. Keys may be section-qualified
/// ("cache.n_ways") or bare when unambiguous ("n_ways"); "cores" is an alias
/// of cores_per_node.
void apply_setting(SystemConfig& cfg, std::string_view key,
                   std::string_view value);

/// Canonical name ("section.key") for a user-supplied key.
std::string canonical_key(std::string_view key);

SystemConfig parse_config(std::string_view text);
std::string serialize(const SystemConfig& cfg);

}  // namespace andromeda
