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

#include <numeric>
#include <random>

#include "andromeda/config.hpp"
#include "doctest.h"

using namespace andromeda;

namespace {

ConfigErrorKind parse_error_kind(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.kind();
  }
  FAIL("expected a ConfigError");
  return ConfigErrorKind::Syntax;
}

}  // namespace

TEST_CASE("config: document naming BASE") {
  const auto cfg = parse_config("[system]\npreset = BASE\n");
  CHECK(cfg.cache.n_sets == 64);
  CHECK(cfg.cache.n_ways == 4);
  CHECK(cfg.cache.total_bytes() == 16 * 1024);
}

TEST_CASE("config: n_ways=3 is rejected") {
  try {
    parse_config("[cache]\nn_ways = 3\n");
    FAIL("accepted a non power of two");
  } catch (const ConfigError& e) {
    CHECK(e.kind() == ConfigErrorKind::OutOfRange);
    CHECK(std::string(e.what()).find("not a power of two") != std::string::npos);
    CHECK(e.line() == 2);
  }
}

TEST_CASE("config: empty document is BASE with one core") {
  const auto cfg = parse_config("");
  CHECK(cfg == preset("BASE"));
  CHECK(cfg.nodes() == 1);
  CHECK(cfg.cores_per_node == 1);
}

TEST_CASE("config: error kinds are distinct") {
  CHECK(parse_error_kind("[system]\nwidgets = 4\n") == ConfigErrorKind::UnknownKey);
  CHECK(parse_error_kind("[system]\ncores_per_node\n") == ConfigErrorKind::Syntax);
  CHECK(parse_error_kind("[system\n") == ConfigErrorKind::Syntax);
  CHECK(parse_error_kind("[timing]\ncache_hit_cycles = 0\n") == ConfigErrorKind::OutOfRange);
  CHECK(parse_error_kind("[system]\npreset = NOPE\n") == ConfigErrorKind::UnknownPreset);
}

TEST_CASE("config: syntax errors carry a position") {
  try {
    parse_config("# header\n[cache]\n  n_sets 64\n");
    FAIL("accepted a line without '='");
  } catch (const ConfigError& e) {
    CHECK(e.kind() == ConfigErrorKind::Syntax);
    CHECK(e.line() == 3);
    CHECK(e.column() > 0);
  }
}

TEST_CASE("config: cache presets") {
  const auto c16 = preset("C-64-16");
  CHECK(c16.cache.n_sets == 64);
  CHECK(c16.cache.n_ways == 16);
  CHECK(c16.cache.total_bytes() == 64 * 1024);
  const auto c8 = preset("C-64-8");
  CHECK(c8.cache.n_ways == 8);
  CHECK(c8.cache.total_bytes() == 32 * 1024);
  CHECK(preset("BASE32").cores_per_node == 32);

  // Line size implied by each capacity: size / (sets × ways).
  for (const auto& [size, ways] : {std::pair{16384u, 4u}, {32768u, 8u}, {65536u, 16u}}) {
    CHECK(size / (64 * ways) == 64);
  }
  for (const char* name : {"BASE", "BASE32", "C-64-8", "C-64-16"}) {
    const auto c = preset(name);
    CHECK(c.cache.total_bytes() / (c.cache.n_sets * c.cache.n_ways) == 64);
  }
}

TEST_CASE("config: NoC presets") {
  const auto c = preset("NOC_SW_C");
  CHECK(c.nodes() == 16);
  CHECK(c.cores_per_node == 4);
  CHECK(c.router_kind == RouterKind::HardwareSwitch);
  CHECK(c.flow_control == FlowControl::CutThrough);
  CHECK(preset("NOC_SW").flow_control == FlowControl::StoreAndForward);
  CHECK(preset("NOC_BASE").router_kind == RouterKind::SoftwareCore);

  for (const char* name : {"NOC_BASE", "NOC_SW", "NOC_SW_C"}) {
    const auto p = preset(name);
    REQUIRE(p.node_mem_bytes.size() == 16);
    CHECK(p.node_mem_bytes[0] == 2u << 20);
    for (std::size_t n = 1; n < 16; ++n) CHECK(p.node_mem_bytes[n] == 256u << 10);
  }
  const auto& mem = preset("NOC_BASE").node_mem_bytes;
  const auto total = std::accumulate(mem.begin(), mem.end(), std::uint64_t{0});
  CHECK(total == 15 * (256u << 10) + (2u << 20));
  CHECK(static_cast<double>(total) / (1 << 20) == doctest::Approx(5.75));
}

TEST_CASE("config: unknown preset") {
  CHECK_THROWS_AS(preset("NOC_XL"), ConfigError);
}

TEST_CASE("config: every preset validates") {
  for (const auto& name : preset_names()) {
    INFO(name);
    CHECK(validate(preset(name)).ok());
  }
}

TEST_CASE("config: validation reports") {
  auto bad_line = preset("BASE");
  bad_line.cache.line_bytes = 0;
  const auto r1 = validate(bad_line);
  CHECK(r1.violations.size() == 1);

  auto mesh = preset("NOC_SW");
  mesh.node_mem_bytes.resize(15);
  const auto r2 = validate(mesh);
  REQUIRE_FALSE(r2.ok());
  bool found = false;
  for (const auto& v : r2.violations) found |= v.message.rfind("node memory map incomplete", 0) == 0;
  CHECK(found);

  auto small = preset("BASE");
  small.node_mem_bytes = {small.cache.total_bytes() * 4 - 1};
  CHECK_FALSE(validate(small).ok());
  small.node_mem_bytes = {small.cache.total_bytes() * 4};
  CHECK(validate(small).ok());
}

TEST_CASE("config: arrangements") {
  CHECK(parse_arrangement("(4,4)") == Arrangement{4, 4});
  CHECK(parse_arrangement("( 16 , 1 )") == Arrangement{16, 1});
  CHECK(parse_arrangement("4x2") == Arrangement{4, 2});
  CHECK(Arrangement{4, 4}.to_string() == "(4,4)");
  const auto list = parse_arrangements("(1,1),(4,4), 16x4");
  REQUIRE(list.size() == 3);
  CHECK(list[2] == Arrangement{16, 4});
  CHECK_THROWS_AS(parse_arrangement("(0,4)"), ConfigError);

  const auto noc = preset("NOC_SW_C");
  CHECK(validate(noc, {16, 4}).ok());
  CHECK(validate(noc, {4, 2}).ok());
  CHECK_FALSE(validate(noc, {17, 1}).ok());
  CHECK_FALSE(validate(noc, {1, 5}).ok());
}

TEST_CASE("config: keys and aliases") {
  CHECK(canonical_key("n_ways") == "cache.n_ways");
  CHECK(canonical_key("cache.n_ways") == "cache.n_ways");
  CHECK(canonical_key("cores") == "system.cores_per_node");
  auto c = preset("BASE");
  apply_setting(c, "cores", "4");
  CHECK(c.cores_per_node == 4);
  apply_setting(c, "timing.fp_div_cycles", "25");
  CHECK(c.timing.fp_div_cycles == 25);
  CHECK_THROWS_AS(apply_setting(c, "flux", "1"), ConfigError);
}

TEST_CASE("config: memory sizes accept binary suffixes") {
  const auto c = parse_config("[system]\nnode_mem_bytes = 4MiB\n");
  REQUIRE(c.node_mem_bytes.size() == 1);
  CHECK(c.node_mem_bytes[0] == 4u << 20);
}

TEST_CASE("config: mmu key is accepted and has no effect") {
  const auto c = parse_config("[system]\nmmu = sv39\n");
  auto base = preset("BASE");
  base.mmu = "sv39";
  CHECK(c == base);
}

TEST_CASE("config: parse(serialize(cfg)) == cfg") {
  for (const auto& name : preset_names()) {
    INFO(name);
    const auto c = preset(name);
    CHECK(parse_config(serialize(c)) == c);
  }

  std::mt19937_64 rng(7);
  auto pick = [&](std::initializer_list<std::uint32_t> xs) {
    std::vector<std::uint32_t> v(xs);
    return v[rng() % v.size()];
  };
  for (int trial = 0; trial < 200; ++trial) {
    SystemConfig c;
    c.mesh_x = pick({1, 2, 4});
    c.mesh_y = pick({1, 2, 4});
    c.cores_per_node = pick({1, 2, 3, 8});
    c.router_kind = rng() % 2 ? RouterKind::SoftwareCore : RouterKind::HardwareSwitch;
    c.flow_control = rng() % 2 ? FlowControl::CutThrough : FlowControl::StoreAndForward;
    c.cache = {pick({16, 64, 128}), pick({1, 2, 4, 16}), pick({16, 32, 64})};
    c.coherence_enabled = rng() % 2;
    c.node_mem_bytes.clear();
    for (std::uint32_t n = 0; n < c.nodes(); ++n) {
      c.node_mem_bytes.push_back((1u << 20) + 4096 * (rng() % 64));
    }
    c.timing.cache_hit_cycles = 1 + rng() % 5;
    c.timing.barrier_base_cycles = rng() % 40;
    c.timing.fp_sqrt_cycles = 1 + rng() % 40;
    REQUIRE(validate(c).ok());
    CHECK(parse_config(serialize(c)) == c);
  }
}
