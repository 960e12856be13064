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

#include "andromeda/config.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <functional>
#include <sstream>

namespace andromeda {

namespace {

constexpr std::uint64_t kKiB = 1024;
constexpr std::uint64_t kMiB = 1024 * 1024;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

ConfigError range_error(std::string_view key, std::string message) {
  return ConfigError(ConfigErrorKind::OutOfRange,
                     std::string(key) + ": " + std::move(message));
}

std::uint64_t parse_u64(std::string_view key, std::string_view text) {
  text = trim(text);
  std::uint64_t scale = 1;
  if (text.ends_with("KiB")) {
    scale = kKiB;
    text = trim(text.substr(0, text.size() - 3));
  } else if (text.ends_with("MiB")) {
    scale = kMiB;
    text = trim(text.substr(0, text.size() - 3));
  }
  std::uint64_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc{} || ptr != end) {
    throw range_error(key, "expected a non-negative integer, got '" +
                               std::string(text) + "'");
  }
  return value * scale;
}

std::uint64_t parse_at_least(std::string_view key, std::string_view text,
                             std::uint64_t min) {
  const auto v = parse_u64(key, text);
  if (v < min) {
    throw range_error(key, "value " + std::to_string(v) + " is below the minimum " +
                               std::to_string(min));
  }
  return v;
}

std::uint32_t parse_pow2(std::string_view key, std::string_view text,
                         std::uint32_t min) {
  const auto v = parse_at_least(key, text, min);
  if (!std::has_single_bit(v) || v > (1u << 30)) {
    throw range_error(key, std::to_string(v) + " is not a power of two");
  }
  return static_cast<std::uint32_t>(v);
}

bool parse_bool(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "on" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "off" || text == "0" || text == "no") return false;
  throw range_error(key, "expected a boolean, got '" + std::string(text) + "'");
}

void resize_node_memory(SystemConfig& cfg) {
  const auto n = cfg.nodes();
  if (cfg.node_mem_bytes.empty()) cfg.node_mem_bytes.push_back(16 * kMiB);
  cfg.node_mem_bytes.resize(n, cfg.node_mem_bytes.back());
}

struct KeySpec {
  std::string_view section;
  std::string_view name;
  std::function<void(SystemConfig&, std::string_view, std::string_view)> set;
  std::function<std::string(const SystemConfig&)> get;
};

template <typename T>
KeySpec timing_key(std::string_view name, T TimingParams::*field, std::uint64_t min) {
  return KeySpec{
      "timing", name,
      [field, min](SystemConfig& c, std::string_view k, std::string_view v) {
        c.timing.*field = static_cast<T>(parse_at_least(k, v, min));
      },
      [field](const SystemConfig& c) { return std::to_string(c.timing.*field); }};
}

const std::vector<KeySpec>& key_table() {
  static const std::vector<KeySpec> table = [] {
    std::vector<KeySpec> t;
    t.push_back({"system", "mesh_x",
                 [](SystemConfig& c, std::string_view k, std::string_view v) {
                   c.mesh_x = static_cast<std::uint32_t>(parse_at_least(k, v, 1));
                   if (c.mesh_x > 64) throw range_error(k, "mesh dimension above 64");
                   resize_node_memory(c);
                 },
                 [](const SystemConfig& c) { return std::to_string(c.mesh_x); }});
    t.push_back({"system", "mesh_y",
                 [](SystemConfig& c, std::string_view k, std::string_view v) {
                   c.mesh_y = static_cast<std::uint32_t>(parse_at_least(k, v, 1));
                   if (c.mesh_y > 64) throw range_error(k, "mesh dimension above 64");
                   resize_node_memory(c);
                 },
                 [](const SystemConfig& c) { return std::to_string(c.mesh_y); }});
    t.push_back({"system", "cores_per_node",
                 [](SystemConfig& c, std::string_view k, std::string_view v) {
                   const auto n = parse_at_least(k, v, 1);
                   if (n > 64) throw range_error(k, "at most 64 cores per node");
                   c.cores_per_node = static_cast<std::uint32_t>(n);
                 },
                 [](const SystemConfig& c) { return std::to_string(c.cores_per_node); }});
    t.push_back({"system", "coherence",
                 [](SystemConfig& c, std::string_view k, std::string_view v) {
                   c.coherence_enabled = parse_bool(k, v);
                 },
                 [](const SystemConfig& c) {
                   return std::string(c.coherence_enabled ? "true" : "false");
                 }});
    t.push_back({"system", "node_mem_bytes",
                 [](SystemConfig& c, std::string_view k, std::string_view v) {
                   std::vector<std::uint64_t> sizes;
                   std::size_t pos = 0;
                   while (pos <= v.size()) {
                     const auto comma = v.find(',', pos);
                     const auto item = v.substr(pos, comma == std::string_view::npos
                                                         ? std::string_view::npos
                                                         : comma - pos);
                     sizes.push_back(parse_at_least(k, item, 1));
                     if (comma == std::string_view::npos) break;
                     pos = comma + 1;
                   }
                   if (sizes.size() == 1) sizes.resize(c.nodes(), sizes.front());
                   c.node_mem_bytes = std::move(sizes);
                 },
                 [](const SystemConfig& c) {
                   std::string out;
                   for (std::size_t i = 0; i < c.node_mem_bytes.size(); ++i) {
                     if (i) out += ",";
                     out += std::to_string(c.node_mem_bytes[i]);
                   }
                   return out;
                 }});
    t.push_back({"system", "mmu",
                 [](SystemConfig& c, std::string_view k, std::string_view v) {
                   v = trim(v);
                   if (v.empty() || v.find_first_of("#;,=[]") != std::string_view::npos) {
                     throw range_error(k, "expected an identifier");
                   }
                   c.mmu = std::string(v);
                 },
                 [](const SystemConfig& c) { return c.mmu; }});
    t.push_back({"cache", "n_sets",
                 [](SystemConfig& c, std::string_view k, std::string_view v) {
                   c.cache.n_sets = parse_pow2(k, v, 1);
                 },
                 [](const SystemConfig& c) { return std::to_string(c.cache.n_sets); }});
    t.push_back({"cache", "n_ways",
                 [](SystemConfig& c, std::string_view k, std::string_view v) {
                   c.cache.n_ways = parse_pow2(k, v, 1);
                 },
                 [](const SystemConfig& c) { return std::to_string(c.cache.n_ways); }});
    t.push_back({"cache", "line_bytes",
                 [](SystemConfig& c, std::string_view k, std::string_view v) {
                   c.cache.line_bytes = parse_pow2(k, v, 8);
                 },
                 [](const SystemConfig& c) { return std::to_string(c.cache.line_bytes); }});
    t.push_back({"noc", "router",
                 [](SystemConfig& c, std::string_view k, std::string_view v) {
                   v = trim(v);
                   if (v == "software") c.router_kind = RouterKind::SoftwareCore;
                   else if (v == "switch") c.router_kind = RouterKind::HardwareSwitch;
                   else throw range_error(k, "expected 'software' or 'switch'");
                 },
                 [](const SystemConfig& c) {
                   return std::string(c.router_kind == RouterKind::SoftwareCore ? "software"
                                                                                : "switch");
                 }});
    t.push_back({"noc", "flow_control",
                 [](SystemConfig& c, std::string_view k, std::string_view v) {
                   v = trim(v);
                   if (v == "store_and_forward") c.flow_control = FlowControl::StoreAndForward;
                   else if (v == "cut_through") c.flow_control = FlowControl::CutThrough;
                   else throw range_error(k, "expected 'store_and_forward' or 'cut_through'");
                 },
                 [](const SystemConfig& c) {
                   return std::string(c.flow_control == FlowControl::CutThrough
                                          ? "cut_through"
                                          : "store_and_forward");
                 }});
    using TP = TimingParams;
    t.push_back(timing_key("cache_hit_cycles", &TP::cache_hit_cycles, 1));
    t.push_back(timing_key("bus_addr_overhead_cycles", &TP::bus_addr_overhead_cycles, 1));
    t.push_back(timing_key("bus_bytes_per_cycle", &TP::bus_bytes_per_cycle, 1));
    t.push_back(timing_key("link_flit_bytes", &TP::link_flit_bytes, 1));
    t.push_back(timing_key("hw_router_delay_cycles", &TP::hw_router_delay_cycles, 1));
    t.push_back(timing_key("sw_router_cycles_per_flit", &TP::sw_router_cycles_per_flit, 1));
    t.push_back(timing_key("fp_add_cycles", &TP::fp_add_cycles, 1));
    t.push_back(timing_key("fp_mul_cycles", &TP::fp_mul_cycles, 1));
    t.push_back(timing_key("fp_div_cycles", &TP::fp_div_cycles, 1));
    t.push_back(timing_key("fp_sqrt_cycles", &TP::fp_sqrt_cycles, 1));
    t.push_back(timing_key("int_op_cycles", &TP::int_op_cycles, 1));
    t.push_back(timing_key("barrier_base_cycles", &TP::barrier_base_cycles, 0));
    t.push_back(timing_key("barrier_per_core_cycles", &TP::barrier_per_core_cycles, 1));
    t.push_back(timing_key("nic_word_bytes", &TP::nic_word_bytes, 1));
    return t;
  }();
  return table;
}

const KeySpec* find_key(std::string_view canonical) {
  for (const auto& k : key_table()) {
    if (canonical.size() == k.section.size() + 1 + k.name.size() &&
        canonical.starts_with(k.section) && canonical[k.section.size()] == '.' &&
        canonical.ends_with(k.name)) {
      return &k;
    }
  }
  return nullptr;
}

bool is_power_of_two(std::uint64_t v) { return std::has_single_bit(v); }

}  // namespace

std::string_view to_string(RouterKind kind) {
  return kind == RouterKind::SoftwareCore ? "SoftwareCore" : "HardwareSwitch";
}

std::string_view to_string(FlowControl fc) {
  return fc == FlowControl::CutThrough ? "CutThrough" : "StoreAndForward";
}

std::string Arrangement::to_string() const {
  return "(" + std::to_string(nodes) + "," + std::to_string(cores_per_node) + ")";
}

Arrangement parse_arrangement(std::string_view text) {
  text = trim(text);
  auto fail = [&] {
    return ConfigError(ConfigErrorKind::Syntax,
                       "malformed arrangement '" + std::string(text) + "'");
  };
  std::string_view body = text;
  char sep = 'x';
  if (body.starts_with('(')) {
    if (!body.ends_with(')')) throw fail();
    body = body.substr(1, body.size() - 2);
    sep = ',';
  }
  const auto split = body.find(sep);
  if (split == std::string_view::npos) throw fail();
  std::uint32_t parts[2] = {0, 0};
  std::string_view fields[2] = {trim(body.substr(0, split)), trim(body.substr(split + 1))};
  for (int i = 0; i < 2; ++i) {
    const auto* end = fields[i].data() + fields[i].size();
    const auto [ptr, ec] = std::from_chars(fields[i].data(), end, parts[i]);
    if (fields[i].empty() || ec != std::errc{} || ptr != end) throw fail();
  }
  if (parts[0] == 0 || parts[1] == 0) {
    throw ConfigError(ConfigErrorKind::OutOfRange,
                      "arrangement needs at least one node and one core");
  }
  return Arrangement{parts[0], parts[1]};
}

std::vector<Arrangement> parse_arrangements(std::string_view text) {
  std::vector<Arrangement> out;
  std::size_t pos = 0;
  text = trim(text);
  while (pos < text.size()) {
    if (text[pos] == ',' || text[pos] == ' ') {
      ++pos;
      continue;
    }
    std::size_t end;
    if (text[pos] == '(') {
      end = text.find(')', pos);
      if (end == std::string_view::npos) {
        throw ConfigError(ConfigErrorKind::Syntax, "unterminated arrangement");
      }
      ++end;
    } else {
      end = text.find(',', pos);
      if (end == std::string_view::npos) end = text.size();
    }
    out.push_back(parse_arrangement(text.substr(pos, end - pos)));
    pos = end;
  }
  return out;
}

ConfigError::ConfigError(ConfigErrorKind kind, std::string message, std::size_t line,
                         std::size_t column)
    : std::runtime_error(line ? "line " + std::to_string(line) + ", column " +
                                    std::to_string(column) + ": " + message
                              : message),
      kind_(kind),
      line_(line),
      column_(column) {}

std::string ValidationReport::summary() const {
  std::string out;
  for (const auto& v : violations) {
    if (!out.empty()) out += "; ";
    out += v.key + ": " + v.message;
  }
  return out;
}

ValidationReport validate(const SystemConfig& cfg) {
  ValidationReport r;
  auto add = [&](std::string key, std::string msg) {
    r.violations.push_back({std::move(key), std::move(msg)});
  };
  const auto& c = cfg.cache;
  if (!is_power_of_two(c.n_sets)) add("cache.n_sets", "not a power of two");
  if (!is_power_of_two(c.n_ways)) add("cache.n_ways", "not a power of two");
  if (!is_power_of_two(c.line_bytes) || c.line_bytes < 8) {
    add("cache.line_bytes", "must be a power of two of at least 8");
  }
  if (cfg.mesh_x == 0 || cfg.mesh_y == 0) add("system.mesh", "mesh dimensions must be >= 1");
  if (cfg.cores_per_node == 0 || cfg.cores_per_node > 64) {
    add("system.cores_per_node", "must be in 1..64");
  }
  const auto& t = cfg.timing;
  const std::array<std::pair<const char*, std::uint64_t>, 13> positive = {{
      {"timing.cache_hit_cycles", t.cache_hit_cycles},
      {"timing.bus_addr_overhead_cycles", t.bus_addr_overhead_cycles},
      {"timing.bus_bytes_per_cycle", t.bus_bytes_per_cycle},
      {"timing.link_flit_bytes", t.link_flit_bytes},
      {"timing.hw_router_delay_cycles", t.hw_router_delay_cycles},
      {"timing.sw_router_cycles_per_flit", t.sw_router_cycles_per_flit},
      {"timing.fp_add_cycles", t.fp_add_cycles},
      {"timing.fp_mul_cycles", t.fp_mul_cycles},
      {"timing.fp_div_cycles", t.fp_div_cycles},
      {"timing.fp_sqrt_cycles", t.fp_sqrt_cycles},
      {"timing.int_op_cycles", t.int_op_cycles},
      {"timing.barrier_per_core_cycles", t.barrier_per_core_cycles},
      {"timing.nic_word_bytes", t.nic_word_bytes},
  }};
  for (const auto& [key, value] : positive) {
    if (value < 1) add(key, "must be >= 1");
  }
  if (cfg.node_mem_bytes.size() != cfg.nodes()) {
    add("system.node_mem_bytes", "node memory map incomplete: " +
                                     std::to_string(cfg.node_mem_bytes.size()) +
                                     " entries for " + std::to_string(cfg.nodes()) +
                                     " nodes");
  }
  const auto floor = 4 * c.total_bytes();
  for (std::size_t n = 0; n < cfg.node_mem_bytes.size(); ++n) {
    if (cfg.node_mem_bytes[n] < floor) {
      add("system.node_mem_bytes", "node " + std::to_string(n) + " memory " +
                                       std::to_string(cfg.node_mem_bytes[n]) +
                                       " below working-set floor " + std::to_string(floor));
    }
  }
  return r;
}

ValidationReport validate(const SystemConfig& cfg, const Arrangement& arr) {
  ValidationReport r;
  if (arr.nodes == 0 || arr.cores_per_node == 0) {
    r.violations.push_back({"arrangement", "needs at least one node and one core"});
  }
  if (arr.nodes > cfg.nodes()) {
    r.violations.push_back({"arrangement", arr.to_string() + " uses more nodes than the " +
                                               std::to_string(cfg.nodes()) + "-node mesh"});
  }
  if (arr.cores_per_node > cfg.cores_per_node) {
    r.violations.push_back({"arrangement", arr.to_string() + " uses more than " +
                                               std::to_string(cfg.cores_per_node) +
                                               " cores per node"});
  }
  return r;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "BASE", "BASE32", "C-64-8", "C-64-16", "NOC_BASE", "NOC_SW", "NOC_SW_C"};
  return names;
}

TimingParams nominal_timing() {
  TimingParams t;
  t.cache_hit_cycles = 2;
  t.bus_addr_overhead_cycles = 4;
  t.fp_add_cycles = 4;
  t.fp_mul_cycles = 4;
  return t;
}

SystemConfig preset(std::string_view name) {
  SystemConfig cfg;  // BASE: one node, one core, 64 sets x 4 ways x 64 B
  if (name == "BASE") return cfg;
  if (name == "BASE32") {
    cfg.cores_per_node = 32;
    return cfg;
  }
  if (name == "C-64-8") {
    cfg.cache.n_ways = 8;
    return cfg;
  }
  if (name == "C-64-16") {
    cfg.cache.n_ways = 16;
    return cfg;
  }
  if (name == "NOC_BASE" || name == "NOC_SW" || name == "NOC_SW_C") {
    cfg.mesh_x = 4;
    cfg.mesh_y = 4;
    cfg.cores_per_node = 4;
    cfg.node_mem_bytes.assign(16, 256 * kKiB);
    cfg.node_mem_bytes[0] = 2 * kMiB;
    cfg.router_kind =
        name == "NOC_BASE" ? RouterKind::SoftwareCore : RouterKind::HardwareSwitch;
    cfg.flow_control =
        name == "NOC_SW_C" ? FlowControl::CutThrough : FlowControl::StoreAndForward;
    return cfg;
  }
  throw ConfigError(ConfigErrorKind::UnknownPreset,
                    "unknown preset '" + std::string(name) + "'");
}

std::string canonical_key(std::string_view key) {
  key = trim(key);
  if (key == "cores" || key == "system.cores") return "system.cores_per_node";
  if (key == "preset" || key == "system.preset") return "system.preset";
  if (key.find('.') != std::string_view::npos) {
    if (find_key(key)) return std::string(key);
    throw ConfigError(ConfigErrorKind::UnknownKey, "unknown key '" + std::string(key) + "'");
  }
  for (const auto& k : key_table()) {
    if (k.name == key) return std::string(k.section) + "." + std::string(k.name);
  }
  throw ConfigError(ConfigErrorKind::UnknownKey, "unknown key '" + std::string(key) + "'");
}

void apply_setting(SystemConfig& cfg, std::string_view key, std::string_view value) {
  const auto canonical = canonical_key(key);
  if (canonical == "system.preset") {
    cfg = preset(trim(value));
    return;
  }
  const auto* spec = find_key(canonical);
  spec->set(cfg, canonical, value);
}

SystemConfig parse_config(std::string_view text) {
  struct Entry {
    std::string key;
    std::string value;
    std::size_t line;
    std::size_t column;
  };
  std::vector<Entry> entries;
  std::string section;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view raw =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++line_no;
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;

    const auto comment = raw.find_first_of("#;");
    const auto content = raw.substr(0, comment);
    const auto line = trim(content);
    if (line.empty()) continue;
    const std::size_t indent = content.find_first_not_of(" \t\r");
    const std::size_t col = indent + 1;

    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError(ConfigErrorKind::Syntax, "unterminated section header", line_no, col);
      }
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section != "system" && section != "cache" && section != "noc" &&
          section != "timing") {
        throw ConfigError(ConfigErrorKind::UnknownKey, "unknown section '" + section + "'",
                          line_no, col);
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(ConfigErrorKind::Syntax, "expected 'key = value'", line_no,
                        col + line.size());
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(ConfigErrorKind::Syntax, "missing key before '='", line_no, col);
    }
    if (value.empty()) {
      throw ConfigError(ConfigErrorKind::Syntax, "missing value after '='", line_no,
                        col + eq + 1);
    }
    std::string qualified = section.empty() || key.find('.') != std::string_view::npos
                                ? std::string(key)
                                : section + "." + std::string(key);
    std::string canonical;
    try {
      canonical = canonical_key(qualified);
    } catch (const ConfigError& e) {
      throw ConfigError(e.kind(), e.what(), line_no, col);
    }
    entries.push_back({canonical, std::string(value), line_no, col});
  }

  SystemConfig cfg;
  auto apply = [&](const Entry& e) {
    try {
      apply_setting(cfg, e.key, e.value);
    } catch (const ConfigError& err) {
      throw ConfigError(err.kind(), err.what(), e.line, e.column);
    }
  };
  // Preset first, then geometry, then everything else; node memory last
  // because its single-value form expands to the final node count.
  for (const auto& e : entries) {
    if (e.key == "system.preset") apply(e);
  }
  for (const auto& e : entries) {
    if (e.key == "system.mesh_x" || e.key == "system.mesh_y") apply(e);
  }
  for (const auto& e : entries) {
    if (e.key != "system.preset" && e.key != "system.mesh_x" && e.key != "system.mesh_y" &&
        e.key != "system.node_mem_bytes") {
      apply(e);
    }
  }
  for (const auto& e : entries) {
    if (e.key == "system.node_mem_bytes") apply(e);
  }

  const auto report = validate(cfg);
  if (!report.ok()) throw ConfigError(ConfigErrorKind::OutOfRange, report.summary());
  return cfg;
}

std::string serialize(const SystemConfig& cfg) {
  std::ostringstream out;
  std::string_view current;
  for (const auto& k : key_table()) {
    if (k.section != current) {
      if (!current.empty()) out << '\n';
      out << '[' << k.section << "]\n";
      current = k.section;
    }
    out << k.name << " = " << k.get(cfg) << '\n';
  }
  return out.str();
}

}  // namespace andromeda
