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

#include "andromeda/dse.hpp"

#include <algorithm>
#include <exception>
#include <map>
#include <sstream>

#include "andromeda/benchmarks.hpp"
#include "andromeda/engine.hpp"

namespace andromeda {

BenchmarkId parse_benchmark_id(std::string_view name) {
  if (name == "stream") return BenchmarkId::Stream;
  if (name == "matmul") return BenchmarkId::Matmul;
  if (name == "nbody") return BenchmarkId::NBody;
  throw ExperimentError(ErrorClass::Validation, "unknown benchmark '" + std::string(name) + "'");
}

std::string BenchmarkSpec::label() const {
  switch (id) {
    case BenchmarkId::Stream:
      return "stream:n=" + std::to_string(stream_n) + ":kernel=" + to_string(stream_kernel);
    case BenchmarkId::Matmul:
      return "matmul:n=" + std::to_string(mm_n) + ":k=" + std::to_string(mm_k) +
             ":m=" + std::to_string(mm_m);
    case BenchmarkId::NBody:
      return "nbody:n=" + std::to_string(bodies) + ":steps=" + std::to_string(steps);
  }
  return "?";
}

ErrorClass classify(const std::exception& e) {
  if (const auto* x = dynamic_cast<const ExperimentError*>(&e)) return x->error_class();
  if (dynamic_cast<const DeadlockError*>(&e)) return ErrorClass::Deadlock;
  if (dynamic_cast<const IoError*>(&e)) return ErrorClass::Io;
  if (dynamic_cast<const VerificationError*>(&e) || dynamic_cast<const SingularityError*>(&e)) {
    return ErrorClass::Verification;
  }
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const MemoryFault*>(&e) ||
      dynamic_cast<const SimulationError*>(&e)) {
    return ErrorClass::Validation;
  }
  return ErrorClass::Other;
}

namespace {

ResultRow simulate(const std::string& config_id, const SystemConfig& cfg, const BenchmarkSpec& b,
                   const Arrangement& arr) {
  ResultRow row;
  row.config_id = config_id;
  row.benchmark = b.label();
  row.arrangement = arr;
  const SimStats* stats = nullptr;
  StreamResult sr;
  MatmulResult mr;
  NBodyResult nr;
  switch (b.id) {
    case BenchmarkId::Stream: {
      sr = stream_run(cfg, arr, StreamParams{b.stream_n, b.q, b.stream_reps, b.seed});
      const auto k = static_cast<std::size_t>(b.stream_kernel);
      row.cycles = sr.best_cycles[k];
      row.bandwidth_bytes_per_cycle = sr.bandwidth[k];
      stats = &sr.stats;
      break;
    }
    case BenchmarkId::Matmul: {
      mr = matmul_run(cfg, arr, make_matmul_input(b.mm_n, b.mm_k, b.mm_m, b.seed));
      row.cycles = mr.stats.total_cycles;
      stats = &mr.stats;
      break;
    }
    case BenchmarkId::NBody: {
      nr = nbody_run(cfg, arr, make_bodies(b.bodies, b.seed), NBodyParams{b.steps});
      row.cycles = nr.stats.total_cycles;
      stats = &nr.stats;
      break;
    }
  }
  row.cache_hit_rate = stats->hit_rate();
  row.bus_utilization = stats->bus_utilization();
  row.flit_hops = stats->flit_hops;
  row.packets = stats->packets_sent;
  return row;
}

ResultRow simulate_with_context(const std::string& config_id, const SystemConfig& cfg,
                                const BenchmarkSpec& b, const Arrangement& arr) {
  try {
    return simulate(config_id, cfg, b, arr);
  } catch (const std::exception& e) {
    throw ExperimentError(classify(e), config_id + " " + b.label() + " arrangement " +
                                           arr.to_string() + ": " + e.what());
  }
}

// Fills speedup_vs_single from the (1,1) row of each group.
void fill_speedups(std::vector<ResultRow>& rows, const std::vector<std::string>& groups) {
  std::map<std::string, Cycle> single;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].arrangement == Arrangement{1, 1}) single.emplace(groups[i], rows[i].cycles);
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto it = single.find(groups[i]);
    if (it != single.end() && rows[i].cycles > 0) {
      rows[i].speedup_vs_single =
          static_cast<double>(it->second) / static_cast<double>(rows[i].cycles);
    }
  }
}

bool is_geometry_key(const std::string& canonical) {
  return canonical == "system.cores_per_node" || canonical == "system.mesh_x" ||
         canonical == "system.mesh_y";
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec) {
  const auto report = validate(spec.config);
  if (!report.ok()) throw ExperimentError(ErrorClass::Validation, report.summary());
  for (const auto& arr : spec.arrangements) {
    const auto r = validate(spec.config, arr);
    if (!r.ok()) throw ExperimentError(ErrorClass::Validation, r.summary());
  }
  std::vector<ResultRow> rows;
  for (const auto& arr : spec.arrangements) {
    rows.push_back(simulate_with_context(spec.config_id, spec.config, spec.benchmark, arr));
  }
  std::vector<std::string> groups(rows.size(), spec.config_id + "|" + spec.benchmark.label());
  fill_speedups(rows, groups);
  return rows;
}

SweepResult sweep(const SweepSpec& spec) {
  struct Task {
    std::string config_id;
    std::string group;
    SystemConfig cfg;
    Arrangement arr;
  };
  std::vector<Task> tasks;
  SweepResult out;

  std::vector<std::string> canonical;
  for (const auto& axis : spec.axes) {
    try {
      canonical.push_back(canonical_key(axis.key));
    } catch (const ConfigError& e) {
      throw ExperimentError(ErrorClass::Validation, std::string("sweep axis: ") + e.what());
    }
    if (axis.values.empty()) {
      throw ExperimentError(ErrorClass::Validation, "sweep axis '" + axis.key + "' has no values");
    }
  }

  std::size_t points = 1;
  for (const auto& axis : spec.axes) points *= axis.values.size();
  std::vector<std::size_t> idx(spec.axes.size(), 0);
  for (std::size_t p = 0; p < points; ++p) {
    // Mixed-radix index, first axis most significant.
    std::size_t rest = p;
    for (std::size_t a = spec.axes.size(); a-- > 0;) {
      idx[a] = rest % spec.axes[a].values.size();
      rest /= spec.axes[a].values.size();
    }
    SystemConfig cfg = spec.base.config;
    std::string id = spec.base.config_id;
    std::string group = spec.base.config_id;
    std::string error;
    for (std::size_t a = 0; a < spec.axes.size(); ++a) {
      const auto& value = spec.axes[a].values[idx[a]];
      const auto part = ":" + spec.axes[a].key + "=" + value;
      id += part;
      if (!is_geometry_key(canonical[a])) group += part;
      try {
        apply_setting(cfg, canonical[a], value);
      } catch (const ConfigError& e) {
        error = e.what();
      }
    }
    if (error.empty()) {
      const auto report = validate(cfg);
      if (!report.ok()) error = report.summary();
    }
    if (!error.empty()) {
      out.diagnostics.push_back("skipped " + id + ": " + error);
      continue;
    }
    auto arrangements = spec.base.arrangements;
    if (arrangements.empty()) arrangements.push_back({cfg.nodes(), cfg.cores_per_node});
    for (const auto& arr : arrangements) {
      const auto r = validate(cfg, arr);
      if (!r.ok()) {
        out.diagnostics.push_back("skipped " + id + " " + arr.to_string() + ": " + r.summary());
        continue;
      }
      tasks.push_back({id, group + "|" + spec.base.benchmark.label(), cfg, arr});
    }
  }
  if (tasks.empty()) {
    std::string msg = "no valid sweep points";
    for (const auto& d : out.diagnostics) msg += "\n  " + d;
    throw ExperimentError(ErrorClass::Validation, msg);
  }

  std::vector<ResultRow> rows(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  const int jobs = static_cast<int>(std::max(1u, spec.jobs));
#pragma omp parallel for schedule(dynamic, 1) num_threads(jobs)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(tasks.size()); ++i) {
    const auto& t = tasks[i];
    try {
      rows[i] = simulate_with_context(t.config_id, t.cfg, spec.base.benchmark, t.arr);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<std::string> groups;
  for (const auto& t : tasks) groups.push_back(t.group);
  fill_speedups(rows, groups);
  out.rows = std::move(rows);
  return out;
}

std::string label_kind(const std::string& label) { return label.substr(0, label.find(':')); }

std::optional<std::uint64_t> label_param(const std::string& label, const std::string& key) {
  const std::string needle = ":" + key + "=";
  const auto pos = label.find(needle);
  if (pos == std::string::npos) return std::nullopt;
  const auto start = pos + needle.size();
  const auto end = label.find(':', start);
  const auto text = label.substr(start, end == std::string::npos ? std::string::npos : end - start);
  try {
    std::size_t used = 0;
    const auto v = std::stoull(text, &used);
    if (used != text.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

namespace {

std::string without_param(const std::string& label, const std::string& key) {
  const std::string needle = ":" + key + "=";
  const auto pos = label.find(needle);
  if (pos == std::string::npos) return label;
  const auto end = label.find(':', pos + 1);
  return label.substr(0, pos) + (end == std::string::npos ? "" : label.substr(end));
}

// Drops ":key=value" parts that only change the geometry, so a sweep over
// core counts forms one saturation series.
std::string series_config(const std::string& id) {
  std::string out;
  std::size_t pos = 0;
  for (bool first = true; pos <= id.size(); first = false) {
    const auto end = std::min(id.find(':', pos), id.size());
    const auto part = id.substr(pos, end - pos);
    pos = end + 1;
    const auto eq = part.find('=');
    if (!first && eq != std::string::npos) {
      try {
        if (is_geometry_key(canonical_key(part.substr(0, eq)))) continue;
      } catch (const ConfigError&) {
      }
    }
    out += (first ? "" : ":") + part;
  }
  return out;
}

}  // namespace

AnalysisReport analyze(const std::vector<ResultRow>& rows) {
  if (rows.empty()) throw AnalysisError("no rows to analyze");
  AnalysisReport rep;

  for (const auto& r : rows) {
    if (r.speedup_vs_single) rep.speedups.push_back(r);
  }

  // Saturation over single-node rows of each (config, benchmark) series.
  std::map<std::pair<std::string, std::string>, std::map<std::uint32_t, double>> series;
  std::vector<std::pair<std::string, std::string>> order;
  for (const auto& r : rows) {
    if (!r.speedup_vs_single || r.arrangement.nodes != 1) continue;
    const auto key = std::make_pair(series_config(r.config_id), r.benchmark);
    if (!series.count(key)) order.push_back(key);
    series[key].emplace(r.arrangement.total_cores(), *r.speedup_vs_single);
  }
  for (const auto& key : order) {
    const auto& s = series[key];
    if (s.size() < 2) continue;
    SaturationPoint sp{key.first, key.second, std::nullopt};
    double prev = -1.0;
    for (const auto& [cores, speedup] : s) {
      if (prev > 0 && speedup < prev * 1.10) {
        sp.cores = cores;
        break;
      }
      prev = speedup;
    }
    rep.saturation.push_back(sp);
  }

  // N-body throughput and SMP/distributed crossover.
  struct Series {
    std::string config;
    Arrangement arr;
    std::string shape;  // label without the body count
    std::map<std::uint64_t, Cycle> cycles;
  };
  std::vector<Series> smp, noc;
  for (const auto& r : rows) {
    if (label_kind(r.benchmark) != "nbody") continue;
    const auto n = label_param(r.benchmark, "n");
    const auto steps = label_param(r.benchmark, "steps");
    if (!n || !steps) continue;
    rep.flops.push_back({r.config_id, r.benchmark, r.arrangement,
                         nbody_flops_per_cycle(*n, static_cast<std::uint32_t>(*steps), r.cycles)});
    auto& list = r.arrangement.nodes == 1 ? smp : noc;
    const auto shape = without_param(r.benchmark, "n");
    auto it = std::find_if(list.begin(), list.end(), [&](const Series& s) {
      return s.config == r.config_id && s.arr == r.arrangement && s.shape == shape;
    });
    if (it == list.end()) {
      list.push_back({r.config_id, r.arrangement, shape, {}});
      it = list.end() - 1;
    }
    it->cycles.emplace(*n, r.cycles);
  }
  for (const auto& s : smp) {
    for (const auto& d : noc) {
      if (s.shape != d.shape || s.arr.total_cores() != d.arr.total_cores()) continue;
      std::vector<std::pair<double, double>> pts;  // (N, advantage of distributed)
      for (const auto& [n, c_smp] : s.cycles) {
        const auto it = d.cycles.find(n);
        if (it == d.cycles.end() || it->second == 0) continue;
        pts.emplace_back(static_cast<double>(n),
                         static_cast<double>(c_smp) / static_cast<double>(it->second) - 1.0);
      }
      if (pts.empty()) continue;
      Crossover x{s.config, s.arr, d.config, d.arr, std::nullopt, false};
      if (pts.front().second > 0) {
        x.bodies = pts.front().first;
        x.upper_bound = true;
      } else {
        for (std::size_t i = 1; i < pts.size(); ++i) {
          const auto [n0, r0] = pts[i - 1];
          const auto [n1, r1] = pts[i];
          if (r0 <= 0 && r1 > 0) {
            x.bodies = n0 + (n1 - n0) * (-r0) / (r1 - r0);
            break;
          }
        }
      }
      rep.crossovers.push_back(x);
    }
  }
  return rep;
}

std::string AnalysisReport::to_text() const {
  std::ostringstream out;
  out << "speedup\n";
  for (const auto& r : speedups) {
    out << "  " << r.config_id << ' ' << r.benchmark << ' ' << r.arrangement.to_string() << ' '
        << format_double(*r.speedup_vs_single) << '\n';
  }
  out << "saturation\n";
  for (const auto& s : saturation) {
    out << "  " << s.config_id << ' ' << s.benchmark << ' '
        << (s.cores ? std::to_string(*s.cores) + " cores" : std::string("none")) << '\n';
  }
  out << "flops_per_cycle\n";
  for (const auto& f : flops) {
    out << "  " << f.config_id << ' ' << f.benchmark << ' ' << f.arrangement.to_string() << ' '
        << format_double(f.flops_per_cycle) << '\n';
  }
  out << "crossover\n";
  for (const auto& x : crossovers) {
    out << "  " << x.smp_config << ' ' << x.smp_arrangement.to_string() << " vs " << x.noc_config
        << ' ' << x.noc_arrangement.to_string() << ": ";
    if (!x.bodies) {
      out << "none\n";
    } else {
      out << (x.upper_bound ? "<= " : "") << format_double(*x.bodies) << " bodies\n";
    }
  }
  return out.str();
}

}  // namespace andromeda
