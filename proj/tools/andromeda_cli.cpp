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

// Command-line driver: run, sweep, analyze, presets.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "andromeda/dse.hpp"

using namespace andromeda;

namespace {

enum ExitCode { kOk = 0, kValidation = 1, kDeadlock = 2, kIo = 3 };

int exit_code(ErrorClass cls) {
  switch (cls) {
    case ErrorClass::Deadlock: return kDeadlock;
    case ErrorClass::Io: return kIo;
    default: return kValidation;
  }
}

struct CommonOptions {
  std::string config_file;
  std::string preset;
  std::vector<std::string> settings;
  std::string benchmark = "stream";
  std::uint64_t n = 0;
  std::uint32_t k = 0, m = 0;
  std::uint32_t steps = 10;
  std::uint32_t reps = 10;
  double q = 3.0;
  std::string kernel = "copy";
  std::string arrangements;
  std::string out;
  std::uint64_t seed = 1;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_file, "Configuration file");
  cmd->add_option("--preset", o.preset, "Named preset (see `presets`)");
  cmd->add_option("--set", o.settings, "Override a config key, key=value (repeatable)");
  cmd->add_option("--benchmark", o.benchmark, "stream | matmul | nbody")
      ->check(CLI::IsMember({"stream", "matmul", "nbody"}));
  cmd->add_option("--n", o.n, "STREAM array length, Matmul N, or N-body body count");
  cmd->add_option("--k", o.k, "Matmul K");
  cmd->add_option("--m", o.m, "Matmul M");
  cmd->add_option("--steps", o.steps, "N-body timesteps");
  cmd->add_option("--reps", o.reps, "STREAM repetitions");
  cmd->add_option("--q", o.q, "STREAM scalar");
  cmd->add_option("--kernel", o.kernel, "STREAM kernel reported")
      ->check(CLI::IsMember({"copy", "scale", "add", "triad"}));
  cmd->add_option("--arrangements", o.arrangements,
                  "Node/core arrangements, e.g. \"(1,1),(4,4)\" or 1x1,4x4");
  cmd->add_option("--out", o.out, "CSV output file (default: stdout)");
  cmd->add_option("--seed", o.seed, "Seed of the benchmark inputs");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentSpec build_spec(const CommonOptions& o) {
  ExperimentSpec spec;
  if (!o.config_file.empty()) {
    spec.config = parse_config(read_file(o.config_file));
    spec.config_id = o.config_file;
  } else if (!o.preset.empty()) {
    spec.config = preset(o.preset);
    spec.config_id = o.preset;
  } else {
    spec.config = preset("BASE");
    spec.config_id = "BASE";
  }
  for (const auto& s : o.settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(ConfigErrorKind::Syntax, "--set expects key=value, got '" + s + "'");
    }
    apply_setting(spec.config, s.substr(0, eq), s.substr(eq + 1));
    spec.config_id += ":" + s;
  }
  auto& b = spec.benchmark;
  b.id = parse_benchmark_id(o.benchmark);
  b.seed = o.seed;
  switch (b.id) {
    case BenchmarkId::Stream:
      if (o.n) b.stream_n = o.n;
      b.stream_reps = o.reps;
      b.q = o.q;
      for (auto kk : kStreamKernels) {
        if (o.kernel == to_string(kk)) b.stream_kernel = kk;
      }
      break;
    case BenchmarkId::Matmul:
      if (o.n) b.mm_n = static_cast<std::uint32_t>(o.n);
      b.mm_k = o.k ? o.k : b.mm_n;
      b.mm_m = o.m ? o.m : b.mm_n;
      break;
    case BenchmarkId::NBody:
      if (o.n) b.bodies = static_cast<std::uint32_t>(o.n);
      b.steps = o.steps;
      break;
  }
  if (!o.arrangements.empty()) spec.arrangements = parse_arrangements(o.arrangements);
  return spec;
}

void write_rows(const std::vector<ResultRow>& rows, const std::string& out) {
  if (out.empty()) {
    std::cout << to_csv(rows);
  } else {
    emit_csv(rows, out);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cycle-approximate clustered multiprocessor simulator"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  auto* run_cmd = app.add_subcommand("run", "Run one benchmark over a list of arrangements");
  add_common(run_cmd, run_opts);

  CommonOptions sweep_opts;
  std::vector<std::string> axes;
  unsigned jobs = 1;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run a Cartesian parameter sweep");
  add_common(sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--axis", axes, "Sweep axis key=v1,v2,... (repeatable)");
  sweep_cmd->add_option("--jobs", jobs, "Concurrent simulations")->check(CLI::PositiveNumber);

  std::string analyze_in;
  auto* analyze_cmd = app.add_subcommand("analyze", "Derive speedup, saturation and crossover");
  analyze_cmd->add_option("input", analyze_in, "CSV produced by run or sweep")->required();

  std::string show;
  auto* presets_cmd = app.add_subcommand("presets", "List named configurations");
  presets_cmd->add_option("--show", show, "Print one preset as a config document");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kValidation;
  }

  try {
    if (*presets_cmd) {
      if (!show.empty()) {
        std::cout << serialize(preset(show));
      } else {
        for (const auto& name : preset_names()) {
          const auto c = preset(name);
          std::cout << name << ": " << c.nodes() << " node(s), " << c.cores_per_node
                    << " core(s)/node, cache " << c.cache.n_sets << "x" << c.cache.n_ways << "x"
                    << c.cache.line_bytes << " B, " << to_string(c.router_kind) << ", "
                    << to_string(c.flow_control) << '\n';
        }
      }
      return kOk;
    }
    if (*run_cmd) {
      auto spec = build_spec(run_opts);
      if (run_opts.arrangements.empty()) {
        spec.arrangements.push_back({spec.config.nodes(), spec.config.cores_per_node});
      }
      write_rows(run_experiment(spec), run_opts.out);
      return kOk;
    }
    if (*sweep_cmd) {
      SweepSpec spec;
      spec.base = build_spec(sweep_opts);
      spec.jobs = jobs;
      for (const auto& a : axes) {
        const auto eq = a.find('=');
        if (eq == std::string::npos) {
          throw ConfigError(ConfigErrorKind::Syntax, "--axis expects key=v1,v2, got '" + a + "'");
        }
        SweepAxis axis{a.substr(0, eq), {}};
        std::stringstream vs(a.substr(eq + 1));
        for (std::string v; std::getline(vs, v, ',');) axis.values.push_back(v);
        spec.axes.push_back(std::move(axis));
      }
      const auto result = sweep(spec);
      for (const auto& d : result.diagnostics) std::cerr << d << '\n';
      write_rows(result.rows, sweep_opts.out);
      return kOk;
    }
    if (*analyze_cmd) {
      std::cout << analyze(read_csv(analyze_in)).to_text();
      return kOk;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(classify(e));
  }
  return kOk;
}
