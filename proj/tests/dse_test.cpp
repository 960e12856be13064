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

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "andromeda/dse.hpp"
#include "doctest.h"

using namespace andromeda;

namespace {

ExperimentSpec small_stream() {
  ExperimentSpec s;
  s.config_id = "BASE";
  s.config = preset("BASE");
  s.config.cores_per_node = 4;
  s.benchmark.id = BenchmarkId::Stream;
  s.benchmark.stream_n = 512;
  s.benchmark.stream_reps = 1;
  return s;
}

ResultRow nbody_row(const std::string& cfg, Arrangement arr, std::uint64_t n, Cycle cycles) {
  ResultRow r;
  r.config_id = cfg;
  r.benchmark = "nbody:n=" + std::to_string(n) + ":steps=1";
  r.arrangement = arr;
  r.cycles = cycles;
  return r;
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("andromeda_" + name)).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(const std::string& args) {
  const std::string cmd = std::string(ANDROMEDA_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("csv: rows survive a round trip") {
  ResultRow a;
  a.config_id = "BASE";
  a.benchmark = "stream:n=128000:kernel=copy";
  a.arrangement = {1, 4};
  a.cycles = 123456;
  a.bandwidth_bytes_per_cycle = 3.0 / 7.0;
  a.speedup_vs_single = 0.1;
  a.cache_hit_rate = 0.875;
  a.bus_utilization = 1.0 / 3.0;
  ResultRow b = nbody_row("NOC_SW_C", {4, 4}, 2048, 999);
  b.flit_hops = 17;
  b.packets = 3;
  const std::vector<ResultRow> rows{a, b};
  CHECK(parse_csv(to_csv(rows)) == rows);

  const auto path = temp_path("roundtrip.csv");
  emit_csv(rows, path);
  CHECK(read_csv(path) == rows);
  std::remove(path.c_str());
}

TEST_CASE("csv: zero rows is a header-only file") {
  CHECK(to_csv({}) == std::string(kCsvHeader) + "\n");
  CHECK(parse_csv(to_csv({})).empty());
}

TEST_CASE("csv: malformed input and unwritable paths") {
  CHECK_THROWS_AS(parse_csv("config_id,benchmark\nx,y\n"), CsvError);
  CHECK_THROWS_AS(emit_csv({}, "/nonexistent-dir/x.csv"), IoError);
  CHECK_THROWS_AS(read_csv("/nonexistent-dir/x.csv"), IoError);
}

TEST_CASE("run_experiment: empty arrangement list gives no rows") {
  auto s = small_stream();
  CHECK(run_experiment(s).empty());
}

TEST_CASE("run_experiment: speedup of the single-core row is exactly one") {
  auto s = small_stream();
  s.arrangements = {{1, 1}, {1, 2}, {1, 4}};
  const auto rows = run_experiment(s);
  REQUIRE(rows.size() == 3);
  REQUIRE(rows[0].speedup_vs_single);
  CHECK(*rows[0].speedup_vs_single == 1.0);
  CHECK(*rows[2].speedup_vs_single == double(rows[0].cycles) / double(rows[2].cycles));
  CHECK(to_csv(rows) == to_csv(run_experiment(s)));
}

TEST_CASE("run_experiment: invalid arrangement is a validation error") {
  auto s = small_stream();
  s.arrangements = {{2, 1}};
  try {
    run_experiment(s);
    FAIL("accepted two nodes on a one-node machine");
  } catch (const ExperimentError& e) {
    CHECK(e.error_class() == ErrorClass::Validation);
  }
}

TEST_CASE("sweep: 3x3 grid") {
  SweepSpec s;
  s.base = small_stream();
  s.axes = {{"n_ways", {"4", "8", "16"}}, {"cores", {"1", "2", "4"}}};
  const auto r = sweep(s);
  CHECK(r.rows.size() == 9);
  CHECK(r.diagnostics.empty());
  for (const auto& row : r.rows) {
    REQUIRE(row.speedup_vs_single);
    if (row.arrangement.cores_per_node == 1) CHECK(*row.speedup_vs_single == 1.0);
  }
  s.jobs = 3;
  CHECK(sweep(s).rows == r.rows);

  // Each n_ways value is one series over core counts.
  const auto rep = analyze(r.rows);
  REQUIRE(rep.saturation.size() == 3);
  CHECK(rep.saturation[0].config_id == "BASE:n_ways=4");
}

TEST_CASE("sweep: invalid points are skipped with a diagnostic") {
  SweepSpec s;
  s.base = small_stream();
  s.axes = {{"n_ways", {"3", "4"}}};
  const auto r = sweep(s);
  CHECK(r.rows.size() == 1);
  REQUIRE(r.diagnostics.size() == 1);
  CHECK(r.diagnostics[0].find("n_ways=3") != std::string::npos);
}

TEST_CASE("sweep: single point equals run_experiment") {
  SweepSpec s;
  s.base = small_stream();
  s.base.arrangements = {{1, 1}, {1, 4}};
  s.axes = {{"cores", {"4"}}};
  const auto swept = sweep(s).rows;
  const auto direct = run_experiment(s.base);
  REQUIRE(swept.size() == direct.size());
  for (std::size_t i = 0; i < swept.size(); ++i) {
    CHECK(swept[i].cycles == direct[i].cycles);
    CHECK(swept[i].speedup_vs_single == direct[i].speedup_vs_single);
  }
}

TEST_CASE("analyze: ideal speedups never saturate") {
  std::vector<ResultRow> rows;
  for (std::uint32_t c : {1u, 2u, 4u, 8u}) {
    ResultRow r;
    r.config_id = "BASE32";
    r.benchmark = "matmul:n=128:k=128:m=128";
    r.arrangement = {1, c};
    r.cycles = 8000 / c;
    r.speedup_vs_single = double(c);
    rows.push_back(r);
  }
  auto rep = analyze(rows);
  REQUIRE(rep.saturation.size() == 1);
  CHECK_FALSE(rep.saturation[0].cores);

  rows[3].speedup_vs_single = 4.2;
  rep = analyze(rows);
  CHECK(rep.saturation[0].cores == 8u);
}

TEST_CASE("analyze: crossover placement") {
  SUBCASE("distributed wins everywhere") {
    const std::vector<ResultRow> rows = {
        nbody_row("BASE32", {1, 16}, 512, 100), nbody_row("NOC_SW_C", {4, 4}, 512, 90),
        nbody_row("BASE32", {1, 16}, 1024, 400), nbody_row("NOC_SW_C", {4, 4}, 1024, 300)};
    const auto rep = analyze(rows);
    REQUIRE(rep.crossovers.size() == 1);
    CHECK(rep.crossovers[0].upper_bound);
    CHECK(rep.crossovers[0].bodies == 512.0);
  }
  SUBCASE("interpolated") {
    // Advantage of the distributed machine: -0.2 at 1024, +0.2 at 2048.
    const std::vector<ResultRow> rows = {
        nbody_row("BASE32", {1, 16}, 1024, 800), nbody_row("NOC_SW_C", {4, 4}, 1024, 1000),
        nbody_row("BASE32", {1, 16}, 2048, 1200), nbody_row("NOC_SW_C", {4, 4}, 2048, 1000)};
    const auto rep = analyze(rows);
    REQUIRE(rep.crossovers.size() == 1);
    REQUIRE(rep.crossovers[0].bodies);
    CHECK(*rep.crossovers[0].bodies > 1024);
    CHECK(*rep.crossovers[0].bodies < 2048);
    CHECK(*rep.crossovers[0].bodies == doctest::Approx(1536));
    CHECK_FALSE(rep.crossovers[0].upper_bound);
  }
  SUBCASE("never") {
    const std::vector<ResultRow> rows = {nbody_row("BASE32", {1, 16}, 1024, 100),
                                         nbody_row("NOC_SW_C", {4, 4}, 1024, 1000)};
    const auto rep = analyze(rows);
    REQUIRE(rep.crossovers.size() == 1);
    CHECK_FALSE(rep.crossovers[0].bodies);
  }
}

TEST_CASE("analyze: flops per cycle and purity") {
  const std::vector<ResultRow> rows = {nbody_row("BASE32", {1, 4}, 100, 19 * 100 * 99)};
  const auto a = analyze(rows);
  REQUIRE(a.flops.size() == 1);
  CHECK(a.flops[0].flops_per_cycle == doctest::Approx(1.0));
  CHECK(analyze(rows).to_text() == a.to_text());
  CHECK_THROWS_AS(analyze({}), AnalysisError);
}

TEST_CASE("label parameters") {
  CHECK(label_param("nbody:n=2048:steps=10", "n") == 2048u);
  CHECK(label_param("nbody:n=2048:steps=10", "steps") == 10u);
  CHECK_FALSE(label_param("nbody:n=2048", "k"));
  CHECK(label_kind("matmul:n=1:k=1:m=1") == "matmul");
}

TEST_CASE("cli: exit codes") {
  const auto out = temp_path("cli.csv");
  CHECK(cli("presets") == 0);
  CHECK(cli("presets --show NOC_SW_C") == 0);
  CHECK(cli("run --preset BASE --set cores=2 --benchmark stream --n 256 --reps 1 "
            "--arrangements \"(1,1),(1,2)\" --out " + out) == 0);
  const auto csv = slurp(out);
  CHECK(csv.rfind(kCsvHeader, 0) == 0);
  CHECK(read_csv(out).size() == 2);
  CHECK(cli("analyze " + out) == 0);
  CHECK(cli("run --preset NOPE") == 1);
  CHECK(cli("run --preset BASE --set n_ways=3") == 1);
  CHECK(cli("run --preset BASE --arrangements \"(2,1)\"") == 1);
  CHECK(cli("analyze /nonexistent-dir/in.csv") == 3);
  CHECK(cli("run --preset BASE --n 64 --reps 1 --out /nonexistent-dir/x.csv") == 3);
  CHECK(cli("bogus") == 1);
  std::remove(out.c_str());
}
