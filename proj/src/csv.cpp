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

#include "andromeda/csv.hpp"

#include <array>
#include <cerrno>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace andromeda {

namespace {

std::string quote(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::vector<std::vector<std::string>> split_records(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
      continue;
    }
    if (ch == '"') {
      quoted = true;
      any = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (ch == '\n') {
      fields.push_back(std::move(field));
      field.clear();
      records.push_back(std::move(fields));
      fields.clear();
      any = false;
    } else if (ch != '\r') {
      field += ch;
      any = true;
    }
  }
  if (quoted) throw CsvError("unterminated quoted field");
  if (any) {
    fields.push_back(std::move(field));
    records.push_back(std::move(fields));
  }
  return records;
}

template <typename T>
T parse_number(const std::string& s, const char* column) {
  T v{};
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc{} || ptr != end) {
    throw CsvError(std::string("bad value '") + s + "' in column " + column);
  }
  return v;
}

std::optional<double> parse_optional(const std::string& s, const char* column) {
  if (s.empty()) return std::nullopt;
  return parse_number<double>(s, column);
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

std::string to_csv(const std::vector<ResultRow>& rows) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += quote(r.config_id) + ',' + quote(r.benchmark) + ',' + quote(r.arrangement.to_string()) +
           ',' + std::to_string(r.cycles) + ',' +
           (r.bandwidth_bytes_per_cycle ? format_double(*r.bandwidth_bytes_per_cycle) : "") + ',' +
           (r.speedup_vs_single ? format_double(*r.speedup_vs_single) : "") + ',' +
           format_double(r.cache_hit_rate) + ',' + format_double(r.bus_utilization) + ',' +
           std::to_string(r.flit_hops) + ',' + std::to_string(r.packets) + '\n';
  }
  return out;
}

std::vector<ResultRow> parse_csv(std::string_view text) {
  const auto records = split_records(text);
  if (records.empty()) throw CsvError("missing header");
  std::string header;
  for (std::size_t i = 0; i < records[0].size(); ++i) {
    if (i) header += ',';
    header += records[0][i];
  }
  if (header != kCsvHeader) throw CsvError("unexpected header: " + header);
  std::vector<ResultRow> rows;
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto& f = records[i];
    if (f.size() != 10) {
      throw CsvError("row " + std::to_string(i) + " has " + std::to_string(f.size()) +
                     " fields, expected 10");
    }
    ResultRow r;
    r.config_id = f[0];
    r.benchmark = f[1];
    r.arrangement = parse_arrangement(f[2]);
    r.cycles = parse_number<Cycle>(f[3], "cycles");
    r.bandwidth_bytes_per_cycle = parse_optional(f[4], "bandwidth_bytes_per_cycle");
    r.speedup_vs_single = parse_optional(f[5], "speedup_vs_single");
    r.cache_hit_rate = parse_number<double>(f[6], "cache_hit_rate");
    r.bus_utilization = parse_number<double>(f[7], "bus_utilization");
    r.flit_hops = parse_number<std::uint64_t>(f[8], "flit_hops");
    r.packets = parse_number<std::uint64_t>(f[9], "packets");
    rows.push_back(std::move(r));
  }
  return rows;
}

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing: " + std::strerror(errno));
  const auto text = to_csv(rows);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::vector<ResultRow> read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading: " + std::strerror(errno));
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

}  // namespace andromeda
