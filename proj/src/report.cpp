// Copyright 2026 The numastream Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "numastream/report.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "numastream/errors.hpp"

namespace numastream {

std::vector<ResultRow> to_rows(const RunResult& result,
                               const std::optional<TheoreticalModel>& model) {
  std::optional<double> bound;
  if (model) {
    try {
      bound = bound_per_node(*model, result.config.policy);
    } catch (const MissingLinkClass&) {
    }
  }
  std::vector<ResultRow> rows;
  for (std::size_t rep = 0; rep < result.wall_seconds.size(); ++rep) {
    ResultRow row;
    row.machine = result.machine;
    row.kernel = result.config.kernel;
    row.policy = result.config.policy;
    row.strided = result.strided();
    row.n_threads = result.config.n_threads;
    row.active_nodes = result.active_nodes;
    row.elements_per_worker = result.config.elements_per_worker;
    row.stride = result.config.stride;
    row.repetition = rep;
    row.wall_seconds = result.wall_seconds[rep];
    row.bandwidth_mb_s = result.bandwidth_mb_s[rep];
    row.per_node_bandwidth_mb_s = per_node_bandwidth(row.bandwidth_mb_s, row.active_nodes);
    if (rep < result.latency_ns.size()) row.latency_ns = result.latency_ns[rep];
    if (bound) {
      row.bound_gb_s = *bound;
      row.efficiency = efficiency(row.per_node_bandwidth_mb_s, *bound);
    }
    row.validation = result.validated;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string format_number(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.6g", value);
  return buffer;
}

namespace {

std::string optional_number(const std::optional<double>& value) {
  return value ? format_number(*value) : std::string();
}

}  // namespace

std::string format_row(const ResultRow& row) {
  std::string line;
  line += row.machine + ",";
  line += std::string(to_string(row.kernel)) + ",";
  line += std::string(to_string(row.policy)) + ",";
  line += row.strided ? "1," : "0,";
  line += std::to_string(row.n_threads) + ",";
  line += std::to_string(row.active_nodes) + ",";
  line += std::to_string(row.elements_per_worker) + ",";
  line += std::to_string(row.stride) + ",";
  line += std::to_string(row.repetition) + ",";
  line += format_number(row.wall_seconds) + ",";
  line += format_number(row.bandwidth_mb_s) + ",";
  line += format_number(row.per_node_bandwidth_mb_s) + ",";
  line += optional_number(row.latency_ns) + ",";
  line += optional_number(row.bound_gb_s) + ",";
  line += optional_number(row.efficiency) + ",";
  line += row.validation ? "pass" : "fail";
  return line;
}

std::size_t emit_rows(std::span<const ResultRow> rows, std::ostream& out) {
  out << kResultsSchemaLine << '\n' << kResultsHeader << '\n';
  for (const auto& row : rows) out << format_row(row) << '\n';
  out.flush();
  if (!out) throw WriteFailed("failed writing results rows");
  return rows.size();
}

std::size_t emit_rows(std::span<const RunResult> results,
                      const std::optional<TheoreticalModel>& model, std::ostream& out) {
  std::vector<ResultRow> rows;
  for (const auto& result : results) {
    auto more = to_rows(result, model);
    rows.insert(rows.end(), std::make_move_iterator(more.begin()),
                std::make_move_iterator(more.end()));
  }
  return emit_rows(std::span<const ResultRow>(rows), out);
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

constexpr std::size_t kColumns = 16;

const char* column_name(std::size_t index) {
  static const char* names[kColumns] = {
      "machine", "kernel", "policy", "strided", "n_threads", "active_nodes",
      "elements_per_worker", "stride", "repetition", "wall_seconds", "bandwidth_mb_s",
      "per_node_bandwidth_mb_s", "latency_ns", "bound_gb_s", "efficiency", "validation"};
  return names[index];
}

std::size_t parse_count(const std::string& text, std::size_t line, std::size_t column) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw ParseError("bad integer '" + text + "' in column " + column_name(column), line,
                     column_name(column));
  }
  return value;
}

double parse_double(const std::string& text, std::size_t line, std::size_t column) {
  try {
    std::size_t used = 0;
    const double value = std::stod(text, &used);
    if (used == text.size()) return value;
  } catch (const std::exception&) {
  }
  throw ParseError("bad number '" + text + "' in column " + column_name(column), line,
                   column_name(column));
}

std::optional<double> parse_optional(const std::string& text, std::size_t line,
                                     std::size_t column) {
  if (text.empty()) return std::nullopt;
  return parse_double(text, line, column);
}

}  // namespace

std::vector<ResultRow> parse_rows(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kResultsSchemaLine) {
    throw ParseError("missing schema line '" + std::string(kResultsSchemaLine) + "'", 1, "");
  }
  if (!std::getline(in, line) || line != kResultsHeader) {
    throw ParseError("column header does not match the results schema", 2, "");
  }
  std::vector<ResultRow> rows;
  std::size_t line_number = 2;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != kColumns) {
      throw ParseError("expected " + std::to_string(kColumns) + " columns, got " +
                           std::to_string(fields.size()),
                       line_number, "");
    }
    ResultRow row;
    row.machine = fields[0];
    const auto kernel = parse_kernel(fields[1]);
    if (!kernel) throw ParseError("unknown kernel '" + fields[1] + "'", line_number, "kernel");
    row.kernel = *kernel;
    const auto policy = parse_policy(fields[2]);
    if (!policy) throw ParseError("unknown policy '" + fields[2] + "'", line_number, "policy");
    row.policy = *policy;
    if (fields[3] != "0" && fields[3] != "1") {
      throw ParseError("strided must be 0 or 1", line_number, "strided");
    }
    row.strided = fields[3] == "1";
    row.n_threads = parse_count(fields[4], line_number, 4);
    row.active_nodes = parse_count(fields[5], line_number, 5);
    row.elements_per_worker = parse_count(fields[6], line_number, 6);
    row.stride = parse_count(fields[7], line_number, 7);
    row.repetition = parse_count(fields[8], line_number, 8);
    row.wall_seconds = parse_double(fields[9], line_number, 9);
    row.bandwidth_mb_s = parse_double(fields[10], line_number, 10);
    row.per_node_bandwidth_mb_s = parse_double(fields[11], line_number, 11);
    row.latency_ns = parse_optional(fields[12], line_number, 12);
    row.bound_gb_s = parse_optional(fields[13], line_number, 13);
    row.efficiency = parse_optional(fields[14], line_number, 14);
    if (fields[15] != "pass" && fields[15] != "fail") {
      throw ParseError("validation must be pass or fail", line_number, "validation");
    }
    row.validation = fields[15] == "pass";
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string variant_label(bool strided, PlacementPolicy policy) {
  std::string label = strided ? "Strided" : "Unstrided";
  switch (policy) {
    case PlacementPolicy::LocalNode: break;
    case PlacementPolicy::RemotePackage: label += "+non-NUMA"; break;
    case PlacementPolicy::OsDefault: label += "+os-default"; break;
  }
  return label;
}

std::string summarize(std::span<const RunResult> results,
                      const std::optional<TheoreticalModel>& model) {
  if (results.empty()) throw EmptyResults("no results to summarize");

  struct Cell {
    std::vector<double> bandwidth;
    std::vector<double> latency;
    std::size_t active_nodes = 1;
    bool validated = true;
  };
  using Key = std::tuple<std::size_t, KernelKind, std::size_t, PlacementPolicy>;
  std::map<Key, Cell> cells;
  for (const auto& result : results) {
    auto& cell = cells[{result.config.n_threads, result.config.kernel, result.config.stride,
                        result.config.policy}];
    cell.bandwidth.insert(cell.bandwidth.end(), result.bandwidth_mb_s.begin(),
                          result.bandwidth_mb_s.end());
    cell.latency.insert(cell.latency.end(), result.latency_ns.begin(), result.latency_ns.end());
    cell.active_nodes = result.active_nodes;
    cell.validated = cell.validated && result.validated;
  }

  std::ostringstream out;
  char line[256];
  out << "bandwidth MB/s: higher is better; latency ns: lower is better\n";
  std::snprintf(line, sizeof(line), "%7s %-6s %6s %-15s %-20s %12s %12s %10s %10s %s\n",
                "threads", "kernel", "stride", "policy", "variant", "mean MB/s", "best MB/s",
                "lat ns", "eff", "check");
  out << line;
  for (const auto& [key, cell] : cells) {
    const auto& [threads, kernel, stride, policy] = key;
    const Summary bw = summarize_samples(cell.bandwidth);
    std::string latency = "-";
    if (!cell.latency.empty()) latency = format_number(summarize_samples(cell.latency).mean);
    std::string eff = "-";
    if (model) {
      try {
        const double ratio = efficiency(per_node_bandwidth(bw.mean, cell.active_nodes),
                                        bound_per_node(*model, policy));
        eff = format_number(ratio) + (exceeds_bound(ratio) ? "!" : "");
      } catch (const MissingLinkClass&) {
      }
    }
    std::snprintf(line, sizeof(line), "%7zu %-6s %6zu %-15s %-20s %12s %12s %10s %10s %s\n",
                  threads, std::string(to_string(kernel)).c_str(), stride,
                  std::string(to_string(policy)).c_str(),
                  variant_label(stride > 1, policy).c_str(), format_number(bw.mean).c_str(),
                  format_number(bw.best).c_str(), latency.c_str(), eff.c_str(),
                  cell.validated ? "pass" : "FAIL");
    out << line;
  }
  return out.str();
}

std::string manifest_text(const ManifestInfo& info, std::span<const RunConfig> cells) {
  nlohmann::json root;
  root["schema"] = "numastream-manifest/1";
  root["tool"] = "numastream";
  root["version"] = info.tool_version;
  root["topology"] = info.topology_name;
  root["results_file"] = info.results_file;
  root["results_schema"] = kResultsSchemaLine;
  root["fake_system"] = info.fake_system;
  root["seed"] = info.seed;
  auto& list = root["cells"] = nlohmann::json::array();
  for (const auto& cell : cells) {
    list.push_back({{"kernel", to_string(cell.kernel)},
                    {"n_threads", cell.n_threads},
                    {"elements_per_worker", cell.elements_per_worker},
                    {"stride", cell.stride},
                    {"policy", to_string(cell.policy)},
                    {"repetitions", cell.repetitions},
                    {"warmup_reps", cell.warmup_reps},
                    {"scalar", cell.scalar},
                    {"allow_small_arrays", cell.allow_small_arrays}});
  }
  return root.dump(2) + "\n";
}

void write_text_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw WriteFailed("cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) throw WriteFailed("failed writing " + path.string());
}

}  // namespace numastream
