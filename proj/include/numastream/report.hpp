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

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "numastream/harness.hpp"
#include "numastream/model.hpp"

namespace numastream {

/// Results file layout. The first line is the schema comment, the second the
/// column header, then one row per timed repetition:
///
///   # numastream-results v1
///   machine,kernel,policy,strided,n_threads,active_nodes,elements_per_worker,
///   stride,repetition,wall_seconds,bandwidth_mb_s,per_node_bandwidth_mb_s,
///   latency_ns,bound_gb_s,efficiency,validation
///
/// (the header is a single line). Floating-point columns use 6 significant
/// digits (printf %.6g). latency_ns is empty unless the run strides one
/// element per cache line; bound_gb_s and efficiency are empty when no
/// theoretical model is known. strided is 0/1, validation is pass/fail.
inline constexpr std::string_view kResultsSchemaLine = "# numastream-results v1";
inline constexpr std::string_view kResultsHeader =
    "machine,kernel,policy,strided,n_threads,active_nodes,elements_per_worker,stride,"
    "repetition,wall_seconds,bandwidth_mb_s,per_node_bandwidth_mb_s,latency_ns,"
    "bound_gb_s,efficiency,validation";

struct ResultRow {
  std::string machine;
  KernelKind kernel = KernelKind::Copy;
  PlacementPolicy policy = PlacementPolicy::LocalNode;
  bool strided = false;
  std::size_t n_threads = 0;
  std::size_t active_nodes = 0;
  std::size_t elements_per_worker = 0;
  std::size_t stride = 1;
  std::size_t repetition = 0;
  double wall_seconds = 0.0;
  double bandwidth_mb_s = 0.0;
  double per_node_bandwidth_mb_s = 0.0;
  std::optional<double> latency_ns;
  std::optional<double> bound_gb_s;
  std::optional<double> efficiency;
  bool validation = false;

  bool operator==(const ResultRow&) const = default;
};

/// One row per timed repetition of `result`, at full precision.
std::vector<ResultRow> to_rows(const RunResult& result,
                               const std::optional<TheoreticalModel>& model);

/// "%.6g".
std::string format_number(double value);

std::string format_row(const ResultRow& row);

/// Writes schema line, header and every repetition of every result.
/// Returns the number of data rows. Throws WriteFailed if the stream fails.
std::size_t emit_rows(std::span<const RunResult> results,
                      const std::optional<TheoreticalModel>& model, std::ostream& out);

/// Writes ResultRow values directly.
std::size_t emit_rows(std::span<const ResultRow> rows, std::ostream& out);

/// Reads a results file. Throws ParseError on schema or column mismatch.
std::vector<ResultRow> parse_rows(std::istream& in);

/// Per-cell text table: (n_threads, kernel, stride, policy) order, mean and
/// best bandwidth, mean latency where it applies, efficiency of the mean
/// against the model. Throws EmptyResults.
std::string summarize(std::span<const RunResult> results,
                      const std::optional<TheoreticalModel>& model);

/// Unstrided / Unstrided+non-NUMA / Strided / Strided+non-NUMA, with the
/// policy name appended for OS-placed runs.
std::string variant_label(bool strided, PlacementPolicy policy);

struct ManifestInfo {
  std::string tool_version;
  std::string topology_name;
  std::string results_file;
  bool fake_system = false;
  std::uint64_t seed = 0;
};

/// JSON run manifest: tool version, topology, results file and every cell's
/// RunConfig. Contains no timestamps, so identical runs give identical files.
std::string manifest_text(const ManifestInfo& info, std::span<const RunConfig> cells);

/// Writes `content` to `path`. Throws WriteFailed.
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace numastream
