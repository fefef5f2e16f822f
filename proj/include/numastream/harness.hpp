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
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "numastream/kinds.hpp"
#include "numastream/system_control.hpp"
#include "numastream/topology.hpp"

namespace numastream {

/// One benchmark cell.
struct RunConfig {
  KernelKind kernel = KernelKind::Copy;
  std::size_t n_threads = 1;
  std::size_t elements_per_worker = 0;
  std::size_t stride = 1;
  PlacementPolicy policy = PlacementPolicy::LocalNode;
  std::size_t repetitions = 10;
  std::size_t warmup_reps = 1;
  double scalar = 3.0;
  /// Permit a, b and c together to fit within one node's L3.
  bool allow_small_arrays = false;

  bool operator==(const RunConfig&) const = default;
};

struct Summary {
  double best = 0.0;    // max for bandwidth, min for latency
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for a single sample
};

struct RunResult {
  RunConfig config;
  std::string machine;
  std::size_t cache_line_bytes = 64;
  std::size_t active_nodes = 0;
  std::size_t elements_touched_per_worker = 0;
  std::uint64_t bytes_per_worker = 0;  // per repetition

  std::vector<double> wall_seconds;    // one per timed repetition
  std::vector<double> bandwidth_mb_s;
  std::vector<double> latency_ns;      // empty unless latency_applicable()

  Summary bandwidth;
  std::optional<Summary> latency;

  bool validated = false;
  std::string validation_message;
  double max_relative_error = 0.0;
  double checksum = 0.0;

  bool strided() const noexcept { return config.stride > 1; }
  bool latency_applicable() const noexcept {
    return config.stride * sizeof(double) == cache_line_bytes;
  }
  std::uint64_t total_bytes() const noexcept {
    return bytes_per_worker * config.n_threads;
  }
};

/// 16 bytes per touched element for COPY/SCALE, 24 for SUM/TRIAD.
std::uint64_t bytes_moved(KernelKind kernel, std::uint64_t elements_touched);

/// total_bytes / (10^6 * wall_seconds). Throws NonPositiveTime.
double bandwidth_mb_s(double total_bytes, double wall_seconds);

/// 10^9 * wall_seconds / line_accesses_per_worker. Workers run concurrently,
/// so the divisor is the per-worker count, not the machine total.
/// Throws NotStrided unless stride * 8 == cache_line_bytes, NonPositiveTime
/// for wall_seconds <= 0.
double latency_ns(double wall_seconds, std::uint64_t line_accesses_per_worker,
                  std::size_t stride, std::size_t cache_line_bytes);

/// Best is the max of the samples. Requires a non-empty sample list.
Summary summarize_samples(std::span<const double> samples);

/// Smallest power-of-two element count for which three arrays exceed four
/// times the per-node L3 (at least 2^20).
std::size_t default_elements(const MachineTopology& topology);

/// Throws InvalidConfig for zero counts or a stride outside [1, 512], and
/// ArraysFitInCache when 3 * 8 * elements <= l3_bytes_per_node without
/// allow_small_arrays. Thread-count and policy checks happen in build_plan.
void validate_config(const RunConfig& config, const MachineTopology& topology);

/// Runs one cell: one pinned worker per thread, placement in worker order,
/// warmup repetitions untimed, then `repetitions` timed repetitions each
/// spanning barrier release to the last worker's finish. Validation runs
/// after the last clock read. Placement errors propagate; validation
/// failure is recorded in the result (validated = false).
RunResult execute(const RunConfig& config, const MachineTopology& topology,
                  SystemControl& system);

}  // namespace numastream
