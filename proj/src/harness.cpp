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

#include "numastream/harness.hpp"

#include <algorithm>
#include <atomic>
#include <barrier>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

#include "numastream/errors.hpp"
#include "numastream/kernels.hpp"
#include "numastream/placement.hpp"

namespace numastream {

std::uint64_t bytes_moved(KernelKind kernel, std::uint64_t elements_touched) {
  switch (kernel) {
    case KernelKind::Copy:
    case KernelKind::Scale:
      return 2 * sizeof(double) * elements_touched;
    case KernelKind::Sum:
    case KernelKind::Triad:
      return 3 * sizeof(double) * elements_touched;
  }
  return 0;
}

double bandwidth_mb_s(double total_bytes, double wall_seconds) {
  if (!(wall_seconds > 0.0)) {
    throw NonPositiveTime("wall time must be > 0, got " + std::to_string(wall_seconds));
  }
  return total_bytes / (1e6 * wall_seconds);
}

double latency_ns(double wall_seconds, std::uint64_t line_accesses_per_worker,
                  std::size_t stride, std::size_t cache_line_bytes) {
  if (stride * sizeof(double) != cache_line_bytes) {
    throw NotStrided("latency needs one access per cache line (stride " +
                     std::to_string(cache_line_bytes / sizeof(double)) + "), got stride " +
                     std::to_string(stride));
  }
  if (!(wall_seconds > 0.0)) {
    throw NonPositiveTime("wall time must be > 0, got " + std::to_string(wall_seconds));
  }
  return 1e9 * wall_seconds / static_cast<double>(line_accesses_per_worker);
}

Summary summarize_samples(std::span<const double> samples) {
  Summary summary;
  if (samples.empty()) return summary;
  summary.best = *std::max_element(samples.begin(), samples.end());
  summary.mean = std::accumulate(samples.begin(), samples.end(), 0.0) /
                 static_cast<double>(samples.size());
  if (samples.size() > 1) {
    double squares = 0.0;
    for (double sample : samples) squares += (sample - summary.mean) * (sample - summary.mean);
    summary.stddev = std::sqrt(squares / static_cast<double>(samples.size() - 1));
  }
  return summary;
}

std::size_t default_elements(const MachineTopology& topology) {
  std::size_t elements = std::size_t{1} << 20;
  while (3 * sizeof(double) * elements <= 4 * topology.l3_bytes_per_node) elements *= 2;
  return elements;
}

void validate_config(const RunConfig& config, const MachineTopology& topology) {
  if (config.n_threads == 0) throw InvalidConfig("thread count must be >= 1");
  if (config.elements_per_worker == 0) throw InvalidConfig("element count must be >= 1");
  if (config.repetitions == 0) throw InvalidConfig("repetitions must be >= 1");
  if (config.stride == 0 || config.stride > kMaxStride) {
    throw InvalidConfig("stride must be in [1, " + std::to_string(kMaxStride) + "], got " +
                        std::to_string(config.stride));
  }
  const std::size_t footprint = 3 * sizeof(double) * config.elements_per_worker;
  if (!config.allow_small_arrays && footprint <= topology.l3_bytes_per_node) {
    throw ArraysFitInCache("three arrays of " + std::to_string(config.elements_per_worker) +
                           " doubles (" + std::to_string(footprint) +
                           " bytes) fit in the " + std::to_string(topology.l3_bytes_per_node) +
                           "-byte L3 of one node; use more elements or allow small arrays");
  }
}

namespace {

struct WorkerSlot {
  std::exception_ptr error;
  double checksum = 0.0;
  bool validated = false;
  std::string validation_message;
  double max_relative_error = 0.0;
};

// Destination check for the timed kernel, then a fresh validation cycle.
void validate_worker(const RunConfig& config, const WorkerArrays& arrays, WorkerSlot& slot) {
  const double steady = kernel_steady_value(config.kernel, config.scalar);
  for (std::size_t i = 0; i < arrays.n_elements(); ++i) {
    const double expected = i % config.stride == 0 ? steady : kInitA;
    if (arrays.a[i] != expected) {
      slot.validation_message = "kernel " + std::string(to_string(config.kernel)) +
                                " left a[" + std::to_string(i) + "] = " +
                                std::to_string(arrays.a[i]) + ", expected " +
                                std::to_string(expected);
      return;
    }
  }
  init_arrays(arrays);
  try {
    const auto check = verify_cycle(arrays, {config.scalar, config.stride}, 1);
    slot.max_relative_error = check.max_relative_error;
    slot.validated = true;
  } catch (const ValidationFailed& failure) {
    slot.validation_message = failure.what();
  }
}

}  // namespace

RunResult execute(const RunConfig& config, const MachineTopology& topology,
                  SystemControl& system) {
  validate_config(config, topology);
  const PlacementPlan plan = build_plan(topology, config.policy, config.n_threads);
  const std::size_t n_workers = plan.entries.size();
  const std::size_t total_reps = config.warmup_reps + config.repetitions;
  const KernelParams params{config.scalar, config.stride};

  std::vector<WorkerSlot> slots(n_workers);
  Turnstile turnstile;
  std::atomic<bool> abort{false};
  // Coordinator plus workers. Phases: setup, go/no-go, then start and finish
  // of every repetition, then release into validation.
  std::barrier sync(static_cast<std::ptrdiff_t>(n_workers + 1));

  std::vector<std::uint64_t> start_ns(config.repetitions);
  std::vector<std::uint64_t> end_ns(config.repetitions);
  {
    std::vector<std::jthread> workers;
    workers.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) {
      workers.emplace_back([&, w] {
        WorkerSlot& slot = slots[w];
        WorkerMemory memory;
        turnstile.wait_turn(w);
        try {
          memory = place_worker(plan.entries[w], config.elements_per_worker, system);
          init_arrays(memory.arrays());
        } catch (...) {
          slot.error = std::current_exception();
        }
        turnstile.pass();

        sync.arrive_and_wait();  // setup done
        sync.arrive_and_wait();  // go/no-go decided
        if (abort.load()) return;

        const WorkerArrays arrays = memory.arrays();
        for (std::size_t rep = 0; rep < total_reps; ++rep) {
          sync.arrive_and_wait();
          run_kernel(config.kernel, arrays, params);
          sync.arrive_and_wait();
        }
        sync.arrive_and_wait();  // timing over

        slot.checksum = checksum(arrays.a, config.stride);
        validate_worker(config, arrays, slot);
      });
    }

    sync.arrive_and_wait();
    for (const auto& slot : slots) {
      if (slot.error) abort.store(true);
    }
    sync.arrive_and_wait();
    if (!abort.load()) {
      for (std::size_t rep = 0; rep < total_reps; ++rep) {
        const bool timed = rep >= config.warmup_reps;
        sync.arrive_and_wait();
        if (timed) start_ns[rep - config.warmup_reps] = system.monotonic_ns();
        sync.arrive_and_wait();
        if (timed) end_ns[rep - config.warmup_reps] = system.monotonic_ns();
      }
      sync.arrive_and_wait();
    }
  }
  for (const auto& slot : slots) {
    if (slot.error) std::rethrow_exception(slot.error);
  }

  RunResult result;
  result.config = config;
  result.machine = topology.name;
  result.cache_line_bytes = topology.cache_line_bytes;
  result.active_nodes = active_nodes(topology, config.n_threads);
  result.elements_touched_per_worker = touched_elements(config.elements_per_worker, config.stride);
  result.bytes_per_worker = bytes_moved(config.kernel, result.elements_touched_per_worker);

  for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
    // Guard against a clock that did not advance.
    const std::uint64_t elapsed = std::max<std::uint64_t>(end_ns[rep] - start_ns[rep], 1);
    const double seconds = static_cast<double>(elapsed) * 1e-9;
    result.wall_seconds.push_back(seconds);
    result.bandwidth_mb_s.push_back(
        bandwidth_mb_s(static_cast<double>(result.total_bytes()), seconds));
    if (result.latency_applicable()) {
      result.latency_ns.push_back(latency_ns(seconds, result.elements_touched_per_worker,
                                             config.stride, topology.cache_line_bytes));
    }
  }
  result.bandwidth = summarize_samples(result.bandwidth_mb_s);
  if (result.latency_applicable()) {
    Summary latency = summarize_samples(result.latency_ns);
    latency.best = *std::min_element(result.latency_ns.begin(), result.latency_ns.end());
    result.latency = latency;
  }

  result.validated = true;
  for (const auto& slot : slots) {
    result.checksum += slot.checksum;
    result.max_relative_error = std::max(result.max_relative_error, slot.max_relative_error);
    if (!slot.validated && result.validated) {
      result.validated = false;
      result.validation_message = slot.validation_message;
    }
  }
  return result;
}

}  // namespace numastream
