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

// Acceptance suite: one line per criterion, PASS / FAIL / SKIP.
// Exit status is nonzero iff any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "numastream/harness.hpp"
#include "numastream/kernels.hpp"
#include "numastream/model.hpp"
#include "numastream/placement.hpp"
#include "numastream/preset.hpp"
#include "numastream/report.hpp"

using namespace numastream;
namespace fs = std::filesystem;

namespace {

enum class Status { Pass, Fail, Skip };

struct Outcome {
  Status status;
  std::string detail;
};

Outcome pass(std::string detail) { return {Status::Pass, std::move(detail)}; }
Outcome fail(std::string detail) { return {Status::Fail, std::move(detail)}; }
Outcome skip(std::string detail) { return {Status::Skip, std::move(detail)}; }

MachineTopology amd() { return load_named_preset("amd-r815").topology; }
MachineTopology intel() { return load_named_preset("intel-qssc-s4r").topology; }

double relative_difference(double x, double y) {
  if (x == y) return 0.0;
  return std::abs(x - y) / std::max(std::abs(x), std::abs(y));
}

// --- 1. kernel correctness -------------------------------------------------

// Element-wise replay of the validation cycle, independent of the library.
struct Replay {
  std::vector<double> a, b, c;
};

Replay replay_cycle(std::size_t n, double s, std::size_t stride, std::size_t iterations) {
  Replay r{std::vector<double>(n, 1.0), std::vector<double>(n, 2.0), std::vector<double>(n, 0.0)};
  for (std::size_t k = 0; k < iterations; ++k) {
    for (std::size_t i = 0; i < n; i += stride) r.c[i] = r.a[i];
    for (std::size_t i = 0; i < n; i += stride) r.b[i] = s * r.c[i];
    for (std::size_t i = 0; i < n; i += stride) r.c[i] = r.a[i] + r.b[i];
    for (std::size_t i = 0; i < n; i += stride) r.a[i] = r.b[i] + s * r.c[i];
  }
  return r;
}

Outcome kernel_correctness() {
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (std::size_t n : {std::size_t{1024}, std::size_t{1'000'003}}) {
    for (std::size_t stride : {std::size_t{1}, std::size_t{8}}) {
      std::vector<double> a(n), b(n), c(n);
      const WorkerArrays arrays{a, b, c};
      init_arrays(arrays);
      const auto check = verify_cycle(arrays, {3.0, stride}, 10);
      worst = std::max(worst, check.max_relative_error);
      const auto oracle = replay_cycle(n, 3.0, stride, 10);
      for (std::size_t i = 0; i < n; ++i) {
        worst = std::max({worst, relative_difference(a[i], oracle.a[i]),
                          relative_difference(b[i], oracle.b[i]),
                          relative_difference(c[i], oracle.c[i])});
      }
    }
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream detail;
  detail << "max relative error " << worst << " (limit 1e-13), " << seconds << " s (limit 5 s)";
  return worst <= 1e-13 && seconds < 5.0 ? pass(detail.str()) : fail(detail.str());
}

// --- 2. byte accounting ----------------------------------------------------

Outcome byte_accounting() {
  const std::map<KernelKind, std::uint64_t> per_element = {
      {KernelKind::Copy, 16}, {KernelKind::Scale, 16}, {KernelKind::Sum, 24}, {KernelKind::Triad, 24}};
  std::size_t checked = 0;
  for (const auto& [kind, bytes] : per_element) {
    for (std::size_t stride : {1u, 2u, 8u}) {
      for (std::size_t n : {1u, 7u, 1000u, 1001u, 1'000'000u, 1'000'003u}) {
        const std::uint64_t ceil = n / stride + (n % stride != 0 ? 1 : 0);
        std::vector<double> a(n), b(n), c(n);
        const auto touched = run_kernel(kind, {a, b, c}, {3.0, stride});
        if (touched != ceil || touched_elements(n, stride) != ceil) {
          return fail("touched count mismatch for n=" + std::to_string(n) +
                      " stride=" + std::to_string(stride));
        }
        if (bytes_moved(kind, touched) != bytes * ceil) {
          return fail(std::string(to_string(kind)) + " n=" + std::to_string(n) +
                      " stride=" + std::to_string(stride) + " wrong byte count");
        }
        ++checked;
      }
    }
  }
  return pass(std::to_string(checked) + " kernel/stride/size combinations exact");
}

// --- 3. sparse pinning -----------------------------------------------------

Outcome sparse_pinning() {
  for (const auto& [topology, node_count] :
       std::vector<std::pair<MachineTopology, std::size_t>>{{amd(), 8}, {intel(), 4}}) {
    for (std::size_t n = 1; n <= topology.total_cores(); ++n) {
      const auto slots = sparse_pin_order(topology, n);
      std::map<int, std::size_t> load;
      for (const auto& slot : slots) {
        // Round-robin: a node may take its k-th worker only once every node
        // holds k - 1.
        const std::size_t before = load[slot.node];
        for (const auto& package : topology.packages) {
          for (const auto& node : package.nodes) {
            if (load[node.node_id] < before) {
              return fail(topology.name + ": node " + std::to_string(slot.node) +
                          " doubled up while node " + std::to_string(node.node_id) +
                          " had fewer workers (n=" + std::to_string(n) + ")");
            }
          }
        }
        ++load[slot.node];
      }
      const std::size_t expected = std::min(n, node_count);
      const auto used = static_cast<std::size_t>(
          std::count_if(load.begin(), load.end(), [](const auto& kv) { return kv.second > 0; }));
      if (used != expected || active_nodes(topology, n) != expected) {
        return fail(topology.name + ": active nodes wrong at n=" + std::to_string(n));
      }
    }
  }
  return pass("amd-r815 n=1..48 -> min(n,8); intel-qssc-s4r n=1..32 -> min(n,4)");
}

// --- 4. placement protocol -------------------------------------------------

Outcome placement_protocol() {
  using Kind = RecordingSystem::CallKind;
  std::size_t plans = 0;
  for (const auto& topology : {amd(), intel()}) {
    for (auto policy : kAllPolicies) {
      for (std::size_t workers = 1; workers <= 8; ++workers) {
        const auto plan = build_plan(topology, policy, workers);
        RecordingSystem system;
        auto memory = apply_plan(plan, 4096, system);
        const auto calls = system.calls();
        if (calls.size() != 4 * workers) return fail("unexpected call count");
        for (std::size_t w = 0; w < workers; ++w) {
          const auto& pin = calls[4 * w];
          if (pin.kind != Kind::Pin || pin.argument != plan.entries[w].core) {
            return fail("worker " + std::to_string(w) + " did not pin first");
          }
          const auto pin_node = *topology.node_of(pin.argument);
          for (std::size_t k = 1; k <= 3; ++k) {
            const auto& alloc = calls[4 * w + k];
            if (alloc.thread != pin.thread) return fail("allocation on a different thread");
            switch (policy) {
              case PlacementPolicy::LocalNode:
                if (alloc.kind != Kind::AllocateOnNode || alloc.argument != pin_node) {
                  return fail("local-node memory not on the pin node");
                }
                break;
              case PlacementPolicy::RemotePackage:
                if (alloc.kind != Kind::AllocateOnNode ||
                    topology.package_of(alloc.argument) == topology.package_of(pin_node)) {
                  return fail("remote-package memory on the pin package");
                }
                break;
              case PlacementPolicy::OsDefault:
                if (alloc.kind != Kind::Allocate) return fail("os-default used node binding");
                break;
            }
          }
        }
        ++plans;
      }
    }
  }
  return pass(std::to_string(plans) + " plans (2 presets x 3 policies x 1..8 workers)");
}

// --- 5. theoretical model --------------------------------------------------

long tenths(double gb_s) { return std::lround(gb_s * 10.0); }

Outcome theoretical_model() {
  const auto amd_model = *load_named_preset("amd-r815").model;
  const auto intel_model = *load_named_preset("intel-qssc-s4r").model;
  const bool tables = amd_model.local_gb_s == 21.3 && amd_model.same_package_gb_s == 19.2 &&
                      amd_model.cross_package_gb_s == 6.4 && intel_model.local_gb_s == 17.1 &&
                      !intel_model.same_package_gb_s && intel_model.cross_package_gb_s == 25.6;
  constexpr long kEightBit = 64;  // 6.4 GB/s
  constexpr long kSixteenBit = 2 * kEightBit;
  const bool links = kSixteenBit == 128 &&
                     kSixteenBit + kEightBit == tenths(*amd_model.same_package_gb_s) &&
                     kEightBit == tenths(*amd_model.cross_package_gb_s);
  if (!tables) return fail("bundled model values differ from the vendor tables");
  if (!links) return fail("AMD link sums do not reproduce 19.2 / 6.4");
  return pass("AMD 21.3/19.2/6.4, Intel 17.1/25.6 GB/s; 12.8+6.4=19.2 and 6.4");
}

// --- 6. derived quantities -------------------------------------------------

Outcome derived_recomputation() {
  const auto preset = load_named_preset("amd-r815");
  double worst = 0.0;
  std::size_t rows_checked = 0;
  for (auto kernel : kAllKernels) {
    for (auto policy : kAllPolicies) {
      for (std::size_t stride : {1u, 8u}) {
        for (std::size_t threads : {1u, 5u, 16u}) {
          RunConfig config;
          config.kernel = kernel;
          config.policy = policy;
          config.stride = stride;
          config.n_threads = threads;
          config.elements_per_worker = 1001;
          config.repetitions = 3;
          config.allow_small_arrays = true;
          RecordingSystem system(threads * 31 + stride);
          const auto result = execute(config, preset.topology, system);
          if (!result.validated) return fail("validation failed: " + result.validation_message);
          const auto rows = to_rows(result, preset.model);
          const double touched = std::ceil(1001.0 / stride);
          const double per_index =
              kernel == KernelKind::Copy || kernel == KernelKind::Scale ? 16.0 : 24.0;
          const double bound = policy == PlacementPolicy::RemotePackage ? 6.4 : 21.3;
          for (std::size_t rep = 0; rep < rows.size(); ++rep) {
            const double wall = result.wall_seconds[rep];
            const double bw = threads * touched * per_index / (wall * 1e6);
            const double per_node = bw / std::min<double>(threads, 8);
            worst = std::max({worst, relative_difference(result.bandwidth_mb_s[rep], bw),
                              relative_difference(rows[rep].bandwidth_mb_s, bw),
                              relative_difference(rows[rep].per_node_bandwidth_mb_s, per_node),
                              relative_difference(*rows[rep].efficiency, per_node / (1000 * bound))});
            if (stride == 8) {
              worst = std::max(worst, relative_difference(*rows[rep].latency_ns, wall * 1e9 / touched));
            } else if (rows[rep].latency_ns) {
              return fail("unstrided row carries a latency");
            }
            ++rows_checked;
          }
        }
      }
    }
  }
  std::ostringstream detail;
  detail << rows_checked << " rows, max relative difference " << worst << " (limit 1e-9)";
  return worst <= 1e-9 ? pass(detail.str()) : fail(detail.str());
}

// --- 7. end-to-end determinism ---------------------------------------------

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Outcome end_to_end_determinism() {
  const fs::path dir = fs::current_path() / "acceptance_e2e";
  fs::create_directories(dir);
  std::vector<std::string> files;
  for (int run = 0; run < 2; ++run) {
    const auto output = (dir / ("results" + std::to_string(run) + ".csv")).string();
    fs::remove(output);
    const std::string command = std::string("\"") + NUMASTREAM_CLI_PATH +
                                "\" run --sweep --fake-system --preset amd-r815 --reps 2"
                                " --elements 4096 --allow-small-arrays --output \"" +
                                output + "\" > /dev/null";
    if (std::system(command.c_str()) != 0) return fail("CLI run " + std::to_string(run) + " failed");
    files.push_back(slurp(output));
  }
  if (files[0].empty() || files[0] != files[1]) return fail("results files differ between runs");

  std::istringstream in(files[0]);
  const auto rows = parse_rows(in);
  std::set<std::tuple<KernelKind, PlacementPolicy, std::size_t, std::size_t>> cells;
  std::set<std::size_t> threads;
  for (const auto& row : rows) {
    cells.insert({row.kernel, row.policy, row.stride, row.n_threads});
    threads.insert(row.n_threads);
  }
  const std::size_t expected = 4 * 2 * 2 * threads.size();
  if (threads != std::set<std::size_t>{1, 8, 16, 24, 32, 40, 48}) {
    return fail("unexpected thread list");
  }
  if (cells.size() != expected || rows.size() != 2 * expected) {
    return fail("expected " + std::to_string(expected) + " cells, got " +
                std::to_string(cells.size()));
  }
  return pass("byte-identical across 2 runs; " + std::to_string(cells.size()) +
              " cells = 4x2x2x7, " + std::to_string(rows.size()) + " rows");
}

// --- 8. hardware sanity (multi-node only) ----------------------------------

Outcome hardware_sanity() {
  const auto discovery = discover_or_fallback();
  const auto& topology = discovery.topology;
  if (discovery.warning || topology.total_nodes() < 2) {
    return skip("machine exposes " + std::to_string(topology.total_nodes()) +
                " NUMA node(s); needs >= 2");
  }
  LinuxSystem system;
  RunConfig config;
  config.kernel = KernelKind::Copy;
  config.n_threads = topology.total_cores();
  config.elements_per_worker = default_elements(topology);
  config.repetitions = 10;

  config.policy = PlacementPolicy::LocalNode;
  config.stride = 1;
  const auto unstrided = execute(config, topology, system);
  config.stride = topology.cache_line_bytes / sizeof(double);
  const auto strided_local = execute(config, topology, system);
  if (!unstrided.validated || !strided_local.validated) return fail("validation failed");

  const double ratio = unstrided.bandwidth.mean / strided_local.bandwidth.mean;
  std::ostringstream detail;
  detail << "unstrided/strided " << ratio << " (want [2, 16])";
  if (ratio < 2.0 || ratio > 16.0) return fail(detail.str());

  if (topology.packages.size() < 2) {
    detail << "; local vs remote skipped (single package)";
    return pass(detail.str());
  }
  config.policy = PlacementPolicy::RemotePackage;
  const auto strided_remote = execute(config, topology, system);
  if (!strided_remote.validated) return fail("validation failed");
  const double local = strided_local.bandwidth.mean;
  const double remote = strided_remote.bandwidth.mean;
  detail << "; strided local " << local << " MB/s vs remote " << remote
         << " MB/s (local >= 0.9 * remote)";
  return local >= 0.9 * remote ? pass(detail.str()) : fail(detail.str());
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"kernel correctness", kernel_correctness},
      {"byte accounting", byte_accounting},
      {"sparse pinning", sparse_pinning},
      {"placement protocol", placement_protocol},
      {"theoretical model", theoretical_model},
      {"derived-quantity recomputation", derived_recomputation},
      {"end-to-end determinism", end_to_end_determinism},
      {"hardware sanity", hardware_sanity},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception& error) {
      outcome = fail(std::string("exception: ") + error.what());
    }
    const char* tag = outcome.status == Status::Pass ? "PASS"
                      : outcome.status == Status::Skip ? "SKIP"
                                                       : "FAIL";
    std::printf("[%s] %-32s %s\n", tag, name.c_str(), outcome.detail.c_str());
    failures += outcome.status == Status::Fail;
  }
  std::printf("%d failure(s)\n", failures);
  return failures == 0 ? EXIT_SUCCESS : EXIT_FAILURE;
}
