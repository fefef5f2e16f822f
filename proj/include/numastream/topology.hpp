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
#include <optional>
#include <string>
#include <vector>

namespace numastream {

using CoreId = int;
using NodeId = int;
using PackageId = int;

struct NodeInfo {
  NodeId node_id = 0;
  std::vector<CoreId> cores;

  bool operator==(const NodeInfo&) const = default;
};

struct PackageInfo {
  PackageId package_id = 0;
  std::vector<NodeInfo> nodes;

  bool operator==(const PackageInfo&) const = default;
};

/// Package -> node -> core hierarchy of one machine. Immutable once built;
/// safe to share between threads.
struct MachineTopology {
  std::string name;
  std::vector<PackageInfo> packages;
  std::size_t cache_line_bytes = 64;
  std::size_t l3_bytes_per_node = 0;

  std::size_t total_cores() const noexcept;
  std::size_t total_nodes() const noexcept;

  /// Package owning `node`; nullopt when the node is unknown.
  std::optional<PackageId> package_of(NodeId node) const noexcept;
  std::optional<NodeId> node_of(CoreId core) const noexcept;
  const NodeInfo* find_node(NodeId node) const noexcept;

  bool operator==(const MachineTopology&) const = default;
};

/// Throws InvariantViolation naming the first broken invariant.
void check_invariants(const MachineTopology& topology);

/// One pinning slot: the core a worker runs on plus where that core lives.
struct CoreSlot {
  CoreId core = 0;
  NodeId node = 0;
  PackageId package = 0;

  bool operator==(const CoreSlot&) const = default;
};

/// Nodes in sparse-fill order: node 0 of every package first (packages in
/// listed order), then node 1 of every package that has one, and so on.
std::vector<CoreSlot> node_visit_order(const MachineTopology& topology);

/// Cores for `n_threads` workers, filling one core per node round-robin
/// (in node_visit_order) before any node receives a second worker.
/// Throws TooManyThreads when n_threads exceeds the core count.
std::vector<CoreSlot> sparse_pin_order(const MachineTopology& topology,
                                       std::size_t n_threads);

/// Distinct nodes used by sparse_pin_order; min(n_threads, node count).
std::size_t active_nodes(const MachineTopology& topology, std::size_t n_threads);

/// One package, one node (id 0) holding cores 0..n_cores-1.
MachineTopology single_node_topology(std::size_t n_cores,
                                     std::string name = "single-node");

/// Reads the live hierarchy below `sysfs_root` (normally /sys):
///   devices/system/node/node*/cpulist
///   devices/system/cpu/cpu*/topology/physical_package_id
///   devices/system/cpu/cpu*/cache/index0/coherency_line_size
///   devices/system/cpu/cpu*/cache/index*/{level,size}   (L3 size)
/// Throws TopologyUnavailable when the node directory is missing or empty.
MachineTopology discover(const std::filesystem::path& sysfs_root = "/sys");

struct Discovery {
  MachineTopology topology;
  std::optional<std::string> warning;  // set when the fallback was used
};

/// discover(), or a single-node topology over hardware_concurrency() cores
/// when discovery is unsupported.
Discovery discover_or_fallback(const std::filesystem::path& sysfs_root = "/sys");

/// Parses a Linux cpulist such as "0-5,12,14-15".
std::vector<int> parse_cpulist(const std::string& text);

}  // namespace numastream
