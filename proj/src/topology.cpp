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

#include "numastream/topology.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "numastream/errors.hpp"

namespace numastream {

namespace fs = std::filesystem;

std::size_t MachineTopology::total_cores() const noexcept {
  std::size_t total = 0;
  for (const auto& package : packages) {
    for (const auto& node : package.nodes) total += node.cores.size();
  }
  return total;
}

std::size_t MachineTopology::total_nodes() const noexcept {
  std::size_t total = 0;
  for (const auto& package : packages) total += package.nodes.size();
  return total;
}

std::optional<PackageId> MachineTopology::package_of(NodeId node) const noexcept {
  for (const auto& package : packages) {
    for (const auto& info : package.nodes) {
      if (info.node_id == node) return package.package_id;
    }
  }
  return std::nullopt;
}

std::optional<NodeId> MachineTopology::node_of(CoreId core) const noexcept {
  for (const auto& package : packages) {
    for (const auto& node : package.nodes) {
      if (std::find(node.cores.begin(), node.cores.end(), core) != node.cores.end()) {
        return node.node_id;
      }
    }
  }
  return std::nullopt;
}

const NodeInfo* MachineTopology::find_node(NodeId node) const noexcept {
  for (const auto& package : packages) {
    for (const auto& info : package.nodes) {
      if (info.node_id == node) return &info;
    }
  }
  return nullptr;
}

void check_invariants(const MachineTopology& topology) {
  if (topology.packages.empty()) {
    throw InvariantViolation("topology must have at least one package");
  }
  if (topology.cache_line_bytes < 8 ||
      (topology.cache_line_bytes & (topology.cache_line_bytes - 1)) != 0) {
    throw InvariantViolation("cache_line_bytes must be a power of two >= 8, got " +
                             std::to_string(topology.cache_line_bytes));
  }
  std::set<PackageId> package_ids;
  std::set<NodeId> node_ids;
  std::set<CoreId> core_ids;
  for (const auto& package : topology.packages) {
    if (!package_ids.insert(package.package_id).second) {
      throw InvariantViolation("duplicate package id " +
                               std::to_string(package.package_id));
    }
    if (package.nodes.empty()) {
      throw InvariantViolation("package " + std::to_string(package.package_id) +
                               " has no nodes");
    }
    for (const auto& node : package.nodes) {
      if (!node_ids.insert(node.node_id).second) {
        throw InvariantViolation("duplicate node id " + std::to_string(node.node_id));
      }
      if (node.cores.empty()) {
        throw InvariantViolation("node " + std::to_string(node.node_id) +
                                 " has no cores");
      }
      for (CoreId core : node.cores) {
        if (core < 0) {
          throw InvariantViolation("negative core id " + std::to_string(core));
        }
        if (!core_ids.insert(core).second) {
          throw InvariantViolation("duplicate core id " + std::to_string(core));
        }
      }
    }
  }
}

std::vector<CoreSlot> node_visit_order(const MachineTopology& topology) {
  std::vector<CoreSlot> order;
  std::size_t deepest = 0;
  for (const auto& package : topology.packages) {
    deepest = std::max(deepest, package.nodes.size());
  }
  for (std::size_t rank = 0; rank < deepest; ++rank) {
    for (const auto& package : topology.packages) {
      if (rank < package.nodes.size()) {
        const auto& node = package.nodes[rank];
        order.push_back({node.cores.front(), node.node_id, package.package_id});
      }
    }
  }
  return order;
}

std::vector<CoreSlot> sparse_pin_order(const MachineTopology& topology,
                                       std::size_t n_threads) {
  const std::size_t cores = topology.total_cores();
  if (n_threads == 0 || n_threads > cores) {
    throw TooManyThreads("requested " + std::to_string(n_threads) +
                         " threads but topology '" + topology.name + "' has " +
                         std::to_string(cores) + " cores");
  }
  const auto nodes = node_visit_order(topology);
  std::vector<CoreSlot> slots;
  slots.reserve(n_threads);
  // Pass k takes the k-th core of every node that still has one.
  for (std::size_t pass = 0; slots.size() < n_threads; ++pass) {
    for (const auto& slot : nodes) {
      const NodeInfo* node = topology.find_node(slot.node);
      if (pass < node->cores.size()) {
        slots.push_back({node->cores[pass], slot.node, slot.package});
        if (slots.size() == n_threads) break;
      }
    }
  }
  return slots;
}

std::size_t active_nodes(const MachineTopology& topology, std::size_t n_threads) {
  if (n_threads == 0 || n_threads > topology.total_cores()) {
    throw TooManyThreads("requested " + std::to_string(n_threads) +
                         " threads but topology '" + topology.name + "' has " +
                         std::to_string(topology.total_cores()) + " cores");
  }
  return std::min(n_threads, topology.total_nodes());
}

MachineTopology single_node_topology(std::size_t n_cores, std::string name) {
  MachineTopology topology;
  topology.name = std::move(name);
  NodeInfo node;
  node.node_id = 0;
  for (std::size_t i = 0; i < std::max<std::size_t>(n_cores, 1); ++i) {
    node.cores.push_back(static_cast<CoreId>(i));
  }
  topology.packages.push_back({0, {std::move(node)}});
  return topology;
}

std::vector<int> parse_cpulist(const std::string& text) {
  std::vector<int> cpus;
  std::stringstream stream(text);
  std::string range;
  while (std::getline(stream, range, ',')) {
    range.erase(std::remove_if(range.begin(), range.end(),
                               [](unsigned char ch) { return std::isspace(ch); }),
                range.end());
    if (range.empty()) continue;
    const auto dash = range.find('-');
    int first = 0;
    int last = 0;
    const auto parse = [&](std::string_view digits, int& out) {
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), out);
      if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
        throw TopologyUnavailable("malformed cpulist '" + text + "'");
      }
    };
    if (dash == std::string::npos) {
      parse(range, first);
      last = first;
    } else {
      parse(std::string_view(range).substr(0, dash), first);
      parse(std::string_view(range).substr(dash + 1), last);
    }
    if (last < first) throw TopologyUnavailable("malformed cpulist '" + text + "'");
    for (int cpu = first; cpu <= last; ++cpu) cpus.push_back(cpu);
  }
  return cpus;
}

namespace {

std::optional<std::string> read_line(const fs::path& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::string line;
  std::getline(in, line);
  return line;
}

std::optional<long> read_number(const fs::path& path) {
  auto line = read_line(path);
  if (!line) return std::nullopt;
  try {
    return std::stol(*line);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

// "6144K" / "24M" / "512" as used by cache/index*/size.
std::optional<std::size_t> parse_cache_size(const std::string& text) {
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{}) return std::nullopt;
  const std::string_view suffix(ptr, text.data() + text.size() - ptr);
  if (suffix.empty()) return value;
  if (suffix.front() == 'K') return value * 1024;
  if (suffix.front() == 'M') return value * 1024 * 1024;
  if (suffix.front() == 'G') return value * 1024 * 1024 * 1024;
  return std::nullopt;
}

int node_number(const fs::path& dir) {
  const auto name = dir.filename().string();
  int id = -1;
  std::from_chars(name.data() + 4, name.data() + name.size(), id);
  return id;
}

}  // namespace

MachineTopology discover(const fs::path& sysfs_root) {
  const fs::path node_root = sysfs_root / "devices/system/node";
  const fs::path cpu_root = sysfs_root / "devices/system/cpu";
  std::error_code ec;
  if (!fs::is_directory(node_root, ec)) {
    throw TopologyUnavailable("no NUMA node directory at " + node_root.string());
  }

  std::map<int, std::vector<int>> cpus_by_node;
  for (const auto& entry : fs::directory_iterator(node_root, ec)) {
    const auto name = entry.path().filename().string();
    if (name.rfind("node", 0) != 0 || name.size() <= 4 ||
        !std::isdigit(static_cast<unsigned char>(name[4]))) {
      continue;
    }
    auto list = read_line(entry.path() / "cpulist");
    if (!list) continue;
    auto cpus = parse_cpulist(*list);
    if (!cpus.empty()) cpus_by_node[node_number(entry.path())] = std::move(cpus);
  }
  if (cpus_by_node.empty()) {
    throw TopologyUnavailable("no NUMA node with online cpus under " +
                              node_root.string());
  }

  // Group nodes by the physical package of their first cpu.
  std::map<int, std::vector<int>> nodes_by_package;
  for (const auto& [node, cpus] : cpus_by_node) {
    const auto package = read_number(cpu_root / ("cpu" + std::to_string(cpus.front())) /
                                     "topology/physical_package_id");
    nodes_by_package[package.value_or(0)].push_back(node);
  }

  MachineTopology topology;
  topology.name = "discovered";
  for (const auto& [package_id, nodes] : nodes_by_package) {
    PackageInfo package;
    package.package_id = package_id;
    for (int node : nodes) package.nodes.push_back({node, cpus_by_node.at(node)});
    topology.packages.push_back(std::move(package));
  }

  const fs::path cache_dir = cpu_root / ("cpu" + std::to_string(cpus_by_node.begin()->second.front())) / "cache";
  if (auto line = read_number(cache_dir / "index0/coherency_line_size"); line && *line > 0) {
    topology.cache_line_bytes = static_cast<std::size_t>(*line);
  }
  for (int index = 0; index < 8; ++index) {
    const fs::path dir = cache_dir / ("index" + std::to_string(index));
    if (read_number(dir / "level").value_or(0) != 3) continue;
    if (auto size = read_line(dir / "size")) {
      topology.l3_bytes_per_node = parse_cache_size(*size).value_or(0);
    }
  }

  check_invariants(topology);
  return topology;
}

Discovery discover_or_fallback(const fs::path& sysfs_root) {
  try {
    return {discover(sysfs_root), std::nullopt};
  } catch (const TopologyUnavailable& error) {
    const auto cores = std::max(1u, std::thread::hardware_concurrency());
    return {single_node_topology(cores, "fallback"),
            std::string("topology discovery unavailable (") + error.what() +
                "); using a single-node topology with " + std::to_string(cores) +
                " cores"};
  }
}

}  // namespace numastream
