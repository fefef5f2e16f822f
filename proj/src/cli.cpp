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

#include "numastream/cli.hpp"

#include <algorithm>
#include <charconv>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "numastream/errors.hpp"
#include "numastream/placement.hpp"
#include "numastream/preset.hpp"
#include "numastream/report.hpp"

#ifndef NUMASTREAM_VERSION
#define NUMASTREAM_VERSION "0.0.0"
#endif

namespace numastream {

SweepSpec default_sweep(const MachineTopology& topology) {
  SweepSpec sweep;
  const std::size_t nodes = topology.total_nodes();
  const std::size_t cores = topology.total_cores();
  sweep.threads.push_back(1);
  for (std::size_t n = nodes; n <= cores; n += nodes) {
    if (n != 1) sweep.threads.push_back(n);
  }
  sweep.kernels.assign(kAllKernels.begin(), kAllKernels.end());
  sweep.policies.push_back(PlacementPolicy::LocalNode);
  if (topology.packages.size() > 1) sweep.policies.push_back(PlacementPolicy::RemotePackage);
  sweep.strides = {1, std::max<std::size_t>(topology.cache_line_bytes / sizeof(double), 1)};
  return sweep;
}

std::vector<RunConfig> expand_sweep(const SweepSpec& sweep, const RunConfig& base) {
  std::vector<RunConfig> cells;
  for (std::size_t threads : sweep.threads) {
    for (KernelKind kernel : sweep.kernels) {
      for (std::size_t stride : sweep.strides) {
        for (PlacementPolicy policy : sweep.policies) {
          RunConfig cell = base;
          cell.n_threads = threads;
          cell.kernel = kernel;
          cell.stride = stride;
          cell.policy = policy;
          cells.push_back(cell);
        }
      }
    }
  }
  return cells;
}

std::vector<std::size_t> parse_thread_list(const std::string& text) {
  std::vector<std::size_t> threads;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
    if (item.empty() || ec != std::errc{} || ptr != item.data() + item.size() || value == 0) {
      throw InvalidConfig("bad thread count '" + item + "' in '" + text + "'");
    }
    threads.push_back(value);
  }
  if (threads.empty()) throw InvalidConfig("empty thread list");
  return threads;
}

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

std::string error_kind(const std::exception& error) {
  if (dynamic_cast<const SinglePackage*>(&error)) return "SinglePackage";
  if (dynamic_cast<const TooManyThreads*>(&error)) return "TooManyThreads";
  if (dynamic_cast<const PinFailed*>(&error)) return "PinFailed";
  if (dynamic_cast<const AllocationFailed*>(&error)) return "AllocationFailed";
  if (dynamic_cast<const ArraysFitInCache*>(&error)) return "ArraysFitInCache";
  if (dynamic_cast<const ParseError*>(&error)) return "ParseError";
  if (dynamic_cast<const InvariantViolation*>(&error)) return "InvariantViolation";
  if (dynamic_cast<const InvalidConfig*>(&error)) return "InvalidConfig";
  if (dynamic_cast<const WriteFailed*>(&error)) return "WriteFailed";
  if (dynamic_cast<const TopologyUnavailable*>(&error)) return "TopologyUnavailable";
  return "Error";
}

struct MachineSource {
  std::string preset;
  std::string topology_file;
};

MachinePreset resolve_machine(const MachineSource& source, std::ostream& err) {
  if (!source.preset.empty()) return load_named_preset(source.preset);
  if (!source.topology_file.empty()) return load_preset_file(source.topology_file);
  auto discovery = discover_or_fallback();
  if (discovery.warning) err << "warning: " << *discovery.warning << "\n";
  return {std::move(discovery.topology), std::nullopt};
}

void add_machine_options(CLI::App& command, MachineSource& source) {
  auto* preset = command.add_option("--preset", source.preset,
                                    "Bundled machine preset (amd-r815, intel-qssc-s4r)");
  auto* file = command.add_option("--topology", source.topology_file, "Machine preset file");
  preset->excludes(file);
}

std::string per_label(std::size_t count, const char* unit, bool uniform) {
  return uniform ? std::to_string(count) + " per " + unit : std::string("varies per ") + unit;
}

void print_topology(const MachineTopology& topology, std::ostream& out) {
  const std::size_t packages = topology.packages.size();
  const std::size_t nodes_per = topology.packages.front().nodes.size();
  const std::size_t cores_per = topology.packages.front().nodes.front().cores.size();
  bool uniform_nodes = true;
  bool uniform_cores = true;
  for (const auto& package : topology.packages) {
    uniform_nodes = uniform_nodes && package.nodes.size() == nodes_per;
    for (const auto& node : package.nodes) {
      uniform_cores = uniform_cores && node.cores.size() == cores_per;
    }
  }
  char line[128];
  out << "Topology: " << topology.name << "\n";
  std::snprintf(line, sizeof(line), "%-10s | %-18s | %s\n", "Component", "Hierarchy", "# Total");
  out << line;
  std::snprintf(line, sizeof(line), "%-10s | %-18s | %zu\n", "Processor",
                per_label(packages, "machine", true).c_str(), packages);
  out << line;
  std::snprintf(line, sizeof(line), "%-10s | %-18s | %zu\n", "Node",
                per_label(nodes_per, "processor", uniform_nodes).c_str(), topology.total_nodes());
  out << line;
  std::snprintf(line, sizeof(line), "%-10s | %-18s | %zu\n", "Core",
                per_label(cores_per, "node", uniform_cores).c_str(), topology.total_cores());
  out << line;
  out << "Cache line: " << topology.cache_line_bytes << " bytes\n";
  out << "L3 per node: " << topology.l3_bytes_per_node << " bytes\n";
}

struct RunOptions {
  MachineSource machine;
  std::string kernel = "copy";
  std::string threads = "1";
  std::size_t stride = 1;
  std::string policy = "local";
  std::size_t elements = 0;
  std::size_t reps = 10;
  std::size_t warmup = 1;
  std::string output = "numastream-results.csv";
  std::uint64_t seed = 0;
  bool sweep = false;
  bool dry_run = false;
  bool fake_system = false;
  bool allow_small_arrays = false;
};

int cmd_run(const RunOptions& options, const CLI::App& command, std::ostream& out,
            std::ostream& err, SystemControl* injected) {
  const MachinePreset machine = resolve_machine(options.machine, err);
  const MachineTopology& topology = machine.topology;

  RunConfig base;
  base.elements_per_worker =
      options.elements != 0 ? options.elements : default_elements(topology);
  base.repetitions = options.reps;
  base.warmup_reps = options.warmup;
  base.allow_small_arrays = options.allow_small_arrays;

  SweepSpec sweep;
  if (options.sweep) sweep = default_sweep(topology);
  const auto given = [&](const char* flag) { return command.count(flag) > 0; };
  if (!options.sweep || given("--kernel")) {
    sweep.kernels.clear();
    if (options.kernel == "all") {
      sweep.kernels.assign(kAllKernels.begin(), kAllKernels.end());
    } else {
      sweep.kernels.push_back(*parse_kernel(options.kernel));
    }
  }
  if (!options.sweep || given("--threads")) sweep.threads = parse_thread_list(options.threads);
  if (!options.sweep || given("--policy")) sweep.policies = {*parse_policy(options.policy)};
  if (!options.sweep || given("--stride")) sweep.strides = {options.stride};

  const auto cells = expand_sweep(sweep, base);
  for (const auto& cell : cells) {
    validate_config(cell, topology);
    build_plan(topology, cell.policy, cell.n_threads);
  }

  if (options.dry_run) {
    out << "machine " << topology.name << ": " << cells.size() << " cells\n";
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto& cell = cells[i];
      out << "cell " << i << ": kernel=" << to_string(cell.kernel)
          << " threads=" << cell.n_threads << " stride=" << cell.stride
          << " policy=" << to_string(cell.policy) << " elements=" << cell.elements_per_worker
          << " reps=" << cell.repetitions << " warmup=" << cell.warmup_reps << "\n";
    }
    return kExitOk;
  }

  std::unique_ptr<SystemControl> owned;
  SystemControl* system = injected;
  if (system == nullptr) {
    if (options.fake_system) {
      owned = std::make_unique<RecordingSystem>(options.seed);
    } else {
      owned = std::make_unique<LinuxSystem>();
    }
    system = owned.get();
  }

  std::vector<RunResult> results;
  results.reserve(cells.size());
  bool all_valid = true;
  for (const auto& cell : cells) {
    results.push_back(execute(cell, topology, *system));
    if (!results.back().validated) {
      all_valid = false;
      err << "validation failed for " << to_string(cell.kernel) << " threads="
          << cell.n_threads << " stride=" << cell.stride << " policy="
          << to_string(cell.policy) << ": " << results.back().validation_message << "\n";
    }
  }

  std::ostringstream csv;
  const std::size_t rows = emit_rows(std::span<const RunResult>(results), machine.model, csv);
  write_text_file(options.output, csv.str());
  ManifestInfo info{NUMASTREAM_VERSION, topology.name,
                    std::filesystem::path(options.output).filename().string(),
                    options.fake_system, options.seed};
  write_text_file(options.output + ".manifest.json",
                  manifest_text(info, std::span<const RunConfig>(cells)));

  out << summarize(std::span<const RunResult>(results), machine.model);
  out << "wrote " << rows << " rows to " << options.output << "\n";
  return all_valid ? kExitOk : kExitFailure;
}

int cmd_topology(const MachineSource& source, std::ostream& out, std::ostream& err) {
  const MachinePreset machine = resolve_machine(source, err);
  print_topology(machine.topology, out);
  if (machine.model) {
    out << "Bandwidth (GB/s): local " << format_number(machine.model->local_gb_s);
    if (machine.model->same_package_gb_s) {
      out << ", same package " << format_number(*machine.model->same_package_gb_s);
    }
    if (machine.model->cross_package_gb_s) {
      out << ", other package " << format_number(*machine.model->cross_package_gb_s);
    }
    out << "\n";
  }
  return kExitOk;
}

int cmd_validate_preset(const MachineSource& source, const std::string& file,
                        std::ostream& out) {
  MachinePreset machine;
  if (!file.empty()) {
    machine = load_preset_file(file);
  } else if (!source.preset.empty() || !source.topology_file.empty()) {
    std::ostringstream ignored;
    machine = resolve_machine(source, ignored);
  } else {
    throw InvalidConfig("validate-preset needs a FILE, --preset or --topology");
  }
  out << "ok: " << machine.topology.name << " (" << machine.topology.packages.size()
      << " packages, " << machine.topology.total_nodes() << " nodes, "
      << machine.topology.total_cores() << " cores"
      << (machine.model ? ", with bandwidth model" : "") << ")\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            SystemControl* system) {
  CLI::App app{"NUMA-aware STREAM memory benchmark", "numastream"};
  app.require_subcommand(1);
  app.set_version_flag("--version", NUMASTREAM_VERSION);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Run one cell, a list of cells, or a sweep");
  add_machine_options(*run_cmd, run.machine);
  run_cmd->add_option("--kernel", run.kernel, "copy|scale|sum|triad|all")
      ->check(CLI::IsMember({"copy", "scale", "sum", "triad", "all"}));
  run_cmd->add_option("--threads", run.threads, "Thread count or comma-separated list");
  run_cmd->add_option("--stride", run.stride, "Element stride (8 = one 64-byte line)")
      ->check(CLI::Range(std::size_t{1}, kMaxStride));
  run_cmd->add_option("--policy", run.policy, "local|remote-package|default")
      ->check(CLI::IsMember({"local", "remote-package", "default"}));
  run_cmd->add_option("--elements", run.elements, "Elements per array per worker")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--reps", run.reps, "Timed repetitions")->check(CLI::PositiveNumber);
  run_cmd->add_option("--warmup", run.warmup, "Untimed warmup repetitions");
  run_cmd->add_option("--output", run.output, "Results CSV path");
  run_cmd->add_option("--seed", run.seed, "Seed for the simulated clock of --fake-system");
  run_cmd->add_flag("--sweep", run.sweep, "Run the full experiment grid");
  run_cmd->add_flag("--dry-run", run.dry_run, "Print the cell grid without running");
  run_cmd->add_flag("--fake-system", run.fake_system,
                    "Use the recording fake instead of the OS");
  run_cmd->add_flag("--allow-small-arrays", run.allow_small_arrays,
                    "Allow arrays that fit in one node's L3");

  MachineSource topo;
  auto* topo_cmd = app.add_subcommand("topology", "Print the machine topology");
  add_machine_options(*topo_cmd, topo);

  MachineSource validate;
  std::string validate_file;
  auto* validate_cmd = app.add_subcommand("validate-preset", "Check a preset file");
  add_machine_options(*validate_cmd, validate);
  validate_cmd->add_option("file", validate_file, "Preset file");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << NUMASTREAM_VERSION << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& error) {
    err << "usage error: " << error.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run, *run_cmd, out, err, system);
    if (*topo_cmd) return cmd_topology(topo, out, err);
    if (*validate_cmd) return cmd_validate_preset(validate, validate_file, out);
  } catch (const InvalidConfig& error) {
    err << "usage error: " << error.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& error) {
    err << "error [" << error_kind(error) << "]: " << error.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace numastream
