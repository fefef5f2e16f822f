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
#include <iosfwd>
#include <string>
#include <vector>

#include "numastream/harness.hpp"
#include "numastream/kinds.hpp"
#include "numastream/system_control.hpp"
#include "numastream/topology.hpp"

namespace numastream {

/// The experiment grid: every combination of the four lists is one cell.
struct SweepSpec {
  std::vector<std::size_t> threads;
  std::vector<KernelKind> kernels;
  std::vector<PlacementPolicy> policies;
  std::vector<std::size_t> strides;
};

/// 1, then every multiple of the node count up to the core count; all four
/// kernels; local and remote-package (local only on one-package machines);
/// strides 1 and one-cache-line.
SweepSpec default_sweep(const MachineTopology& topology);

/// Cells in (threads, kernel, stride, policy) order; other fields from
/// `base`.
std::vector<RunConfig> expand_sweep(const SweepSpec& sweep, const RunConfig& base);

/// Parses a thread list such as "1,8,16".
std::vector<std::size_t> parse_thread_list(const std::string& text);

/// Entry point behind the numastream binary. `args` excludes the program
/// name. When `system` is given it replaces both the Linux and the fake
/// system controls. Returns the process exit code: 0 on success, 1 on run or
/// validation failure, 2 on usage errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            SystemControl* system = nullptr);

}  // namespace numastream
