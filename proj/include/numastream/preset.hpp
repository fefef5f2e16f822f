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

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "numastream/model.hpp"
#include "numastream/topology.hpp"

namespace numastream {

/// A machine description file: topology plus, optionally, the theoretical
/// bandwidth model for that machine.
///
/// Preset files are JSON:
///
///   {
///     "schema": "numastream-preset/1",
///     "name": "amd-r815",
///     "cache_line_bytes": 64,
///     "l3_bytes_per_node": 6291456,
///     "packages": [
///       {"id": 0, "nodes": [{"id": 0, "cores": [0, 1, 2, 3, 4, 5]}, ...]},
///       ...
///     ],
///     "model": {                       // optional
///       "local_gb_s": 21.3,
///       "same_package_gb_s": 19.2,     // optional
///       "cross_package_gb_s": 6.4      // optional
///     }
///   }
struct MachinePreset {
  MachineTopology topology;
  std::optional<TheoreticalModel> model;

  bool operator==(const MachinePreset&) const = default;
};

inline constexpr std::string_view kPresetSchema = "numastream-preset/1";

/// Throws ParseError (with line and field) or InvariantViolation.
MachinePreset load_preset(std::string_view text);
MachinePreset load_preset_file(const std::filesystem::path& path);

std::string serialize_preset(const MachinePreset& preset);

/// Directory holding the bundled presets, honoring NUMASTREAM_PRESET_DIR.
std::filesystem::path preset_directory();

/// Resolves a bundled preset name ("amd-r815") to its file and loads it.
MachinePreset load_named_preset(std::string_view name);

}  // namespace numastream
