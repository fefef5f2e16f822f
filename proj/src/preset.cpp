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

#include "numastream/preset.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "numastream/errors.hpp"

#ifndef NUMASTREAM_DEFAULT_PRESET_DIR
#define NUMASTREAM_DEFAULT_PRESET_DIR "presets"
#endif

namespace numastream {

using nlohmann::json;

namespace {

std::size_t line_of(std::string_view text, std::size_t byte_offset) {
  const auto end = std::min(byte_offset, text.size());
  return 1 + static_cast<std::size_t>(
                 std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(end), '\n'));
}

// Line on which a key first appears, for field diagnostics. Best effort.
std::size_t line_of_key(std::string_view text, std::string_view key) {
  const std::string quoted = "\"" + std::string(key) + "\"";
  const auto pos = text.find(quoted);
  return pos == std::string_view::npos ? 0 : line_of(text, pos);
}

template <typename T>
T required(const json& object, const char* key, const std::string& path,
           std::string_view text) {
  const std::string field = path.empty() ? key : path + "." + key;
  if (!object.is_object() || !object.contains(key)) {
    throw ParseError("missing field '" + field + "'", line_of_key(text, key), field);
  }
  try {
    return object.at(key).get<T>();
  } catch (const json::exception& error) {
    throw ParseError("field '" + field + "' has the wrong type: " + error.what(),
                     line_of_key(text, key), field);
  }
}

std::optional<double> optional_number(const json& object, const char* key,
                                      std::string_view text) {
  if (!object.contains(key) || object.at(key).is_null()) return std::nullopt;
  if (!object.at(key).is_number()) {
    throw ParseError(std::string("field 'model.") + key + "' must be a number",
                     line_of_key(text, key), std::string("model.") + key);
  }
  return object.at(key).get<double>();
}

}  // namespace

MachinePreset load_preset(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& error) {
    throw ParseError(std::string("preset is not valid JSON: ") + error.what(),
                     line_of(text, error.byte == 0 ? 0 : error.byte - 1), "");
  }
  if (!root.is_object()) throw ParseError("preset must be a JSON object", 1, "");

  const auto schema = required<std::string>(root, "schema", "", text);
  if (schema != kPresetSchema) {
    throw ParseError("unsupported preset schema '" + schema + "'",
                     line_of_key(text, "schema"), "schema");
  }

  MachinePreset preset;
  auto& topology = preset.topology;
  topology.name = required<std::string>(root, "name", "", text);
  topology.cache_line_bytes = required<std::size_t>(root, "cache_line_bytes", "", text);
  topology.l3_bytes_per_node = required<std::size_t>(root, "l3_bytes_per_node", "", text);

  const auto packages = required<json>(root, "packages", "", text);
  if (!packages.is_array()) {
    throw ParseError("field 'packages' must be an array", line_of_key(text, "packages"),
                     "packages");
  }
  for (std::size_t p = 0; p < packages.size(); ++p) {
    const std::string package_path = "packages[" + std::to_string(p) + "]";
    PackageInfo package;
    package.package_id = required<int>(packages[p], "id", package_path, text);
    const auto nodes = required<json>(packages[p], "nodes", package_path, text);
    if (!nodes.is_array()) {
      throw ParseError("field '" + package_path + ".nodes' must be an array",
                       line_of_key(text, "nodes"), package_path + ".nodes");
    }
    for (std::size_t n = 0; n < nodes.size(); ++n) {
      const std::string node_path = package_path + ".nodes[" + std::to_string(n) + "]";
      NodeInfo node;
      node.node_id = required<int>(nodes[n], "id", node_path, text);
      node.cores = required<std::vector<int>>(nodes[n], "cores", node_path, text);
      package.nodes.push_back(std::move(node));
    }
    topology.packages.push_back(std::move(package));
  }
  check_invariants(topology);

  if (root.contains("model") && !root.at("model").is_null()) {
    const auto& model_json = root.at("model");
    if (!model_json.is_object()) {
      throw ParseError("field 'model' must be an object", line_of_key(text, "model"),
                       "model");
    }
    TheoreticalModel model;
    model.local_gb_s = required<double>(model_json, "local_gb_s", "model", text);
    model.same_package_gb_s = optional_number(model_json, "same_package_gb_s", text);
    model.cross_package_gb_s = optional_number(model_json, "cross_package_gb_s", text);
    check_model(model);
    preset.model = model;
  }
  return preset;
}

MachinePreset load_preset_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open preset file " + path.string(), 0, "");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_preset(buffer.str());
}

std::string serialize_preset(const MachinePreset& preset) {
  const auto& topology = preset.topology;
  json root;
  root["schema"] = kPresetSchema;
  root["name"] = topology.name;
  root["cache_line_bytes"] = topology.cache_line_bytes;
  root["l3_bytes_per_node"] = topology.l3_bytes_per_node;
  json packages = json::array();
  for (const auto& package : topology.packages) {
    json nodes = json::array();
    for (const auto& node : package.nodes) {
      nodes.push_back({{"id", node.node_id}, {"cores", node.cores}});
    }
    packages.push_back({{"id", package.package_id}, {"nodes", nodes}});
  }
  root["packages"] = packages;
  if (preset.model) {
    json model;
    model["local_gb_s"] = preset.model->local_gb_s;
    if (preset.model->same_package_gb_s) {
      model["same_package_gb_s"] = *preset.model->same_package_gb_s;
    }
    if (preset.model->cross_package_gb_s) {
      model["cross_package_gb_s"] = *preset.model->cross_package_gb_s;
    }
    root["model"] = model;
  }
  return root.dump(2) + "\n";
}

std::filesystem::path preset_directory() {
  if (const char* dir = std::getenv("NUMASTREAM_PRESET_DIR"); dir && *dir) {
    return dir;
  }
  return NUMASTREAM_DEFAULT_PRESET_DIR;
}

MachinePreset load_named_preset(std::string_view name) {
  const auto path = preset_directory() / (std::string(name) + ".json");
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) {
    throw ParseError("no preset named '" + std::string(name) + "' in " +
                         preset_directory().string(),
                     0, "");
  }
  return load_preset_file(path);
}

}  // namespace numastream
