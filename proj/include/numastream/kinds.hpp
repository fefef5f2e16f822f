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

#include <array>
#include <optional>
#include <string_view>

namespace numastream {

enum class KernelKind { Copy, Scale, Sum, Triad };

inline constexpr std::array<KernelKind, 4> kAllKernels = {
    KernelKind::Copy, KernelKind::Scale, KernelKind::Sum, KernelKind::Triad};

/// Where a worker's arrays live relative to the core it is pinned to.
enum class PlacementPolicy {
  LocalNode,      // memory on the worker's own node (NUMA-aware)
  RemotePackage,  // memory on a node of a different package (non-NUMA-aware)
  OsDefault,      // pinned, but the kernel chooses where pages land
};

inline constexpr std::array<PlacementPolicy, 3> kAllPolicies = {
    PlacementPolicy::LocalNode, PlacementPolicy::RemotePackage,
    PlacementPolicy::OsDefault};

std::string_view to_string(KernelKind kind) noexcept;
std::string_view to_string(PlacementPolicy policy) noexcept;

/// Accepts the lower-case CLI spellings ("copy", "remote-package", ...).
std::optional<KernelKind> parse_kernel(std::string_view text) noexcept;
std::optional<PlacementPolicy> parse_policy(std::string_view text) noexcept;

}  // namespace numastream
