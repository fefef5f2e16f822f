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

#include "numastream/kinds.hpp"

namespace numastream {

std::string_view to_string(KernelKind kind) noexcept {
  switch (kind) {
    case KernelKind::Copy: return "copy";
    case KernelKind::Scale: return "scale";
    case KernelKind::Sum: return "sum";
    case KernelKind::Triad: return "triad";
  }
  return "?";
}

std::string_view to_string(PlacementPolicy policy) noexcept {
  switch (policy) {
    case PlacementPolicy::LocalNode: return "local";
    case PlacementPolicy::RemotePackage: return "remote-package";
    case PlacementPolicy::OsDefault: return "default";
  }
  return "?";
}

std::optional<KernelKind> parse_kernel(std::string_view text) noexcept {
  for (auto kind : kAllKernels) {
    if (to_string(kind) == text) return kind;
  }
  return std::nullopt;
}

std::optional<PlacementPolicy> parse_policy(std::string_view text) noexcept {
  for (auto policy : kAllPolicies) {
    if (to_string(policy) == text) return policy;
  }
  return std::nullopt;
}

}  // namespace numastream
