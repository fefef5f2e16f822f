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
#include <optional>

#include "numastream/kinds.hpp"

namespace numastream {

/// Vendor-rated bandwidth between one node and the rest of the machine, in
/// GB/s (10^9 bytes per second).
struct TheoreticalModel {
  double local_gb_s = 0.0;
  std::optional<double> same_package_gb_s;  // absent with one node per package
  std::optional<double> cross_package_gb_s;

  bool operator==(const TheoreticalModel&) const = default;
};

/// Throws InvariantViolation unless every present value is > 0.
void check_model(const TheoreticalModel& model);

/// Per-node upper bound for a placement policy. OsDefault uses the local
/// value, an optimistic denominator.
/// Throws MissingLinkClass for RemotePackage without a cross-package value.
double bound_per_node(const TheoreticalModel& model, PlacementPolicy policy);

double per_node_bandwidth(double total_mb_s, std::size_t active_nodes);

/// measured / bound with both in MB/s. Throws NonPositiveBound.
double efficiency(double measured_mb_s, double bound_gb_s);

/// Efficiencies above 1 can only come from cache hits; callers flag them.
inline bool exceeds_bound(double efficiency_ratio) noexcept {
  return efficiency_ratio > 1.0;
}

}  // namespace numastream
