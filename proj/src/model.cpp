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

#include "numastream/model.hpp"

#include <string>

#include "numastream/errors.hpp"

namespace numastream {

void check_model(const TheoreticalModel& model) {
  if (!(model.local_gb_s > 0.0)) {
    throw InvariantViolation("model local_gb_s must be > 0");
  }
  if (model.same_package_gb_s && !(*model.same_package_gb_s > 0.0)) {
    throw InvariantViolation("model same_package_gb_s must be > 0");
  }
  if (model.cross_package_gb_s && !(*model.cross_package_gb_s > 0.0)) {
    throw InvariantViolation("model cross_package_gb_s must be > 0");
  }
}

double bound_per_node(const TheoreticalModel& model, PlacementPolicy policy) {
  switch (policy) {
    case PlacementPolicy::LocalNode:
    case PlacementPolicy::OsDefault:
      return model.local_gb_s;
    case PlacementPolicy::RemotePackage:
      if (!model.cross_package_gb_s) {
        throw MissingLinkClass("model has no cross-package bandwidth");
      }
      return *model.cross_package_gb_s;
  }
  throw MissingLinkClass("unknown placement policy");
}

double per_node_bandwidth(double total_mb_s, std::size_t active_nodes) {
  return total_mb_s / static_cast<double>(active_nodes);
}

double efficiency(double measured_mb_s, double bound_gb_s) {
  if (!(bound_gb_s > 0.0)) {
    throw NonPositiveBound("theoretical bound must be > 0, got " +
                           std::to_string(bound_gb_s));
  }
  return measured_mb_s / (1000.0 * bound_gb_s);
}

}  // namespace numastream
