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

#include <condition_variable>
#include <cstddef>
#include <mutex>
#include <optional>
#include <span>
#include <vector>

#include "numastream/kernels.hpp"
#include "numastream/kinds.hpp"
#include "numastream/system_control.hpp"
#include "numastream/topology.hpp"

namespace numastream {

struct PlanEntry {
  std::size_t worker = 0;
  CoreId core = 0;
  NodeId pin_node = 0;
  std::optional<NodeId> memory_node;  // nullopt under OsDefault

  bool operator==(const PlanEntry&) const = default;
};

struct PlacementPlan {
  PlacementPolicy policy = PlacementPolicy::LocalNode;
  std::vector<PlanEntry> entries;

  bool operator==(const PlacementPlan&) const = default;
};

/// Cores come from sparse_pin_order. LocalNode binds memory to the pin node;
/// RemotePackage binds it to the first node of the next package (cyclic in
/// listed package order); OsDefault leaves it to the OS.
/// Throws TooManyThreads, or SinglePackage for RemotePackage on a
/// one-package machine.
PlacementPlan build_plan(const MachineTopology& topology, PlacementPolicy policy,
                         std::size_t n_threads);

/// Memory from a SystemControl, returned to it on destruction.
class BoundRegion {
 public:
  BoundRegion() = default;
  BoundRegion(SystemControl& system, Region region) : system_(&system), region_(region) {}
  BoundRegion(BoundRegion&& other) noexcept { swap(other); }
  BoundRegion& operator=(BoundRegion&& other) noexcept {
    BoundRegion(std::move(other)).swap(*this);
    return *this;
  }
  BoundRegion(const BoundRegion&) = delete;
  BoundRegion& operator=(const BoundRegion&) = delete;
  ~BoundRegion() {
    if (system_ != nullptr && region_.data != nullptr) system_->release(region_);
  }

  const Region& region() const noexcept { return region_; }
  std::span<double> doubles(std::size_t count) const noexcept {
    return {reinterpret_cast<double*>(region_.data), count};
  }

 private:
  void swap(BoundRegion& other) noexcept {
    std::swap(system_, other.system_);
    std::swap(region_, other.region_);
  }

  SystemControl* system_ = nullptr;
  Region region_;
};

/// The a, b, c regions of one worker.
struct WorkerMemory {
  BoundRegion a;
  BoundRegion b;
  BoundRegion c;
  std::size_t n_elements = 0;

  WorkerArrays arrays() const noexcept {
    return {a.doubles(n_elements), b.doubles(n_elements), c.doubles(n_elements)};
  }
};

/// Must run on the worker's own thread: pins it to entry.core, allocates
/// a, b and c (node-bound unless the entry has no memory node), then writes
/// every byte so pages are faulted in by the pinned thread.
WorkerMemory place_worker(const PlanEntry& entry, std::size_t n_elements,
                          SystemControl& system);

/// Admits callers one at a time in index order (0, 1, 2, ...).
class Turnstile {
 public:
  void wait_turn(std::size_t index);
  void pass();

 private:
  std::mutex mutex_;
  std::condition_variable turn_changed_;
  std::size_t next_ = 0;
};

/// Places every worker of `plan` from its own short-lived thread, one
/// worker at a time in worker order. Rethrows the first PinFailed or
/// AllocationFailed after all threads finish; regions of workers that did
/// succeed are released in that case.
std::vector<WorkerMemory> apply_plan(const PlacementPlan& plan, std::size_t bytes_per_array,
                                     SystemControl& system);

}  // namespace numastream
