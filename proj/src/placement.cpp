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

#include "numastream/placement.hpp"

#include <cstring>
#include <exception>
#include <string>
#include <thread>

#include "numastream/errors.hpp"

namespace numastream {

PlacementPlan build_plan(const MachineTopology& topology, PlacementPolicy policy,
                         std::size_t n_threads) {
  if (policy == PlacementPolicy::RemotePackage && topology.packages.size() < 2) {
    throw SinglePackage("policy remote-package needs at least two packages; topology '" +
                        topology.name + "' has one");
  }
  const auto slots = sparse_pin_order(topology, n_threads);

  PlacementPlan plan;
  plan.policy = policy;
  plan.entries.reserve(slots.size());
  for (std::size_t worker = 0; worker < slots.size(); ++worker) {
    const auto& slot = slots[worker];
    PlanEntry entry{worker, slot.core, slot.node, std::nullopt};
    switch (policy) {
      case PlacementPolicy::LocalNode:
        entry.memory_node = slot.node;
        break;
      case PlacementPolicy::RemotePackage: {
        std::size_t index = 0;
        while (topology.packages[index].package_id != slot.package) ++index;
        const auto& next = topology.packages[(index + 1) % topology.packages.size()];
        entry.memory_node = next.nodes.front().node_id;
        break;
      }
      case PlacementPolicy::OsDefault:
        break;
    }
    plan.entries.push_back(entry);
  }
  return plan;
}

WorkerMemory place_worker(const PlanEntry& entry, std::size_t n_elements,
                          SystemControl& system) {
  system.pin_thread(entry.core);
  const std::size_t bytes = n_elements * sizeof(double);
  const auto allocate = [&] {
    return entry.memory_node ? BoundRegion(system, system.allocate_on_node(bytes, *entry.memory_node))
                             : BoundRegion(system, system.allocate(bytes));
  };
  WorkerMemory memory;
  memory.n_elements = n_elements;
  memory.a = allocate();
  memory.b = allocate();
  memory.c = allocate();
  for (const BoundRegion* region : {&memory.a, &memory.b, &memory.c}) {
    std::memset(region->region().data, 0, region->region().bytes);
  }
  return memory;
}

void Turnstile::wait_turn(std::size_t index) {
  std::unique_lock lock(mutex_);
  turn_changed_.wait(lock, [&] { return next_ == index; });
}

void Turnstile::pass() {
  {
    std::lock_guard lock(mutex_);
    ++next_;
  }
  turn_changed_.notify_all();
}

std::vector<WorkerMemory> apply_plan(const PlacementPlan& plan, std::size_t bytes_per_array,
                                     SystemControl& system) {
  const std::size_t n_elements = bytes_per_array / sizeof(double);
  std::vector<WorkerMemory> memory(plan.entries.size());
  std::vector<std::exception_ptr> errors(plan.entries.size());
  Turnstile turnstile;
  {
    std::vector<std::jthread> threads;
    threads.reserve(plan.entries.size());
    for (std::size_t i = 0; i < plan.entries.size(); ++i) {
      threads.emplace_back([&, i] {
        turnstile.wait_turn(i);
        try {
          memory[i] = place_worker(plan.entries[i], n_elements, system);
        } catch (...) {
          errors[i] = std::current_exception();
        }
        turnstile.pass();
      });
    }
  }
  for (const auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }
  return memory;
}

}  // namespace numastream
