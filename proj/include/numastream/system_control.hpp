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
#include <cstdint>
#include <mutex>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include "numastream/topology.hpp"

namespace numastream {

/// A block of memory handed out by a SystemControl.
struct Region {
  std::byte* data = nullptr;
  std::size_t bytes = 0;
  std::optional<NodeId> node;  // nullopt for OS-placed memory
};

/// Everything the suite needs from the operating system. Implementations
/// must be callable concurrently from all workers.
class SystemControl {
 public:
  virtual ~SystemControl() = default;

  /// Pins the calling thread to `core`. Throws PinFailed.
  virtual void pin_thread(CoreId core) = 0;
  /// Memory strictly bound to `node`. Throws AllocationFailed.
  virtual Region allocate_on_node(std::size_t bytes, NodeId node) = 0;
  /// Memory placed by the OS's default policy. Throws AllocationFailed.
  virtual Region allocate(std::size_t bytes) = 0;
  virtual void release(const Region& region) noexcept = 0;
  /// Monotonic clock in nanoseconds.
  virtual std::uint64_t monotonic_ns() = 0;
};

/// Linux implementation.
///
/// Pinning uses sched_setaffinity(2) on the calling thread (pid 0).
/// Node-bound allocation maps anonymous memory with mmap(2) and binds it with
/// mbind(2) (syscall SYS_mbind, 237 on x86-64) using mode MPOL_BIND (2) and
/// flags MPOL_MF_STRICT (1 << 0) | MPOL_MF_MOVE (1 << 1) over a one-node
/// mask, so pages either land on the requested node or the call fails.
/// The clock is CLOCK_MONOTONIC via std::chrono::steady_clock.
class LinuxSystem final : public SystemControl {
 public:
  void pin_thread(CoreId core) override;
  Region allocate_on_node(std::size_t bytes, NodeId node) override;
  Region allocate(std::size_t bytes) override;
  void release(const Region& region) noexcept override;
  std::uint64_t monotonic_ns() override;
};

/// In-memory SystemControl that records every call in order. Memory is real
/// (heap) so kernels can run against it; nothing touches the OS scheduler or
/// memory policy. The clock is simulated and deterministic for a given seed.
class RecordingSystem final : public SystemControl {
 public:
  enum class CallKind { Pin, AllocateOnNode, Allocate, Release, Clock };

  struct Call {
    CallKind kind;
    int argument = -1;        // core for Pin, node for AllocateOnNode/Release
    std::size_t bytes = 0;
    std::thread::id thread;

    bool operator==(const Call& other) const {
      return kind == other.kind && argument == other.argument && bytes == other.bytes;
    }
  };

  /// Each clock read advances simulated time by tick_ns * (1 + u), where u is
  /// drawn uniformly from [0, 0.05) by a generator seeded with `seed`.
  explicit RecordingSystem(std::uint64_t seed = 0, std::uint64_t tick_ns = 1'000'000);
  ~RecordingSystem() override;

  void pin_thread(CoreId core) override;
  Region allocate_on_node(std::size_t bytes, NodeId node) override;
  Region allocate(std::size_t bytes) override;
  void release(const Region& region) noexcept override;
  std::uint64_t monotonic_ns() override;

  /// Fault injection: pin_thread(core) throws PinFailed.
  void fail_pin_on(CoreId core);
  /// Fault injection: allocate_on_node(_, node) throws AllocationFailed.
  void fail_alloc_on(NodeId node);

  std::vector<Call> calls() const;
  std::size_t live_regions() const;

 private:
  Region allocate_impl(std::size_t bytes, std::optional<NodeId> node);

  mutable std::mutex mutex_;
  std::vector<Call> calls_;
  std::unordered_set<std::byte*> live_;
  std::unordered_set<CoreId> failing_cores_;
  std::unordered_set<NodeId> failing_nodes_;
  std::mt19937_64 engine_;
  std::uint64_t tick_ns_;
  std::uint64_t now_ns_ = 0;
};

std::string to_string(RecordingSystem::CallKind kind);

}  // namespace numastream
