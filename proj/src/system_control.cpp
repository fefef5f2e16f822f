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

#include "numastream/system_control.hpp"

#include <sched.h>
#include <sys/mman.h>
#include <sys/syscall.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <new>

#include "numastream/errors.hpp"

namespace numastream {

namespace {

// <linux/mempolicy.h>
constexpr int kMpolBind = 2;
constexpr unsigned kMpolMfStrict = 1u << 0;
constexpr unsigned kMpolMfMove = 1u << 1;

constexpr std::size_t kRegionAlignment = 4096;

std::size_t round_up(std::size_t bytes, std::size_t to) {
  return (bytes + to - 1) / to * to;
}

}  // namespace

// LinuxSystem

void LinuxSystem::pin_thread(CoreId core) {
  if (core < 0 || core >= CPU_SETSIZE) {
    throw PinFailed("core " + std::to_string(core) + " is out of range", core);
  }
  cpu_set_t set;
  CPU_ZERO(&set);
  CPU_SET(core, &set);
  if (sched_setaffinity(0, sizeof(set), &set) != 0) {
    throw PinFailed("sched_setaffinity(core " + std::to_string(core) +
                        ") failed: " + std::strerror(errno),
                    core);
  }
}

Region LinuxSystem::allocate_on_node(std::size_t bytes, NodeId node) {
  if (node < 0) {
    throw AllocationFailed("invalid node " + std::to_string(node), node);
  }
  const std::size_t length = round_up(bytes, kRegionAlignment);
  void* data = mmap(nullptr, length, PROT_READ | PROT_WRITE, MAP_PRIVATE | MAP_ANONYMOUS,
                    -1, 0);
  if (data == MAP_FAILED) {
    throw AllocationFailed("mmap of " + std::to_string(length) + " bytes failed: " +
                               std::strerror(errno),
                           node);
  }
  constexpr std::size_t kBitsPerWord = 8 * sizeof(unsigned long);
  std::vector<unsigned long> mask(static_cast<std::size_t>(node) / kBitsPerWord + 1, 0);
  mask[static_cast<std::size_t>(node) / kBitsPerWord] |=
      1UL << (static_cast<std::size_t>(node) % kBitsPerWord);
  // The kernel reads maxnode - 1 bits.
  const unsigned long maxnode = mask.size() * kBitsPerWord + 1;
  if (syscall(SYS_mbind, data, length, kMpolBind, mask.data(), maxnode,
              kMpolMfStrict | kMpolMfMove) != 0) {
    const int err = errno;
    munmap(data, length);
    throw AllocationFailed("mbind to node " + std::to_string(node) + " failed: " +
                               std::strerror(err),
                           node);
  }
  return {static_cast<std::byte*>(data), length, node};
}

Region LinuxSystem::allocate(std::size_t bytes) {
  const std::size_t length = round_up(bytes, kRegionAlignment);
  void* data = mmap(nullptr, length, PROT_READ | PROT_WRITE, MAP_PRIVATE | MAP_ANONYMOUS,
                    -1, 0);
  if (data == MAP_FAILED) {
    throw AllocationFailed("mmap of " + std::to_string(length) + " bytes failed: " +
                               std::strerror(errno),
                           -1);
  }
  return {static_cast<std::byte*>(data), length, std::nullopt};
}

void LinuxSystem::release(const Region& region) noexcept {
  if (region.data != nullptr) munmap(region.data, region.bytes);
}

std::uint64_t LinuxSystem::monotonic_ns() {
  return static_cast<std::uint64_t>(
      std::chrono::duration_cast<std::chrono::nanoseconds>(
          std::chrono::steady_clock::now().time_since_epoch())
          .count());
}

// RecordingSystem

RecordingSystem::RecordingSystem(std::uint64_t seed, std::uint64_t tick_ns)
    : engine_(seed), tick_ns_(tick_ns) {}

RecordingSystem::~RecordingSystem() {
  for (std::byte* data : live_) std::free(data);
}

void RecordingSystem::pin_thread(CoreId core) {
  std::lock_guard lock(mutex_);
  calls_.push_back({CallKind::Pin, core, 0, std::this_thread::get_id()});
  if (failing_cores_.count(core) != 0) {
    throw PinFailed("injected pin failure on core " + std::to_string(core), core);
  }
}

Region RecordingSystem::allocate_impl(std::size_t bytes, std::optional<NodeId> node) {
  std::lock_guard lock(mutex_);
  calls_.push_back({node ? CallKind::AllocateOnNode : CallKind::Allocate,
                    node.value_or(-1), bytes, std::this_thread::get_id()});
  if (node && failing_nodes_.count(*node) != 0) {
    throw AllocationFailed("injected allocation failure on node " + std::to_string(*node),
                           *node);
  }
  const std::size_t length = round_up(std::max<std::size_t>(bytes, 1), kRegionAlignment);
  auto* data = static_cast<std::byte*>(std::aligned_alloc(kRegionAlignment, length));
  if (data == nullptr) {
    throw AllocationFailed("out of memory", node.value_or(-1));
  }
  live_.insert(data);
  return {data, length, node};
}

Region RecordingSystem::allocate_on_node(std::size_t bytes, NodeId node) {
  return allocate_impl(bytes, node);
}

Region RecordingSystem::allocate(std::size_t bytes) {
  return allocate_impl(bytes, std::nullopt);
}

void RecordingSystem::release(const Region& region) noexcept {
  std::lock_guard lock(mutex_);
  try {
    calls_.push_back({CallKind::Release, region.node.value_or(-1), region.bytes,
                      std::this_thread::get_id()});
  } catch (...) {
  }
  if (live_.erase(region.data) != 0) std::free(region.data);
}

std::uint64_t RecordingSystem::monotonic_ns() {
  std::lock_guard lock(mutex_);
  calls_.push_back({CallKind::Clock, -1, 0, std::this_thread::get_id()});
  // Raw engine bits rather than a distribution: mt19937_64 output is fixed by
  // the standard, distributions are not.
  const double jitter = static_cast<double>(engine_() >> 11) * 0x1.0p-53 * 0.05;
  now_ns_ += static_cast<std::uint64_t>(static_cast<double>(tick_ns_) * (1.0 + jitter));
  return now_ns_;
}

void RecordingSystem::fail_pin_on(CoreId core) {
  std::lock_guard lock(mutex_);
  failing_cores_.insert(core);
}

void RecordingSystem::fail_alloc_on(NodeId node) {
  std::lock_guard lock(mutex_);
  failing_nodes_.insert(node);
}

std::vector<RecordingSystem::Call> RecordingSystem::calls() const {
  std::lock_guard lock(mutex_);
  return calls_;
}

std::size_t RecordingSystem::live_regions() const {
  std::lock_guard lock(mutex_);
  return live_.size();
}

std::string to_string(RecordingSystem::CallKind kind) {
  switch (kind) {
    case RecordingSystem::CallKind::Pin: return "pin";
    case RecordingSystem::CallKind::AllocateOnNode: return "alloc_on_node";
    case RecordingSystem::CallKind::Allocate: return "alloc";
    case RecordingSystem::CallKind::Release: return "release";
    case RecordingSystem::CallKind::Clock: return "clock";
  }
  return "?";
}

}  // namespace numastream
