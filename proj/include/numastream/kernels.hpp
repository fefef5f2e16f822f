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
#include <span>

#include "numastream/kinds.hpp"

namespace numastream {

/// One worker's three STREAM arrays. All spans have the same length and are
/// owned by exactly one worker.
struct WorkerArrays {
  std::span<double> a;
  std::span<double> b;
  std::span<double> c;

  std::size_t n_elements() const noexcept { return a.size(); }
};

/// Largest stride in bytes: one 4 KiB page.
inline constexpr std::size_t kMaxStrideBytes = 4096;
inline constexpr std::size_t kMaxStride = kMaxStrideBytes / sizeof(double);

struct KernelParams {
  double scalar = 3.0;
  std::size_t stride = 1;  // element step; 1 is the classic unstrided loop
};

/// Initial values written by init_arrays.
inline constexpr double kInitA = 1.0;
inline constexpr double kInitB = 2.0;
inline constexpr double kInitC = 0.0;

/// Indices visited for a given stride: ceil(n / stride).
constexpr std::size_t touched_elements(std::size_t n_elements, std::size_t stride) noexcept {
  return (n_elements + stride - 1) / stride;
}

/// Applies one kernel at indices 0, stride, 2*stride, ... < n with a as the
/// destination:
///   COPY  a[i] = b[i]
///   SCALE a[i] = s*b[i]
///   SUM   a[i] = b[i] + c[i]
///   TRIAD a[i] = b[i] + s*c[i]
/// Other elements are left alone. Returns the number of indices visited.
std::size_t run_kernel(KernelKind kind, const WorkerArrays& arrays,
                       const KernelParams& params);

/// Same loop with explicit operand roles: dst = f(x, y). COPY and SCALE
/// ignore y.
std::size_t run_kernel(KernelKind kind, std::span<double> dst,
                       std::span<const double> x, std::span<const double> y,
                       const KernelParams& params);

/// a = 1.0, b = 2.0, c = 0.0 everywhere.
void init_arrays(const WorkerArrays& arrays);

/// Runs the validation cycle `iterations` times on touched indices:
///   c = a (COPY), b = s*c (SCALE), c = a + b (SUM), a = b + s*c (TRIAD).
void run_cycle(const WorkerArrays& arrays, const KernelParams& params,
               std::size_t iterations);

struct CycleCheck {
  double max_relative_error = 0.0;
  std::size_t worst_index = 0;
};

inline constexpr double kValidationTolerance = 1e-13;

/// Compares arrays against the values a freshly initialized set would hold
/// after `iterations` cycles: touched indices must match within
/// kValidationTolerance relative error, untouched ones must still hold their
/// initial values. Throws ValidationFailed at the worst index.
CycleCheck check_cycle(const WorkerArrays& arrays, const KernelParams& params,
                       std::size_t iterations);

/// run_cycle followed by check_cycle.
CycleCheck verify_cycle(const WorkerArrays& arrays, const KernelParams& params,
                        std::size_t iterations);

/// Destination value every touched element of `a` holds after any number
/// (>= 1) of single-kernel runs on initialized arrays.
double kernel_steady_value(KernelKind kind, double scalar) noexcept;

/// Sum of a[] over touched indices; consumed by the harness so timed loops
/// cannot be elided.
double checksum(std::span<const double> a, std::size_t stride) noexcept;

}  // namespace numastream
