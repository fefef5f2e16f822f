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

#include "numastream/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "numastream/errors.hpp"

namespace numastream {

namespace {

// The stride-1 branches are kept separate so the compiler vectorizes them.

void copy(double* __restrict dst, const double* __restrict x, std::size_t n,
          std::size_t stride) {
  if (stride == 1) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = x[i];
  } else {
    for (std::size_t i = 0; i < n; i += stride) dst[i] = x[i];
  }
}

void scale(double* __restrict dst, const double* __restrict x, double s,
           std::size_t n, std::size_t stride) {
  if (stride == 1) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = s * x[i];
  } else {
    for (std::size_t i = 0; i < n; i += stride) dst[i] = s * x[i];
  }
}

void sum(double* __restrict dst, const double* __restrict x,
         const double* __restrict y, std::size_t n, std::size_t stride) {
  if (stride == 1) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = x[i] + y[i];
  } else {
    for (std::size_t i = 0; i < n; i += stride) dst[i] = x[i] + y[i];
  }
}

void triad(double* __restrict dst, const double* __restrict x,
           const double* __restrict y, double s, std::size_t n, std::size_t stride) {
  if (stride == 1) {
    for (std::size_t i = 0; i < n; ++i) dst[i] = x[i] + s * y[i];
  } else {
    for (std::size_t i = 0; i < n; i += stride) dst[i] = x[i] + s * y[i];
  }
}

struct Expected {
  double a = kInitA;
  double b = kInitB;
  double c = kInitC;
};

// Scalar replay of the validation cycle; every touched element follows it.
Expected expected_after(std::size_t iterations, double s) {
  Expected e;
  for (std::size_t k = 0; k < iterations; ++k) {
    e.c = e.a;
    e.b = s * e.c;
    e.c = e.a + e.b;
    e.a = e.b + s * e.c;
  }
  return e;
}

double relative_error(double expected, double actual) {
  const double diff = std::abs(actual - expected);
  return expected == 0.0 ? diff : diff / std::abs(expected);
}

}  // namespace

std::size_t run_kernel(KernelKind kind, std::span<double> dst,
                       std::span<const double> x, std::span<const double> y,
                       const KernelParams& params) {
  const std::size_t n = dst.size();
  const std::size_t stride = params.stride;
  switch (kind) {
    case KernelKind::Copy:
      copy(dst.data(), x.data(), n, stride);
      break;
    case KernelKind::Scale:
      scale(dst.data(), x.data(), params.scalar, n, stride);
      break;
    case KernelKind::Sum:
      sum(dst.data(), x.data(), y.data(), n, stride);
      break;
    case KernelKind::Triad:
      triad(dst.data(), x.data(), y.data(), params.scalar, n, stride);
      break;
  }
  return touched_elements(n, stride);
}

std::size_t run_kernel(KernelKind kind, const WorkerArrays& arrays,
                       const KernelParams& params) {
  return run_kernel(kind, arrays.a, arrays.b, arrays.c, params);
}

void init_arrays(const WorkerArrays& arrays) {
  std::fill(arrays.a.begin(), arrays.a.end(), kInitA);
  std::fill(arrays.b.begin(), arrays.b.end(), kInitB);
  std::fill(arrays.c.begin(), arrays.c.end(), kInitC);
}

void run_cycle(const WorkerArrays& arrays, const KernelParams& params,
               std::size_t iterations) {
  for (std::size_t k = 0; k < iterations; ++k) {
    run_kernel(KernelKind::Copy, arrays.c, arrays.a, {}, params);
    run_kernel(KernelKind::Scale, arrays.b, arrays.c, {}, params);
    run_kernel(KernelKind::Sum, arrays.c, arrays.a, arrays.b, params);
    run_kernel(KernelKind::Triad, arrays.a, arrays.b, arrays.c, params);
  }
}

CycleCheck check_cycle(const WorkerArrays& arrays, const KernelParams& params,
                       std::size_t iterations) {
  const Expected touched = expected_after(iterations, params.scalar);
  const Expected untouched;
  const std::size_t stride = params.stride;

  CycleCheck result;
  double worst_expected = 0.0;
  double worst_actual = 0.0;
  char worst_array = 'a';
  const auto inspect = [&](char name, std::span<const double> values, double on_stride,
                           double off_stride) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double expected = i % stride == 0 ? on_stride : off_stride;
      // Untouched elements must be bit-for-bit unchanged.
      const double err = i % stride == 0 ? relative_error(expected, values[i])
                                         : (values[i] == expected ? 0.0 : INFINITY);
      if (err > result.max_relative_error || std::isnan(err)) {
        result.max_relative_error = std::isnan(err) ? INFINITY : err;
        result.worst_index = i;
        worst_expected = expected;
        worst_actual = values[i];
        worst_array = name;
      }
    }
  };
  inspect('a', arrays.a, touched.a, untouched.a);
  inspect('b', arrays.b, touched.b, untouched.b);
  inspect('c', arrays.c, touched.c, untouched.c);

  if (result.max_relative_error > kValidationTolerance) {
    throw ValidationFailed(std::string("validation failed: ") + worst_array + "[" +
                               std::to_string(result.worst_index) + "] expected " +
                               std::to_string(worst_expected) + " got " +
                               std::to_string(worst_actual),
                           result.worst_index, worst_expected, worst_actual);
  }
  return result;
}

CycleCheck verify_cycle(const WorkerArrays& arrays, const KernelParams& params,
                        std::size_t iterations) {
  run_cycle(arrays, params, iterations);
  return check_cycle(arrays, params, iterations);
}

double kernel_steady_value(KernelKind kind, double scalar) noexcept {
  switch (kind) {
    case KernelKind::Copy: return kInitB;
    case KernelKind::Scale: return scalar * kInitB;
    case KernelKind::Sum: return kInitB + kInitC;
    case KernelKind::Triad: return kInitB + scalar * kInitC;
  }
  return 0.0;
}

double checksum(std::span<const double> a, std::size_t stride) noexcept {
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); i += stride) total += a[i];
  return total;
}

}  // namespace numastream
