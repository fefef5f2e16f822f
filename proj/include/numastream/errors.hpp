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
#include <stdexcept>
#include <string>
#include <utility>

namespace numastream {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// topology

class TopologyUnavailable : public Error {
 public:
  using Error::Error;
};

/// Malformed preset text. `line` is 1-based, 0 when not applicable.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::string field)
      : Error(what), line_(line), field_(std::move(field)) {}
  std::size_t line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::size_t line_;
  std::string field_;
};

class InvariantViolation : public Error {
 public:
  using Error::Error;
};

class TooManyThreads : public Error {
 public:
  using Error::Error;
};

// placement

class SinglePackage : public Error {
 public:
  using Error::Error;
};

class AllocationFailed : public Error {
 public:
  AllocationFailed(const std::string& what, int node) : Error(what), node_(node) {}
  int node() const noexcept { return node_; }

 private:
  int node_;
};

class PinFailed : public Error {
 public:
  PinFailed(const std::string& what, int core) : Error(what), core_(core) {}
  int core() const noexcept { return core_; }

 private:
  int core_;
};

// harness / kernels

class NonPositiveTime : public Error {
 public:
  using Error::Error;
};

class NotStrided : public Error {
 public:
  using Error::Error;
};

class ArraysFitInCache : public Error {
 public:
  using Error::Error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

class ValidationFailed : public Error {
 public:
  ValidationFailed(const std::string& what, std::size_t index, double expected,
                   double actual)
      : Error(what), index_(index), expected_(expected), actual_(actual) {}
  std::size_t index() const noexcept { return index_; }
  double expected() const noexcept { return expected_; }
  double actual() const noexcept { return actual_; }

 private:
  std::size_t index_;
  double expected_;
  double actual_;
};

// model

class MissingLinkClass : public Error {
 public:
  using Error::Error;
};

class NonPositiveBound : public Error {
 public:
  using Error::Error;
};

// report

class EmptyResults : public Error {
 public:
  using Error::Error;
};

class WriteFailed : public Error {
 public:
  using Error::Error;
};

}  // namespace numastream
