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

#include <doctest.h>

#include <cmath>

#include "numastream/errors.hpp"
#include "numastream/model.hpp"
#include "numastream/preset.hpp"

using namespace numastream;

namespace {

TheoreticalModel amd() { return *load_named_preset("amd-r815").model; }
TheoreticalModel intel() { return *load_named_preset("intel-qssc-s4r").model; }

}  // namespace

TEST_CASE("bundled models carry the vendor table values") {
  CHECK(amd().local_gb_s == 21.3);
  CHECK(amd().same_package_gb_s == 19.2);
  CHECK(amd().cross_package_gb_s == 6.4);
  CHECK(intel().local_gb_s == 17.1);
  CHECK_FALSE(intel().same_package_gb_s.has_value());
  CHECK(intel().cross_package_gb_s == 25.6);
}

// Link rates in units of 0.1 GB/s so the sums are exact.
long tenths(double gb_s) { return std::lround(gb_s * 10.0); }

TEST_CASE("AMD link inventory adds up to the table") {
  constexpr long kHt3EightBitLink = 64;
  constexpr long kHt3SixteenBitLink = 2 * kHt3EightBitLink;
  CHECK(kHt3SixteenBitLink == 128);
  CHECK(kHt3SixteenBitLink + kHt3EightBitLink == tenths(*amd().same_package_gb_s));
  CHECK(kHt3EightBitLink == tenths(*amd().cross_package_gb_s));
}

TEST_CASE("bound per node") {
  CHECK(bound_per_node(amd(), PlacementPolicy::LocalNode) == 21.3);
  CHECK(bound_per_node(amd(), PlacementPolicy::RemotePackage) == 6.4);
  CHECK(bound_per_node(amd(), PlacementPolicy::OsDefault) == 21.3);
  CHECK(bound_per_node(intel(), PlacementPolicy::RemotePackage) == 25.6);
  TheoreticalModel local_only{10.0, std::nullopt, std::nullopt};
  CHECK_THROWS_AS(bound_per_node(local_only, PlacementPolicy::RemotePackage), MissingLinkClass);
}

TEST_CASE("per-node bandwidth") {
  CHECK(per_node_bandwidth(55'000, 8) == 6'875);
  CHECK(per_node_bandwidth(1234.5, 1) == 1234.5);
  CHECK(per_node_bandwidth(0, 4) == 0);
}

TEST_CASE("efficiency") {
  CHECK(efficiency(10'650, 21.3) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(efficiency(21'300, 21.3) == 1.0);
  CHECK_THROWS_AS(efficiency(100, 0), NonPositiveBound);
  CHECK_THROWS_AS(efficiency(100, -1), NonPositiveBound);
  CHECK(exceeds_bound(efficiency(30'000, 21.3)));
  CHECK_FALSE(exceeds_bound(efficiency(20'000, 21.3)));
}

TEST_CASE("efficiency is scale invariant") {
  for (double k : {0.5, 2.0, 10.0, 1e3}) {
    for (double m : {100.0, 6875.0, 40'000.0}) {
      for (double b : {6.4, 17.1, 21.3}) {
        CHECK(efficiency(k * m, k * b) == doctest::Approx(efficiency(m, b)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("model invariants") {
  CHECK_NOTHROW(check_model(amd()));
  CHECK_THROWS_AS(check_model({0.0, std::nullopt, std::nullopt}), InvariantViolation);
  CHECK_THROWS_AS(check_model({1.0, -1.0, std::nullopt}), InvariantViolation);
  CHECK_THROWS_AS(check_model({1.0, std::nullopt, 0.0}), InvariantViolation);
}
