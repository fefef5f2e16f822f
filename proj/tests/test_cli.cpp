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

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "numastream/cli.hpp"
#include "numastream/preset.hpp"
#include "numastream/report.hpp"

using namespace numastream;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome cli(std::vector<std::string> args, SystemControl* system = nullptr) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err, system);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "numastream_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("default sweep") {
  const auto amd = load_named_preset("amd-r815").topology;
  const auto sweep = default_sweep(amd);
  CHECK(sweep.threads == std::vector<std::size_t>{1, 8, 16, 24, 32, 40, 48});
  CHECK(sweep.kernels.size() == 4);
  CHECK(sweep.policies ==
        std::vector<PlacementPolicy>{PlacementPolicy::LocalNode, PlacementPolicy::RemotePackage});
  CHECK(sweep.strides == std::vector<std::size_t>{1, 8});
  CHECK(expand_sweep(sweep, RunConfig{}).size() == 4 * 2 * 2 * 7);

  const auto intel = load_named_preset("intel-qssc-s4r").topology;
  CHECK(default_sweep(intel).threads == std::vector<std::size_t>{1, 4, 8, 12, 16, 20, 24, 28, 32});

  const auto laptop = single_node_topology(4);
  const auto small = default_sweep(laptop);
  CHECK(small.threads == std::vector<std::size_t>{1, 2, 3, 4});
  CHECK(small.policies == std::vector<PlacementPolicy>{PlacementPolicy::LocalNode});
}

TEST_CASE("thread lists") {
  CHECK(parse_thread_list("4") == std::vector<std::size_t>{4});
  CHECK(parse_thread_list("1,8,16") == std::vector<std::size_t>{1, 8, 16});
  CHECK_THROWS(parse_thread_list("1,,2"));
  CHECK_THROWS(parse_thread_list("0"));
  CHECK_THROWS(parse_thread_list("x"));
}

TEST_CASE("topology command mirrors the hardware tables") {
  auto amd = cli({"topology", "--preset", "amd-r815"});
  CHECK(amd.code == 0);
  CHECK(amd.out.find("Processor  | 4 per machine      | 4\n") != std::string::npos);
  CHECK(amd.out.find("Node       | 2 per processor    | 8\n") != std::string::npos);
  CHECK(amd.out.find("Core       | 6 per node         | 48\n") != std::string::npos);
  CHECK(amd.out.find("local 21.3, same package 19.2, other package 6.4") != std::string::npos);

  auto intel = cli({"topology", "--preset", "intel-qssc-s4r"});
  CHECK(intel.code == 0);
  CHECK(intel.out.find("Processor  | 4 per machine      | 4\n") != std::string::npos);
  CHECK(intel.out.find("Node       | 1 per processor    | 4\n") != std::string::npos);
  CHECK(intel.out.find("Core       | 8 per node         | 32\n") != std::string::npos);

  auto live = cli({"topology"});
  CHECK(live.code == 0);
  CHECK(live.out.find("Processor") != std::string::npos);
}

TEST_CASE("usage errors exit 2 and name the flag") {
  auto bad_kernel = cli({"run", "--kernel", "memset", "--dry-run"});
  CHECK(bad_kernel.code == 2);
  CHECK(bad_kernel.err.find("--kernel") != std::string::npos);

  auto unknown = cli({"run", "--bogus"});
  CHECK(unknown.code == 2);
  CHECK(unknown.err.find("--bogus") != std::string::npos);

  CHECK(cli({"run", "--stride", "0"}).code == 2);
  CHECK(cli({"run", "--threads", "1,x", "--dry-run"}).code == 2);
  CHECK(cli({}).code == 2);
  CHECK(cli({"run", "--preset", "amd-r815", "--topology", "x.json"}).code == 2);
  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("dry run prints the grid and never touches the system") {
  RecordingSystem system;
  auto result = cli({"run", "--sweep", "--preset", "amd-r815", "--dry-run", "--fake-system"},
                    &system);
  CHECK(result.code == 0);
  CHECK(result.out.find("amd-r815: 112 cells") != std::string::npos);
  std::size_t lines = 0;
  for (char ch : result.out) lines += ch == '\n';
  CHECK(lines == 113);
  CHECK(system.calls().empty());
}

TEST_CASE("sweep dimensions can be overridden") {
  auto result = cli({"run", "--sweep", "--preset", "intel-qssc-s4r", "--dry-run",
                     "--kernel", "triad", "--threads", "2,4"});
  CHECK(result.code == 0);
  CHECK(result.out.find("intel-qssc-s4r: 8 cells") != std::string::npos);
}

TEST_CASE("remote-package on a single-package machine fails") {
  const auto file = scratch("laptop.json");
  std::ofstream(file) << serialize_preset({single_node_topology(4, "laptop"), std::nullopt});
  auto result = cli({"run", "--topology", file.string(), "--policy", "remote-package",
                     "--fake-system", "--allow-small-arrays", "--elements", "64"});
  CHECK(result.code != 0);
  CHECK(result.err.find("SinglePackage") != std::string::npos);
}

TEST_CASE("arrays that fit in cache need the override flag") {
  auto result = cli({"run", "--preset", "amd-r815", "--elements", "4096", "--dry-run"});
  CHECK(result.code == 1);
  CHECK(result.err.find("ArraysFitInCache") != std::string::npos);
}

TEST_CASE("a single cell runs against the fake and writes results and manifest") {
  const auto output = scratch("single.csv");
  RecordingSystem system;
  auto result = cli({"run", "--preset", "amd-r815", "--kernel", "copy", "--threads", "4",
                     "--policy", "local", "--stride", "8", "--elements", "2048",
                     "--allow-small-arrays", "--reps", "3", "--output", output.string()},
                    &system);
  CHECK(result.code == 0);
  CHECK(result.out.find("wrote 3 rows") != std::string::npos);
  CHECK(result.out.find("Strided") != std::string::npos);
  std::ifstream csv(output);
  const auto rows = parse_rows(csv);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].n_threads == 4);
  CHECK(rows[0].latency_ns.has_value());
  CHECK(*rows[0].bound_gb_s == 21.3);

  const auto manifest = nlohmann::json::parse(slurp(output.string() + ".manifest.json"));
  CHECK(manifest["topology"] == "amd-r815");
  CHECK(manifest["results_file"] == "single.csv");
  CHECK(manifest["cells"].size() == 1);
  CHECK(manifest["cells"][0]["stride"] == 8);
}

TEST_CASE("fake-system runs are byte-identical for equal flags") {
  const auto first = scratch("det1.csv");
  const auto second = scratch("det2.csv");
  const std::vector<std::string> base = {"run", "--preset", "intel-qssc-s4r", "--kernel", "all",
                                         "--threads", "1,4", "--fake-system", "--reps", "2",
                                         "--elements", "1024", "--allow-small-arrays",
                                         "--seed", "3", "--output"};
  auto a = base;
  a.push_back(first.string());
  auto b = base;
  b.push_back(second.string());
  CHECK(cli(a).code == 0);
  CHECK(cli(b).code == 0);
  CHECK(slurp(first) == slurp(second));
  CHECK(!slurp(first).empty());

  auto c = base;
  c[c.size() - 2] = "4";  // different seed
  c.push_back(scratch("det3.csv").string());
  CHECK(cli(c).code == 0);
  CHECK(slurp(first) != slurp(scratch("det3.csv")));
}

TEST_CASE("validate-preset") {
  CHECK(cli({"validate-preset", "--preset", "amd-r815"}).code == 0);
  const auto good = (preset_directory() / "intel-qssc-s4r.json").string();
  auto ok = cli({"validate-preset", good});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("32 cores") != std::string::npos);

  const auto bad = scratch("bad.json");
  std::ofstream(bad) << "{ \"schema\": \"numastream-preset/1\" }";
  auto failed = cli({"validate-preset", bad.string()});
  CHECK(failed.code == 1);
  CHECK(failed.err.find("ParseError") != std::string::npos);
  CHECK(cli({"validate-preset"}).code == 2);
}
