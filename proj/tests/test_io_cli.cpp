// Copyright 2026 The Cachevolt Authors
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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "cachevolt/errors.hpp"
#include "cachevolt/io.hpp"
#include "cachevolt/synthetic.hpp"

using namespace cachevolt;
namespace fs = std::filesystem;

namespace {

constexpr double kNano = 1e-9;

const fs::path kData = CACHEVOLT_DATA_DIR;
const fs::path kGolden = CACHEVOLT_GOLDEN_DIR;

fs::path tmp_dir() {
  const fs::path dir = fs::temp_directory_path() / "cachevolt_io_test";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return {std::istreambuf_iterator<char>(in), {}};
}

void spit(const fs::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary);
  out << body;
}

struct RunResult {
  int code = -1;
  std::string output;  // stdout + stderr
};

RunResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path log = tmp_dir() / ("cli_" + std::to_string(counter++));
  const std::string cmd = std::string(CACHEVOLT_BIN) + " " + args + " > " +
                          log.string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  r.output = slurp(log);
  return r;
}

}  // namespace

// --- file formats -------------------------------------------------------------

TEST_CASE("shipped cache spec loads with unit conversion") {
  const CacheSpec spec = load_cache_spec((kData / "cache16k.json").string());
  CHECK(spec.name == "synthetic_16k");
  CHECK(spec.size_bytes == 16384);
  CHECK(spec.read_energy == doctest::Approx(0.02 * kNano).epsilon(1e-12));
  CHECK(spec.grid.vth_count() == 13);
  CHECK(spec.grid.tox_count() == 9);
  // Independently computed from the file's coefficients.
  const auto& cell = spec.model(ComponentKind::kCellArray);
  CHECK(eval_leakage(cell.leakage, {0.2, 10.0}) / kNano ==
        doctest::Approx(106310.59877328102).epsilon(1e-12));
  CHECK(eval_delay(cell.delay, {0.2, 10.0}) / kNano ==
        doctest::Approx(0.51944686544694607).epsilon(1e-12));
  const Assignment fast = expand_scheme(SchemeKind::kSchemeIII, {{0.2, 10.0}});
  CHECK(cache_leakage(spec, fast) / kNano ==
        doctest::Approx(114198.45488882184).epsilon(1e-12));
  CHECK(cache_delay(spec, fast) / kNano ==
        doctest::Approx(1.6661478244888359).epsilon(1e-12));
}

TEST_CASE("cache spec save/load round-trips exactly") {
  const CacheSpec spec = load_cache_spec((kData / "cache16k.json").string());
  const fs::path out = tmp_dir() / "spec_rt.json";
  save_cache_spec(spec, out.string());
  const CacheSpec back = load_cache_spec(out.string());
  CHECK(back.name == spec.name);
  CHECK(back.size_bytes == spec.size_bytes);
  CHECK(back.grid == spec.grid);
  for (ComponentKind k : kAllComponents) CHECK(back.model(k) == spec.model(k));
  // Serialization is idempotent: saving the reload gives identical bytes.
  const fs::path out2 = tmp_dir() / "spec_rt2.json";
  save_cache_spec(back, out2.string());
  CHECK(slurp(out) == slurp(out2));
}

TEST_CASE("sample CSV round-trips byte-identically") {
  const fs::path shipped = kData / "samples_cell16k.csv";
  const auto samples = load_samples(shipped.string());
  REQUIRE(samples.size() == 25);
  CHECK(samples.front().point == TechPoint{0.2, 10.0});
  CHECK(samples.front().leakage / kNano ==
        doctest::Approx(106310.598773).epsilon(1e-9));

  const fs::path out = tmp_dir() / "samples_rt.csv";
  save_samples_csv(samples, out.string());
  CHECK(slurp(out) == slurp(shipped));
}

TEST_CASE("samples load from JSON too") {
  const fs::path p = tmp_dir() / "samples.json";
  spit(p, R"([{"vth_V": 0.2, "tox_A": 10.0, "leakage_nW": 5.5, "delay_ns": 1.25},
              {"vth_V": 0.3, "tox_A": 12.0, "leakage_nW": 2.5, "delay_ns": 1.5}])");
  const auto samples = load_samples(p.string());
  REQUIRE(samples.size() == 2);
  CHECK(samples[1].point.vth == 0.3);
  CHECK(samples[0].leakage == doctest::Approx(5.5 * kNano));
  CHECK(samples[1].delay == doctest::Approx(1.5 * kNano));
}

TEST_CASE("sample CSV parse failures carry the path and line") {
  const fs::path dir = tmp_dir();

  const fs::path empty = dir / "empty.csv";
  spit(empty, "");
  CHECK_THROWS_WITH_AS(load_samples(empty.string()),
                       doctest::Contains("empty file"), ParseError);

  const fs::path header_only = dir / "header_only.csv";
  spit(header_only, "vth_V,tox_A,leakage_nW,delay_ns\n");
  CHECK_THROWS_WITH_AS(load_samples(header_only.string()),
                       doctest::Contains("no data rows"), ParseError);

  const fs::path bad_header = dir / "bad_header.csv";
  spit(bad_header, "vth,tox,leak,delay\n0.2,10,1,1\n");
  CHECK_THROWS_AS(load_samples(bad_header.string()), ParseError);

  const fs::path bad_number = dir / "bad_number.csv";
  spit(bad_number,
       "vth_V,tox_A,leakage_nW,delay_ns\n0.2,10,5,1\n0.3,abc,5,1\n");
  try {
    load_samples(bad_number.string());
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(e.path() == bad_number.string());
  }

  const fs::path negative = dir / "negative.csv";
  spit(negative, "vth_V,tox_A,leakage_nW,delay_ns\n0.2,10,-5,1\n");
  CHECK_THROWS_AS(load_samples(negative.string()), ParseError);

  CHECK_THROWS_AS(load_samples((dir / "missing.csv").string()), ParseError);
}

TEST_CASE("cache spec ingestion rejects schema and sign violations") {
  const std::string good = slurp(kData / "cache16k.json");
  const fs::path dir = tmp_dir();

  const fs::path missing_key = dir / "missing_key.json";
  spit(missing_key, [&] {
    std::string s = good;
    const auto pos = s.find("\"a1_perV\"");
    REQUIRE(pos != std::string::npos);
    s.replace(pos, 9, "\"a1_zzz\"");
    return s;
  }());
  CHECK_THROWS_WITH_AS(load_cache_spec(missing_key.string()),
                       doctest::Contains("a1_perV"), ParseError);

  // A positive leakage falloff rate contradicts the model's direction.
  const fs::path bad_sign = dir / "bad_sign.json";
  spit(bad_sign, [&] {
    std::string s = good;
    const auto pos = s.find("\"a1_perV\": -");
    REQUIRE(pos != std::string::npos);
    s.erase(pos + 11, 1);  // drop the minus sign
    return s;
  }());
  CHECK_THROWS_AS(load_cache_spec(bad_sign.string()), ParseError);

  const fs::path not_json = dir / "not_json.json";
  spit(not_json, "this is { not json");
  CHECK_THROWS_AS(load_cache_spec(not_json.string()), ParseError);
}

TEST_CASE("fitted model files round-trip") {
  Rng rng(71);
  FittedModelFile f;
  f.model = make_synthetic_component(rng, 1e-7, 1.0, true);
  f.leakage_fit = {1.5e-9, 12, 1};
  f.delay_fit = {2.5e-12, 7, 0};
  const fs::path p = tmp_dir() / "fitted.json";
  save_fitted_model(f, p.string());
  const FittedModelFile back = load_fitted_model(p.string());
  CHECK(back.model == f.model);
  CHECK(back.leakage_fit.iterations == 12);
  CHECK(back.delay_fit.rms_residual ==
        doctest::Approx(2.5e-12).epsilon(1e-12));
}

TEST_CASE("system bundle loads, validates lazily, and round-trips") {
  const SystemFile sys = load_system((kData / "system.json").string());
  CHECK(sys.spec.l1_candidates.size() == 4);
  CHECK(sys.spec.l2_candidates.size() == 4);
  CHECK(sys.spec.miss_table.workload == "synthetic_mix");
  CHECK(sys.spec.mem_latency == doctest::Approx(100.0 * kNano));
  CHECK(sys.spec.accesses == 2000000);
  CHECK(sys.l1_default == TechPoint{0.35, 12.0});

  // Unlisted pairs surface as MissingMissRate at lookup time, not load time.
  CHECK_THROWS_AS(sys.spec.miss_table.lookup(1, 2), MissingMissRate);

  const fs::path out = tmp_dir() / "system_rt.json";
  save_system(sys, out.string());
  const SystemFile back = load_system(out.string());
  CHECK(back.spec.l1_candidates.size() == 4);
  CHECK(back.spec.miss_table.entries.size() ==
        sys.spec.miss_table.entries.size());
  const fs::path out2 = tmp_dir() / "system_rt2.json";
  save_system(back, out2.string());
  CHECK(slurp(out) == slurp(out2));
}

TEST_CASE("run config guards its knobs") {
  RunConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  CHECK(cfg.search().oracle_cap == 1e8);
  CHECK(cfg.search().dp_resolution == 100000);
  cfg.dp_resolution = 999;
  CHECK_THROWS_AS(cfg.validate(), OutOfRange);
  cfg = RunConfig{};
  cfg.oracle_cap = 0;
  CHECK_THROWS_AS(cfg.validate(), OutOfRange);
  cfg = RunConfig{};
  cfg.output_format = "xml";
  CHECK_THROWS_AS(cfg.validate(), OutOfRange);
}

TEST_CASE("atomic writes land completely or not at all") {
  const fs::path p = tmp_dir() / "atomic.txt";
  atomic_write(p.string(), "payload\n");
  CHECK(slurp(p) == "payload\n");
  CHECK_FALSE(fs::exists(p.string() + ".tmp"));
  atomic_write(p.string(), "second\n");  // overwrite goes through rename too
  CHECK(slurp(p) == "second\n");
  CHECK_THROWS_AS(read_file((tmp_dir() / "nope.txt").string()), ParseError);
}

TEST_CASE("csv float formatting is stable") {
  CHECK(format_g12(0.5) == "0.5");
  CHECK(format_g12(14.0) == "14");
  CHECK(format_g12(1e-9) == "1e-09");
  CHECK(format_g12(106310.59877328102) == "106310.598773");
}

// --- CLI surface ---------------------------------------------------------------

TEST_CASE("cli: help and usage") {
  CHECK(run_cli("--help").code == 0);
  CHECK(run_cli("").code == 2);             // a subcommand is required
  CHECK(run_cli("frobnicate").code == 2);   // unknown subcommand
  CHECK(run_cli("optimize").code == 2);     // missing required --spec
}

TEST_CASE("cli: fit round-trips through the emitted model file") {
  const fs::path model = tmp_dir() / "cell16k_fit.json";
  const RunResult r = run_cli("fit --samples " +
                              (kData / "samples_cell16k.csv").string() +
                              " --out " + model.string());
  CHECK(r.code == 0);
  CHECK(r.output.find("leakage fit") != std::string::npos);
  CHECK(r.output.find("delay fit") != std::string::npos);

  const FittedModelFile f = load_fitted_model(model.string());
  const auto samples = load_samples((kData / "samples_cell16k.csv").string());
  for (const auto& s : samples) {
    CHECK(eval_leakage(f.model.leakage, s.point) ==
          doctest::Approx(s.leakage).epsilon(1e-6));
    CHECK(eval_delay(f.model.delay, s.point) ==
          doctest::Approx(s.delay).epsilon(1e-6));
  }
}

TEST_CASE("cli: fit error exit codes") {
  const fs::path dir = tmp_dir();
  const fs::path header_only = dir / "cli_header_only.csv";
  spit(header_only, "vth_V,tox_A,leakage_nW,delay_ns\n");
  RunResult r = run_cli("fit --samples " + header_only.string());
  CHECK(r.code == 2);

  const fs::path one_vth = dir / "cli_one_vth.csv";
  spit(one_vth,
       "vth_V,tox_A,leakage_nW,delay_ns\n"
       "0.3,10,5,1\n0.3,11,4,1.1\n0.3,12,3,1.2\n0.3,13,2.5,1.3\n0.3,14,2,1.4\n");
  r = run_cli("fit --samples " + one_vth.string());
  CHECK(r.code == 3);
  CHECK(r.output.find("DegenerateDesign") != std::string::npos);
}

TEST_CASE("cli: optimize emits results and honors --strict") {
  const std::string tiny = (kData / "tiny.json").string();
  RunResult r = run_cli("optimize --spec " + tiny +
                        " --scheme scheme3 --budget-ns 4.0");
  CHECK(r.code == 0);
  CHECK(r.output.find("\"feasible\": true") != std::string::npos);
  CHECK(r.output.find("\"method\": \"oracle\"") != std::string::npos);

  r = run_cli("optimize --spec " + tiny + " --scheme scheme3 --budget-ns 3.0");
  CHECK(r.code == 0);  // infeasible is an answer, not an error
  CHECK(r.output.find("\"feasible\": false") != std::string::npos);

  r = run_cli("optimize --spec " + tiny +
              " --scheme scheme3 --budget-ns 3.0 --strict");
  CHECK(r.code == 4);
}

TEST_CASE("cli: frontier golden file") {
  const fs::path out = tmp_dir() / "frontier.csv";
  const RunResult r = run_cli(
      "optimize --spec " + (kData / "cache16k.json").string() +
      " --scheme scheme2 --frontier 1.6,1.8,2.0,2.2,2.4,2.6,2.9,3.2,3.6,4.3"
      " --format csv --out " + out.string());
  REQUIRE(r.code == 0);
  CHECK(slurp(out) == slurp(kGolden / "frontier16k_scheme2.csv"));

  // Budget order must not matter.
  const fs::path out_rev = tmp_dir() / "frontier_rev.csv";
  const RunResult rr = run_cli(
      "optimize --spec " + (kData / "cache16k.json").string() +
      " --scheme scheme2 --frontier 4.3,3.6,3.2,2.9,2.6,2.4,2.2,2.0,1.8,1.6"
      " --format csv --out " + out_rev.string());
  REQUIRE(rr.code == 0);
  CHECK(slurp(out_rev) == slurp(out));
}

TEST_CASE("cli: hierarchy golden file and missing-pair exit") {
  const fs::path out = tmp_dir() / "hier_l2.json";
  const RunResult r =
      run_cli("hierarchy --system " + (kData / "system.json").string() +
              " --mode l2 --l1-index 1 --out " + out.string());
  REQUIRE(r.code == 0);
  CHECK(slurp(out) == slurp(kGolden / "hierarchy_l2.json"));

  // Drop one miss-table entry: the lookup for that pair must exit 5.
  const SystemFile sys = load_system((kData / "system.json").string());
  SystemFile clipped = sys;
  const auto key = std::pair<std::int64_t, std::int64_t>(
      clipped.spec.l1_candidates[1].size_bytes,
      clipped.spec.l2_candidates[2].size_bytes);
  REQUIRE(clipped.spec.miss_table.entries.erase(key) == 1);
  const fs::path clipped_path = tmp_dir() / "clipped_system.json";
  save_system(clipped, clipped_path.string());

  const RunResult miss = run_cli("hierarchy --system " +
                                 clipped_path.string() +
                                 " --mode l2 --l1-index 1");
  CHECK(miss.code == 5);
  CHECK(miss.output.find(std::to_string(key.first)) != std::string::npos);
  CHECK(miss.output.find(std::to_string(key.second)) != std::string::npos);
}

TEST_CASE("cli: tuple mode emits the matrix CSV") {
  const RunResult r =
      run_cli("hierarchy --system " + (kData / "system.json").string() +
              " --mode tuple --l1-index 1 --l2-index 1 --max-m 2 --max-n 2");
  REQUIRE(r.code == 0);
  CHECK(r.output.rfind("m,n,total_energy_nJ,feasible\n", 0) == 0);
  CHECK(std::count(r.output.begin(), r.output.end(), '\n') == 5);
}

TEST_CASE("cli: repeated runs are byte-identical") {
  const std::string args =
      "optimize --spec " + (kData / "cache16k.json").string() +
      " --scheme scheme1 --budget-ns 2.5";
  const RunResult a = run_cli(args);
  const RunResult b = run_cli(args);
  REQUIRE(a.code == 0);
  CHECK(a.output == b.output);
  CHECK(a.output.find("\"method\": \"separable\"") != std::string::npos);
}

TEST_CASE("cli: gen-synthetic reproduces the shipped corpus") {
  const fs::path dir = tmp_dir() / "regen";
  const RunResult r =
      run_cli("gen-synthetic --out-dir " + dir.string() + " --seed 42");
  REQUIRE(r.code == 0);
  for (const char* name :
       {"cache16k.json", "tiny.json", "system.json", "samples_cell16k.csv",
        "samples_cell16k_noisy.csv"}) {
    CAPTURE(name);
    CHECK(slurp(dir / name) == slurp(kData / name));
  }
}
