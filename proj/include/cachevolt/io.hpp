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

#ifndef CACHEVOLT_IO_HPP_
#define CACHEVOLT_IO_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "cachevolt/hierarchy_opt.hpp"
#include "cachevolt/tech_model.hpp"

namespace cachevolt {

// Run-wide tuning shared by the subcommands. File payloads carry nW/ns/nJ
// units (every key carries its unit suffix); everything here and in the
// compute modules is watts/seconds/joules.
struct RunConfig {
  TechGrid grid;  // used where no spec file provides one (gen-synthetic)
  Objective objective = Objective::kLeakage;
  long long dp_resolution = 100000;
  double oracle_cap = 1e8;
  std::string output_format = "json";  // json | csv
  std::uint64_t seed = 42;

  SearchConfig search() const { return {oracle_cap, dp_resolution}; }
  void validate() const;
};

// Characterization samples: CSV with header vth_V,tox_A,leakage_nW,delay_ns
// or a JSON array of objects with the same keys (picked by file extension).
std::vector<CharacterizationSample> load_samples(const std::string& path);
void save_samples_csv(const std::vector<CharacterizationSample>& samples,
                      const std::string& path);

// Cache description files.
CacheSpec load_cache_spec(const std::string& path);
void save_cache_spec(const CacheSpec& spec, const std::string& path);

// Fitted single-component model files (what `fit` writes).
struct FittedModelFile {
  ComponentModel model;
  FitReport leakage_fit;
  FitReport delay_fit;
};
void save_fitted_model(const FittedModelFile& f, const std::string& path);
FittedModelFile load_fitted_model(const std::string& path);

// Two-level system bundle: candidate cache specs, the miss-rate table with
// memory constants, the evaluation window, and the default knob settings
// for whichever level stays fixed.
struct SystemFile {
  HierarchySpec spec;
  TechPoint l1_default;
  TechPoint l2_default;
};
SystemFile load_system(const std::string& path);
void save_system(const SystemFile& sys, const std::string& path);

// All output files go through this: write to a temp sibling, then rename.
void atomic_write(const std::string& path, const std::string& contents);

std::string read_file(const std::string& path);  // ParseError when missing

// Shortest-but-stable float formatting for CSV payloads ("%.12g").
std::string format_g12(double v);

}  // namespace cachevolt

#endif  // CACHEVOLT_IO_HPP_
