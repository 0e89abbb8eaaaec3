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

#ifndef CACHEVOLT_SINGLE_OPT_HPP_
#define CACHEVOLT_SINGLE_OPT_HPP_

#include <string>
#include <vector>

#include "cachevolt/cache_model.hpp"

namespace cachevolt {

// Minimize cache leakage subject to cache_delay <= delay_budget, with knobs
// shared according to `scheme`.
struct OptProblem {
  CacheSpec spec;
  SchemeKind scheme = SchemeKind::kSchemeIII;
  double delay_budget = 0.0;  // seconds, > 0
};

// Search-tuning knobs, normally taken from RunConfig.
struct SearchConfig {
  // optimize_oracle refuses to enumerate more candidate combinations than
  // this; callers then fall back to optimize_separable.
  double oracle_cap = 1e8;
  // Bucket count for the separable DP's delay quantization. The DP is
  // conservative: it never accepts a truly infeasible assignment, and it
  // finds every assignment whose delay fits with class_count * budget /
  // dp_resolution to spare.
  long long dp_resolution = 100000;
};

struct OptResult {
  Assignment assignment{};
  double leakage = 0.0;  // watts, = cache_leakage(spec, assignment)
  double delay = 0.0;    // seconds, = cache_delay(spec, assignment)
  // When false, no grid assignment meets the budget and `assignment` holds
  // the minimum-delay one so frontier plots can show the wall.
  bool feasible = false;
  std::string method;         // "oracle" | "separable"
  double delay_budget = 0.0;  // echo of the problem budget
  // Worst-case delay slack of the separable DP's quantization (seconds):
  // assignments within this much of the budget may be missed. 0 for oracle.
  double quantization_slack = 0.0;
};

// Exhaustive enumeration over the scheme's class structure. Exact global
// minimum with deterministic tie-breaking: least leakage, then least delay,
// then lexicographically smallest (vth, tox) per component in declaration
// order. Internally parallelized when the candidate space is large; the
// result is identical regardless of thread count (CACHEVOLT_THREADS caps
// it). Throws EnumerationTooLarge past cfg.oracle_cap.
OptResult optimize_oracle(const OptProblem& p, const SearchConfig& cfg = {});

// Multiple-choice selection: per sharing class, enumerate (point, leakage,
// delay) candidates, prune dominated ones, then run dynamic programming
// over quantized delay. Same contract as the oracle up to the documented
// quantization slack; exact for single-class problems.
OptResult optimize_separable(const OptProblem& p, const SearchConfig& cfg = {});

// optimize_oracle when the candidate space fits under the cap, otherwise
// optimize_separable.
OptResult optimize(const OptProblem& p, const SearchConfig& cfg = {});

// One optimize() per budget. Budgets are sorted ascending internally, so
// callers get the same frontier regardless of argument order.
std::vector<OptResult> pareto_frontier(const CacheSpec& spec, SchemeKind scheme,
                                       std::vector<double> budgets,
                                       const SearchConfig& cfg = {});

// One point of a sensitivity sweep: the whole-cache figure with every
// component at the same knob setting.
struct SweepPoint {
  double delay = 0.0;    // seconds
  double leakage = 0.0;  // watts
};

struct SweepCurve {
  std::string fixed_knob;   // "vth" | "tox"
  double fixed_value = 0.0;  // volts or angstroms
  std::vector<SweepPoint> points;  // sorted by delay ascending
};

// Holds `knob` at `value` for all four components and sweeps the other knob
// across its grid axis, all components moving together. Throws OffGridValue
// when `value` is not on the grid, ParseError for an unknown knob label.
SweepCurve fixed_knob_sweep(const CacheSpec& spec, const std::string& knob,
                            double value);

}  // namespace cachevolt

#endif  // CACHEVOLT_SINGLE_OPT_HPP_
