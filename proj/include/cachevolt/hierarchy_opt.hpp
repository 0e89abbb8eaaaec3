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

#ifndef CACHEVOLT_HIERARCHY_OPT_HPP_
#define CACHEVOLT_HIERARCHY_OPT_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cachevolt/cache_model.hpp"
#include "cachevolt/single_opt.hpp"

namespace cachevolt {

// Miss statistics for one (L1 size, L2 size) configuration. l2_local_miss
// is local: L2 misses over accesses that reached L2.
struct MissRates {
  double l1_miss = 0.0;
  double l2_local_miss = 0.0;
};

struct MissRateTable {
  std::string workload;
  std::map<std::pair<std::int64_t, std::int64_t>, MissRates> entries;

  const MissRates& lookup(std::int64_t l1_bytes, std::int64_t l2_bytes) const;

  // Rates must lie in [0, 1]; for a fixed L1 size, the local L2 miss rate
  // must be non-increasing in L2 size. Violations are data errors.
  void validate() const;
};

// A two-level cache system in front of a fixed main memory, with candidate
// organizations per level and the evaluation window that converts leakage
// power into energy.
struct HierarchySpec {
  std::vector<CacheSpec> l1_candidates;
  std::vector<CacheSpec> l2_candidates;
  MissRateTable miss_table;
  double mem_latency = 0.0;            // seconds
  double mem_energy_per_access = 0.0;  // joules
  std::int64_t accesses = 0;           // total L1 accesses in the window
  double runtime = 0.0;                // window length, seconds

  void validate() const;
};

struct SystemAssignment {
  int l1_index = 0;
  int l2_index = 0;
  Assignment l1_assignment{};
  Assignment l2_assignment{};
};

struct EnergyBreakdown {
  double l1_leakage_energy = 0.0;  // joules
  double l2_leakage_energy = 0.0;
  double l1_dynamic = 0.0;
  double l2_dynamic = 0.0;
  double mem_dynamic = 0.0;
  double amat = 0.0;  // seconds

  double total() const {
    return l1_leakage_energy + l2_leakage_energy + l1_dynamic + l2_dynamic +
           mem_dynamic;
  }
};

// Average memory access time of the two-level chain.
// Rates must be in [0, 1] (OutOfRange otherwise).
double amat(double l1_hit, double l1_miss, double l2_hit, double l2_miss,
            double mem_latency);

// Full energy accounting over the evaluation window:
//   leakage energy  = cache leakage power x runtime, per level;
//   dynamic energy  = accesses cascading down the hierarchy at the miss
//                     rates, times each level's per-access cost.
// Throws MissingMissRate when the (L1, L2) size pair is absent.
EnergyBreakdown system_energy(const HierarchySpec& h,
                              const SystemAssignment& s);

enum class Objective : int { kLeakage = 0, kTotalEnergy = 1 };

const char* objective_name(Objective o);
Objective objective_from_name(const std::string& name);  // throws ParseError

// Per-candidate outcome of a level optimization.
struct LevelCandidateResult {
  int index = 0;             // into the candidate list
  std::int64_t size_bytes = 0;
  bool feasible = false;
  double hit_budget = 0.0;   // seconds; <= 0 marks a structurally
                             // unreachable AMAT target for this candidate
  OptResult opt;             // the level's own search result when feasible
  double objective = 0.0;    // watts (leakage) or joules (total energy)
  EnergyBreakdown energy;    // populated when feasible
};

struct LevelReport {
  std::vector<LevelCandidateResult> candidates;
  int best = -1;  // position in `candidates`; -1 when none feasible
  SystemAssignment best_assignment{};
};

// For each L2 candidate: back-solve the L2 hit-time budget from the AMAT
// budget with L1 fixed, minimize L2 leakage under it (sharing granularity
// `split`: one pair, or core pair + peripheral pair), then rank candidates
// by `objective`. The _report variants mark infeasibility in the result;
// the plain ones throw NoFeasibleL2 / NoFeasibleL1 when nothing fits.
LevelReport optimize_l2_report(const HierarchySpec& h, int l1_index,
                               const Assignment& l1_assignment,
                               double amat_budget, SchemeKind split,
                               Objective objective = Objective::kLeakage,
                               const SearchConfig& cfg = {});
LevelReport optimize_l2(const HierarchySpec& h, int l1_index,
                        const Assignment& l1_assignment, double amat_budget,
                        SchemeKind split,
                        Objective objective = Objective::kLeakage,
                        const SearchConfig& cfg = {});

// The mirror problem: L2 fixed, choose the L1 candidate and assignment
// minimizing the system objective under the AMAT budget.
LevelReport optimize_l1_report(const HierarchySpec& h, int l2_index,
                               const Assignment& l2_assignment,
                               double amat_budget,
                               SchemeKind split = SchemeKind::kSchemeII,
                               Objective objective = Objective::kLeakage,
                               const SearchConfig& cfg = {});
LevelReport optimize_l1(const HierarchySpec& h, int l2_index,
                        const Assignment& l2_assignment, double amat_budget,
                        SchemeKind split = SchemeKind::kSchemeII,
                        Objective objective = Objective::kLeakage,
                        const SearchConfig& cfg = {});

// How many distinct process values a design may use per knob.
struct TupleBudget {
  int max_tox_values = 1;
  int max_vth_values = 1;
};

struct TupleCell {
  int m = 0;  // distinct tox values allowed
  int n = 0;  // distinct vth values allowed
  bool feasible = false;
  double total_energy = 0.0;  // joules, meaningful when feasible
  SystemAssignment assignment{};
  std::vector<double> tox_values;  // the chosen value subsets
  std::vector<double> vth_values;
};

struct TupleMatrix {
  std::vector<TupleCell> cells;  // row-major: m = 1..max_m, n = 1..max_n
  const TupleCell& at(int m, int n) const;
  int max_m = 0;
  int max_n = 0;
};

// For every (m, n) up to the caps: minimize total system energy over all
// choices of m tox values and n vth values from the (coarsened) grid axes
// and all mappings of the eight cache components onto them, subject to
// amat <= amat_budget. Exact for the given value-candidate axes, via subset
// enumeration with dominance pruning. The two levels must share a knob grid
// (GridMismatch otherwise). Axes are coarsened to at most coarse_tox /
// coarse_vth evenly spaced values to keep the subset space small.
TupleMatrix tuple_sweep(const HierarchySpec& h, int l1_index, int l2_index,
                        double amat_budget, const TupleBudget& budget,
                        int coarse_tox = 5, int coarse_vth = 5);

}  // namespace cachevolt

#endif  // CACHEVOLT_HIERARCHY_OPT_HPP_
