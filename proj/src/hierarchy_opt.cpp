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

#include "cachevolt/hierarchy_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cachevolt/errors.hpp"

namespace cachevolt {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

const MissRates& MissRateTable::lookup(std::int64_t l1_bytes,
                                       std::int64_t l2_bytes) const {
  const auto it = entries.find({l1_bytes, l2_bytes});
  if (it == entries.end()) throw MissingMissRate(l1_bytes, l2_bytes);
  return it->second;
}

void MissRateTable::validate() const {
  std::int64_t prev_l1 = -1;
  double prev_rate = 0.0;
  for (const auto& [key, rates] : entries) {
    if (rates.l1_miss < 0.0 || rates.l1_miss > 1.0 ||
        rates.l2_local_miss < 0.0 || rates.l2_local_miss > 1.0)
      throw OutOfRange("miss rates for (l1=" + std::to_string(key.first) +
                       ", l2=" + std::to_string(key.second) +
                       ") must lie in [0, 1]");
    // The map is ordered by (l1_size, l2_size), so within one l1 group the
    // entries arrive in ascending l2 size.
    if (key.first == prev_l1 && rates.l2_local_miss > prev_rate)
      throw OutOfRange(
          "l2 local miss rate must be non-increasing in l2 size "
          "(violated at l1=" +
          std::to_string(key.first) + ", l2=" + std::to_string(key.second) +
          ")");
    prev_l1 = key.first;
    prev_rate = rates.l2_local_miss;
  }
}

void HierarchySpec::validate() const {
  if (l1_candidates.empty() || l2_candidates.empty())
    throw OutOfRange("candidate lists must not be empty");
  if (!(mem_latency > 0.0)) throw OutOfRange("mem latency must be positive");
  if (runtime < 0.0) throw OutOfRange("runtime must be non-negative");
  if (accesses < 0) throw OutOfRange("access count must be non-negative");
  for (const auto& c : l1_candidates) c.validate();
  for (const auto& c : l2_candidates) c.validate();
  miss_table.validate();
}

double amat(double l1_hit, double l1_miss, double l2_hit, double l2_miss,
            double mem_latency) {
  if (l1_miss < 0.0 || l1_miss > 1.0 || l2_miss < 0.0 || l2_miss > 1.0)
    throw OutOfRange("miss rates must lie in [0, 1]");
  return l1_hit + l1_miss * (l2_hit + l2_miss * mem_latency);
}

EnergyBreakdown system_energy(const HierarchySpec& h,
                              const SystemAssignment& s) {
  if (s.l1_index < 0 ||
      s.l1_index >= static_cast<int>(h.l1_candidates.size()) ||
      s.l2_index < 0 || s.l2_index >= static_cast<int>(h.l2_candidates.size()))
    throw OutOfRange("system assignment indexes a missing candidate");
  const CacheSpec& l1 = h.l1_candidates[s.l1_index];
  const CacheSpec& l2 = h.l2_candidates[s.l2_index];
  const MissRates& mr = h.miss_table.lookup(l1.size_bytes, l2.size_bytes);

  EnergyBreakdown e;
  e.l1_leakage_energy = cache_leakage(l1, s.l1_assignment) * h.runtime;
  e.l2_leakage_energy = cache_leakage(l2, s.l2_assignment) * h.runtime;
  const double acc = static_cast<double>(h.accesses);
  e.l1_dynamic = acc * l1.read_energy;
  e.l2_dynamic = acc * mr.l1_miss * l2.read_energy;
  e.mem_dynamic =
      acc * mr.l1_miss * mr.l2_local_miss * h.mem_energy_per_access;
  e.amat = amat(cache_delay(l1, s.l1_assignment), mr.l1_miss,
                cache_delay(l2, s.l2_assignment), mr.l2_local_miss,
                h.mem_latency);
  return e;
}

const char* objective_name(Objective o) {
  return o == Objective::kLeakage ? "leakage" : "total_energy";
}

Objective objective_from_name(const std::string& name) {
  if (name == "leakage") return Objective::kLeakage;
  if (name == "total_energy") return Objective::kTotalEnergy;
  throw ParseError("<objective>", 0,
                   "unknown objective '" + name +
                       "' (expected leakage or total_energy)");
}

namespace {

// Slowest achievable access time: with monotone models that is the
// all-(vth_max, tox_max) corner. Used as the effective budget when the AMAT
// constraint puts no limit on a level (e.g. an L2 that is never reached).
double slowest_delay(const CacheSpec& spec) {
  const TechGrid& g = spec.grid;
  const TechPoint top{g.vth_at(g.vth_count() - 1), g.tox_at(g.tox_count() - 1)};
  return cache_delay(spec, expand_scheme(SchemeKind::kSchemeIII, {top}));
}

double candidate_objective(const HierarchySpec& h, Objective objective,
                           const SystemAssignment& sys,
                           const EnergyBreakdown& energy) {
  if (objective == Objective::kTotalEnergy) return energy.total();
  const CacheSpec& l1 = h.l1_candidates[sys.l1_index];
  const CacheSpec& l2 = h.l2_candidates[sys.l2_index];
  return cache_leakage(l1, sys.l1_assignment) +
         cache_leakage(l2, sys.l2_assignment);
}

}  // namespace

LevelReport optimize_l2_report(const HierarchySpec& h, int l1_index,
                               const Assignment& l1_assignment,
                               double amat_budget, SchemeKind split,
                               Objective objective, const SearchConfig& cfg) {
  h.validate();
  if (l1_index < 0 || l1_index >= static_cast<int>(h.l1_candidates.size()))
    throw OutOfRange("l1 index out of range");
  const CacheSpec& l1 = h.l1_candidates[l1_index];
  const double l1_hit = cache_delay(l1, l1_assignment);

  LevelReport report;
  for (int j = 0; j < static_cast<int>(h.l2_candidates.size()); ++j) {
    const CacheSpec& l2 = h.l2_candidates[j];
    const MissRates& mr = h.miss_table.lookup(l1.size_bytes, l2.size_bytes);

    LevelCandidateResult cand;
    cand.index = j;
    cand.size_bytes = l2.size_bytes;

    if (mr.l1_miss <= 0.0) {
      // L2 is never accessed; its access time does not enter the AMAT, so
      // the budget degenerates to the slowest (leakage-optimal) corner.
      cand.hit_budget = l1_hit <= amat_budget ? slowest_delay(l2) : 0.0;
    } else {
      cand.hit_budget = (amat_budget - l1_hit) / mr.l1_miss -
                        mr.l2_local_miss * h.mem_latency;
    }

    if (cand.hit_budget > 0.0) {
      cand.opt = optimize({l2, split, cand.hit_budget}, cfg);
      cand.feasible = cand.opt.feasible;
    }
    if (cand.feasible) {
      SystemAssignment sys{l1_index, j, l1_assignment, cand.opt.assignment};
      cand.energy = system_energy(h, sys);
      cand.objective = candidate_objective(h, objective, sys, cand.energy);
      if (report.best < 0 ||
          cand.objective < report.candidates[report.best].objective) {
        report.best = static_cast<int>(report.candidates.size());
        report.best_assignment = sys;
      }
    }
    report.candidates.push_back(std::move(cand));
  }
  return report;
}

LevelReport optimize_l2(const HierarchySpec& h, int l1_index,
                        const Assignment& l1_assignment, double amat_budget,
                        SchemeKind split, Objective objective,
                        const SearchConfig& cfg) {
  LevelReport report = optimize_l2_report(h, l1_index, l1_assignment,
                                          amat_budget, split, objective, cfg);
  if (report.best < 0)
    throw NoFeasibleL2("no L2 candidate meets the AMAT budget of " +
                       std::to_string(amat_budget * 1e9) + " ns");
  return report;
}

LevelReport optimize_l1_report(const HierarchySpec& h, int l2_index,
                               const Assignment& l2_assignment,
                               double amat_budget, SchemeKind split,
                               Objective objective, const SearchConfig& cfg) {
  h.validate();
  if (l2_index < 0 || l2_index >= static_cast<int>(h.l2_candidates.size()))
    throw OutOfRange("l2 index out of range");
  const CacheSpec& l2 = h.l2_candidates[l2_index];
  const double l2_hit = cache_delay(l2, l2_assignment);

  LevelReport report;
  for (int i = 0; i < static_cast<int>(h.l1_candidates.size()); ++i) {
    const CacheSpec& l1 = h.l1_candidates[i];
    const MissRates& mr = h.miss_table.lookup(l1.size_bytes, l2.size_bytes);

    LevelCandidateResult cand;
    cand.index = i;
    cand.size_bytes = l1.size_bytes;
    cand.hit_budget =
        amat_budget -
        mr.l1_miss * (l2_hit + mr.l2_local_miss * h.mem_latency);

    if (cand.hit_budget > 0.0) {
      cand.opt = optimize({l1, split, cand.hit_budget}, cfg);
      cand.feasible = cand.opt.feasible;
    }
    if (cand.feasible) {
      SystemAssignment sys{i, l2_index, cand.opt.assignment, l2_assignment};
      cand.energy = system_energy(h, sys);
      cand.objective = candidate_objective(h, objective, sys, cand.energy);
      if (report.best < 0 ||
          cand.objective < report.candidates[report.best].objective) {
        report.best = static_cast<int>(report.candidates.size());
        report.best_assignment = sys;
      }
    }
    report.candidates.push_back(std::move(cand));
  }
  return report;
}

LevelReport optimize_l1(const HierarchySpec& h, int l2_index,
                        const Assignment& l2_assignment, double amat_budget,
                        SchemeKind split, Objective objective,
                        const SearchConfig& cfg) {
  LevelReport report = optimize_l1_report(h, l2_index, l2_assignment,
                                          amat_budget, split, objective, cfg);
  if (report.best < 0)
    throw NoFeasibleL1("no L1 candidate meets the AMAT budget of " +
                       std::to_string(amat_budget * 1e9) + " ns");
  return report;
}

// ---------------------------------------------------------------------------
// Tuple sweep.
//
// With the two cache sizes fixed, the AMAT constraint is linear in the eight
// per-component delays (weight 1 for the four L1 components, weight l1_miss
// for the four L2 components), and the objective separates into a constant
// dynamic part plus per-component leakage energies. For one choice of value
// subsets this is an eight-class multiple-choice selection, solved exactly
// by merging components one at a time while keeping only Pareto-optimal
// (weighted delay, energy) partial selections.
// ---------------------------------------------------------------------------

namespace {

// At most `max_count` evenly spaced values (by index) spanning the axis.
std::vector<double> coarsen_axis(const std::vector<double>& values,
                                 int max_count) {
  const int n = static_cast<int>(values.size());
  if (n <= max_count || max_count < 2) {
    if (max_count == 1 && n > 1) return {values.front()};
    return values;
  }
  std::vector<double> out;
  out.reserve(max_count);
  for (int i = 0; i < max_count; ++i) {
    const int idx = static_cast<int>(
        std::llround(double(i) * double(n - 1) / double(max_count - 1)));
    out.push_back(values[idx]);
  }
  return out;
}

// All k-element subsets of {0..n-1} in lexicographic order.
std::vector<std::vector<int>> combinations(int n, int k) {
  std::vector<std::vector<int>> all;
  std::vector<int> cur(k);
  for (int i = 0; i < k; ++i) cur[i] = i;
  if (k > n) return all;
  while (true) {
    all.push_back(cur);
    int i = k - 1;
    while (i >= 0 && cur[i] == n - k + i) --i;
    if (i < 0) break;
    ++cur[i];
    for (int j = i + 1; j < k; ++j) cur[j] = cur[j - 1] + 1;
  }
  return all;
}

struct SlotCandidate {
  TechPoint point;
  double wdelay = 0.0;  // weighted delay contribution
  double energy = 0.0;  // leakage energy contribution over the window
};

struct MergeState {
  double wdelay = 0.0;
  double energy = 0.0;
  int back = -1;  // state index in the previous level
  int cand = -1;  // candidate index chosen at this slot
};

// Sorted by weighted delay with dominated entries dropped (energy strictly
// decreasing). Stable, so generation order breaks exact ties.
template <typename T>
void pareto_prune(std::vector<T>& v) {
  std::stable_sort(v.begin(), v.end(), [](const T& a, const T& b) {
    if (a.wdelay != b.wdelay) return a.wdelay < b.wdelay;
    return a.energy < b.energy;
  });
  std::vector<T> kept;
  kept.reserve(v.size());
  for (const T& s : v)
    if (kept.empty() || s.energy < kept.back().energy) kept.push_back(s);
  v.swap(kept);
}

struct CellOutcome {
  bool feasible = false;
  double leak_energy = kInf;  // sum of the eight leakage energies
  std::array<TechPoint, 8> points{};
};

// Exact minimum over all mappings of the eight components onto the given
// value subsets, subject to the weighted delay bound.
CellOutcome solve_subset(const std::array<const ComponentModel*, 8>& models,
                         const std::array<double, 8>& weights,
                         const std::vector<double>& vths,
                         const std::vector<double>& toxs, double bound,
                         double runtime) {
  CellOutcome out;

  std::array<std::vector<SlotCandidate>, 8> cands;
  for (int s = 0; s < 8; ++s) {
    for (double v : vths) {
      for (double t : toxs) {
        const TechPoint pt{v, t};
        SlotCandidate c;
        c.point = pt;
        c.wdelay = weights[s] * eval_delay(models[s]->delay, pt);
        c.energy = runtime * eval_leakage(models[s]->leakage, pt);
        cands[s].push_back(c);
      }
    }
    pareto_prune(cands[s]);
  }

  std::array<double, 9> suffix_min{};
  suffix_min[8] = 0.0;
  for (int s = 7; s >= 0; --s)
    suffix_min[s] = suffix_min[s + 1] + cands[s].front().wdelay;

  std::array<std::vector<MergeState>, 8> levels;
  for (int i = 0; i < static_cast<int>(cands[0].size()); ++i) {
    const auto& c = cands[0][i];
    if (c.wdelay + suffix_min[1] <= bound)
      levels[0].push_back({c.wdelay, c.energy, -1, i});
  }
  pareto_prune(levels[0]);

  for (int s = 1; s < 8; ++s) {
    auto& next = levels[s];
    for (int prev = 0; prev < static_cast<int>(levels[s - 1].size()); ++prev) {
      const MergeState& ps = levels[s - 1][prev];
      for (int i = 0; i < static_cast<int>(cands[s].size()); ++i) {
        const auto& c = cands[s][i];
        const double wd = ps.wdelay + c.wdelay;
        if (wd + suffix_min[s + 1] > bound) continue;
        next.push_back({wd, ps.energy + c.energy, prev, i});
      }
    }
    pareto_prune(next);
    if (next.empty()) return out;
  }

  int best = -1;
  for (int i = 0; i < static_cast<int>(levels[7].size()); ++i)
    if (best < 0 || levels[7][i].energy < levels[7][best].energy) best = i;
  if (best < 0) return out;

  out.feasible = true;
  out.leak_energy = levels[7][best].energy;
  int idx = best;
  for (int s = 7; s >= 0; --s) {
    const MergeState& st = levels[s][idx];
    out.points[s] = cands[s][st.cand].point;
    idx = st.back;
  }
  return out;
}

}  // namespace

const TupleCell& TupleMatrix::at(int m, int n) const {
  return cells[static_cast<std::size_t>(m - 1) * max_n + (n - 1)];
}

TupleMatrix tuple_sweep(const HierarchySpec& h, int l1_index, int l2_index,
                        double amat_budget, const TupleBudget& budget,
                        int coarse_tox, int coarse_vth) {
  h.validate();
  if (l1_index < 0 || l1_index >= static_cast<int>(h.l1_candidates.size()) ||
      l2_index < 0 || l2_index >= static_cast<int>(h.l2_candidates.size()))
    throw OutOfRange("candidate index out of range");
  if (budget.max_tox_values < 1 || budget.max_vth_values < 1)
    throw OutOfRange("tuple budget must allow at least one value per knob");

  const CacheSpec& l1 = h.l1_candidates[l1_index];
  const CacheSpec& l2 = h.l2_candidates[l2_index];
  if (!(l1.grid == l2.grid))
    throw GridMismatch("tuple sweep requires both levels on one knob grid");
  const MissRates& mr = h.miss_table.lookup(l1.size_bytes, l2.size_bytes);

  const std::vector<double> tox_axis =
      coarsen_axis(l1.grid.tox_values(), coarse_tox);
  const std::vector<double> vth_axis =
      coarsen_axis(l1.grid.vth_values(), coarse_vth);
  const int T = static_cast<int>(tox_axis.size());
  const int V = static_cast<int>(vth_axis.size());

  std::array<const ComponentModel*, 8> models{};
  std::array<double, 8> weights{};
  for (int k = 0; k < kComponentCount; ++k) {
    models[k] = &l1.models[k];
    weights[k] = 1.0;
    models[4 + k] = &l2.models[k];
    weights[4 + k] = mr.l1_miss;
  }

  // amat <= budget  <=>  sum(L1 delays) + l1_miss * sum(L2 delays) <= bound.
  const double bound =
      amat_budget - mr.l1_miss * mr.l2_local_miss * h.mem_latency;

  TupleMatrix matrix;
  matrix.max_m = budget.max_tox_values;
  matrix.max_n = budget.max_vth_values;

  for (int m = 1; m <= budget.max_tox_values; ++m) {
    for (int n = 1; n <= budget.max_vth_values; ++n) {
      TupleCell cell;
      cell.m = m;
      cell.n = n;
      CellOutcome best;
      std::vector<double> best_toxs, best_vths;

      if (bound > 0.0) {
        // More allowed values than the axis carries changes nothing.
        const auto tox_sets = combinations(T, std::min(m, T));
        const auto vth_sets = combinations(V, std::min(n, V));
        std::vector<double> toxs, vths;
        for (const auto& ts : tox_sets) {
          toxs.clear();
          for (int i : ts) toxs.push_back(tox_axis[i]);
          for (const auto& vs : vth_sets) {
            vths.clear();
            for (int i : vs) vths.push_back(vth_axis[i]);
            CellOutcome o =
                solve_subset(models, weights, vths, toxs, bound, h.runtime);
            if (o.feasible && o.leak_energy < best.leak_energy) {
              best = o;
              best_toxs = toxs;
              best_vths = vths;
            }
          }
        }
      }

      if (best.feasible) {
        cell.feasible = true;
        cell.assignment.l1_index = l1_index;
        cell.assignment.l2_index = l2_index;
        for (int k = 0; k < kComponentCount; ++k) {
          cell.assignment.l1_assignment[k] = best.points[k];
          cell.assignment.l2_assignment[k] = best.points[4 + k];
        }
        cell.total_energy = system_energy(h, cell.assignment).total();
        cell.tox_values = best_toxs;
        cell.vth_values = best_vths;
      }
      matrix.cells.push_back(std::move(cell));
    }
  }
  return matrix;
}

}  // namespace cachevolt
