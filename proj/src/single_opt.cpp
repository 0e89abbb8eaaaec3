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

#include "cachevolt/single_opt.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <thread>

#include "cachevolt/errors.hpp"

namespace cachevolt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One selectable knob setting for a sharing class, with the class's summed
// leakage and delay contributions.
struct ClassCandidate {
  TechPoint point;
  double leak = 0.0;
  double delay = 0.0;
};

using ClassTables = std::vector<std::vector<ClassCandidate>>;

ClassTables build_class_tables(const CacheSpec& spec, SchemeKind scheme) {
  const auto classes = scheme_classes(scheme);
  const auto pts = spec.grid.points();
  ClassTables tables(classes.size());
  for (std::size_t c = 0; c < classes.size(); ++c) {
    tables[c].reserve(pts.size());
    for (const TechPoint& p : pts) {
      ClassCandidate cand{p, 0.0, 0.0};
      for (ComponentKind k : classes[c]) {
        cand.leak += eval_leakage(spec.model(k).leakage, p);
        cand.delay += eval_delay(spec.model(k).delay, p);
      }
      tables[c].push_back(cand);
    }
  }
  return tables;
}

bool assignment_lex_less(const Assignment& a, const Assignment& b) {
  for (int i = 0; i < kComponentCount; ++i) {
    if (a[i].vth != b[i].vth) return a[i].vth < b[i].vth;
    if (a[i].tox != b[i].tox) return a[i].tox < b[i].tox;
  }
  return false;
}

Assignment combo_to_assignment(SchemeKind scheme, const ClassTables& tables,
                               const std::array<int, 4>& combo) {
  std::vector<TechPoint> pts;
  pts.reserve(tables.size());
  for (std::size_t c = 0; c < tables.size(); ++c)
    pts.push_back(tables[c][combo[c]].point);
  return expand_scheme(scheme, pts);
}

// Best-so-far feasible combo under the (leakage, delay, lexicographic
// assignment) order. The assignment comparison only runs on exact numeric
// ties, which keeps the hot loop cheap.
struct BestCombo {
  bool valid = false;
  double leak = kInf;
  double delay = kInf;
  std::array<int, 4> combo{};
};

void take_better(BestCombo& best, double leak, double delay,
                 const std::array<int, 4>& combo, SchemeKind scheme,
                 const ClassTables& tables) {
  if (best.valid) {
    if (leak > best.leak) return;
    if (leak == best.leak) {
      if (delay > best.delay) return;
      if (delay == best.delay &&
          !assignment_lex_less(combo_to_assignment(scheme, tables, combo),
                               combo_to_assignment(scheme, tables, best.combo)))
        return;
    }
  }
  best.valid = true;
  best.leak = leak;
  best.delay = delay;
  best.combo = combo;
}

// Scans outer-class indices [lo, hi) x the full inner space, keeping the
// best feasible combo. Suffix minimum delays let whole subtrees be skipped
// once they cannot meet the budget; that never discards a feasible combo.
void scan_feasible(const ClassTables& t, SchemeKind scheme, double budget,
                   const std::vector<double>& suffix_min_delay, int lo, int hi,
                   BestCombo& best) {
  const int c_count = static_cast<int>(t.size());
  std::array<int, 4> combo{};
  if (c_count == 1) {
    for (int i0 = lo; i0 < hi; ++i0) {
      const auto& a = t[0][i0];
      if (a.delay > budget) continue;
      combo[0] = i0;
      take_better(best, a.leak, a.delay, combo, scheme, t);
    }
    return;
  }
  if (c_count == 2) {
    const int g1 = static_cast<int>(t[1].size());
    for (int i0 = lo; i0 < hi; ++i0) {
      const auto& a = t[0][i0];
      if (a.delay + suffix_min_delay[1] > budget) continue;
      combo[0] = i0;
      for (int i1 = 0; i1 < g1; ++i1) {
        const auto& b = t[1][i1];
        const double d = a.delay + b.delay;
        if (d > budget) continue;
        combo[1] = i1;
        take_better(best, a.leak + b.leak, d, combo, scheme, t);
      }
    }
    return;
  }
  // Four independent classes.
  const int g1 = static_cast<int>(t[1].size());
  const int g2 = static_cast<int>(t[2].size());
  const int g3 = static_cast<int>(t[3].size());
  for (int i0 = lo; i0 < hi; ++i0) {
    const auto& a = t[0][i0];
    if (a.delay + suffix_min_delay[1] > budget) continue;
    combo[0] = i0;
    for (int i1 = 0; i1 < g1; ++i1) {
      const auto& b = t[1][i1];
      const double d01 = a.delay + b.delay;
      if (d01 + suffix_min_delay[2] > budget) continue;
      const double l01 = a.leak + b.leak;
      combo[1] = i1;
      for (int i2 = 0; i2 < g2; ++i2) {
        const auto& c = t[2][i2];
        const double d012 = d01 + c.delay;
        if (d012 + suffix_min_delay[3] > budget) continue;
        const double l012 = l01 + c.leak;
        combo[2] = i2;
        for (int i3 = 0; i3 < g3; ++i3) {
          const auto& e = t[3][i3];
          const double d = d012 + e.delay;
          if (d > budget) continue;
          // Cheap reject against the incumbent before the tie-aware update.
          const double l = l012 + e.leak;
          if (best.valid && l > best.leak) continue;
          combo[3] = i3;
          take_better(best, l, d, combo, scheme, t);
        }
      }
    }
  }
}

// The minimum-delay combo decomposes per class because delays add: pick each
// class's (delay, leak, lexicographic point) minimum independently.
std::array<int, 4> min_delay_combo(const ClassTables& t) {
  std::array<int, 4> combo{};
  for (std::size_t c = 0; c < t.size(); ++c) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(t[c].size()); ++i) {
      const auto& cand = t[c][i];
      const auto& inc = t[c][best];
      if (cand.delay < inc.delay ||
          (cand.delay == inc.delay &&
           (cand.leak < inc.leak ||
            (cand.leak == inc.leak && lex_less(cand.point, inc.point)))))
        best = i;
    }
    combo[c] = best;
  }
  return combo;
}

int thread_budget() {
  if (const char* env = std::getenv("CACHEVOLT_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

OptResult finish_result(const OptProblem& p, const Assignment& asg,
                        bool feasible, const char* method) {
  OptResult r;
  r.assignment = asg;
  r.leakage = cache_leakage(p.spec, asg);
  r.delay = cache_delay(p.spec, asg);
  r.feasible = feasible;
  r.method = method;
  r.delay_budget = p.delay_budget;
  return r;
}

void check_problem(const OptProblem& p) {
  if (!(p.delay_budget > 0.0))
    throw OutOfRange("delay budget must be positive");
  p.spec.validate();
}

}  // namespace

OptResult optimize_oracle(const OptProblem& p, const SearchConfig& cfg) {
  check_problem(p);
  const auto classes = scheme_classes(p.scheme);
  const double points = static_cast<double>(p.spec.grid.point_count());
  const double combos = std::pow(points, double(classes.size()));
  if (combos > cfg.oracle_cap)
    throw EnumerationTooLarge(
        std::to_string(classes.size()) + " classes x " +
        std::to_string(p.spec.grid.point_count()) +
        " grid points exceed the enumeration cap of " +
        std::to_string(static_cast<long long>(cfg.oracle_cap)));

  const ClassTables tables = build_class_tables(p.spec, p.scheme);
  const int c_count = static_cast<int>(tables.size());
  const int outer = static_cast<int>(tables[0].size());

  // suffix_min_delay[c] = least possible delay from classes c..end.
  std::vector<double> suffix(c_count + 1, 0.0);
  for (int c = c_count - 1; c >= 0; --c) {
    double mind = kInf;
    for (const auto& cand : tables[c]) mind = std::min(mind, cand.delay);
    suffix[c] = suffix[c + 1] + mind;
  }

  BestCombo best;
  const int want_threads = thread_budget();
  if (combos >= 2e6 && want_threads > 1 && outer > 1) {
    const int n_threads = std::min(want_threads, outer);
    std::vector<BestCombo> partial(n_threads);
    std::vector<std::thread> workers;
    workers.reserve(n_threads);
    for (int ti = 0; ti < n_threads; ++ti) {
      const int lo = static_cast<int>(std::int64_t(outer) * ti / n_threads);
      const int hi =
          static_cast<int>(std::int64_t(outer) * (ti + 1) / n_threads);
      workers.emplace_back([&, lo, hi, ti] {
        scan_feasible(tables, p.scheme, p.delay_budget, suffix, lo, hi,
                      partial[ti]);
      });
    }
    for (auto& w : workers) w.join();
    // The comparator is a strict total order over distinct combos, so this
    // reduction yields the same winner for any chunking.
    for (const BestCombo& b : partial)
      if (b.valid) take_better(best, b.leak, b.delay, b.combo, p.scheme, tables);
  } else {
    scan_feasible(tables, p.scheme, p.delay_budget, suffix, 0, outer, best);
  }

  if (best.valid) {
    return finish_result(
        p, combo_to_assignment(p.scheme, tables, best.combo), true, "oracle");
  }
  return finish_result(
      p, combo_to_assignment(p.scheme, tables, min_delay_combo(tables)), false,
      "oracle");
}

namespace {

// Candidates sorted by delay with dominated entries removed: delay strictly
// increasing, leakage strictly decreasing. The head is the class's
// minimum-delay choice under the standard tie-break.
std::vector<ClassCandidate> prune_dominated(std::vector<ClassCandidate> cands) {
  std::sort(cands.begin(), cands.end(),
            [](const ClassCandidate& a, const ClassCandidate& b) {
              if (a.delay != b.delay) return a.delay < b.delay;
              if (a.leak != b.leak) return a.leak < b.leak;
              return lex_less(a.point, b.point);
            });
  std::vector<ClassCandidate> kept;
  for (const auto& c : cands)
    if (kept.empty() || c.leak < kept.back().leak) kept.push_back(c);
  return kept;
}

}  // namespace

OptResult optimize_separable(const OptProblem& p, const SearchConfig& cfg) {
  check_problem(p);
  const ClassTables full = build_class_tables(p.spec, p.scheme);
  ClassTables tables(full.size());
  for (std::size_t c = 0; c < full.size(); ++c)
    tables[c] = prune_dominated(full[c]);
  const int c_count = static_cast<int>(tables.size());
  const double budget = p.delay_budget;

  const Assignment min_delay_asg =
      combo_to_assignment(p.scheme, tables, min_delay_combo(tables));

  if (c_count == 1) {
    // One class: the pruned list has strictly decreasing leakage, so the
    // best feasible choice is simply the last one within budget. Exact.
    const auto& cands = tables[0];
    int pick = -1;
    for (int i = 0; i < static_cast<int>(cands.size()); ++i)
      if (cands[i].delay <= budget) pick = i;
    if (pick < 0) return finish_result(p, min_delay_asg, false, "separable");
    return finish_result(
        p, expand_scheme(p.scheme, {cands[pick].point}), true, "separable");
  }

  const long long W = cfg.dp_resolution;
  const double delta = budget / static_cast<double>(W);
  const double slack = delta * c_count;

  // Integer weights round delay up, so a DP-feasible selection is always
  // truly feasible; anything whose true delay fits with c_count * delta to
  // spare is DP-feasible. That bounds the leakage loss by what the budget
  // interval (budget - slack, budget] buys.
  std::vector<std::vector<long long>> weights(c_count);
  for (int c = 0; c < c_count; ++c) {
    weights[c].reserve(tables[c].size());
    for (const auto& cand : tables[c]) {
      long long w = static_cast<long long>(std::ceil(cand.delay / delta));
      if (w < 0) w = 0;
      weights[c].push_back(w);
    }
  }

  const std::size_t cells = static_cast<std::size_t>(W) + 1;
  std::vector<double> leak(cells, kInf), tdelay(cells, kInf);
  std::vector<double> nleak(cells), ntdelay(cells);
  std::vector<std::vector<int>> choice(
      c_count, std::vector<int>(cells, -1));
  leak[0] = 0.0;
  tdelay[0] = 0.0;

  for (int c = 0; c < c_count; ++c) {
    std::fill(nleak.begin(), nleak.end(), kInf);
    std::fill(ntdelay.begin(), ntdelay.end(), kInf);
    auto& ch = choice[c];
    for (int i = 0; i < static_cast<int>(tables[c].size()); ++i) {
      const long long wi = weights[c][i];
      if (wi > W) continue;
      const double li = tables[c][i].leak;
      const double di = tables[c][i].delay;
      for (long long w = 0; w + wi <= W; ++w) {
        if (leak[w] == kInf) continue;
        const long long nw = w + wi;
        const double nl = leak[w] + li;
        const double nd = tdelay[w] + di;
        if (nl < nleak[nw] || (nl == nleak[nw] && nd < ntdelay[nw])) {
          nleak[nw] = nl;
          ntdelay[nw] = nd;
          ch[nw] = i;
        }
      }
    }
    leak.swap(nleak);
    tdelay.swap(ntdelay);
  }

  long long best_w = -1;
  for (long long w = 0; w <= W; ++w) {
    if (leak[w] == kInf) continue;
    if (best_w < 0 || leak[w] < leak[best_w] ||
        (leak[w] == leak[best_w] && tdelay[w] < tdelay[best_w]))
      best_w = w;
  }

  if (best_w < 0) {
    // Nothing fits the quantized budget. The true minimum delay may still
    // fit the real one (it then lies within the slack band of the wall).
    const bool fits = cache_delay(p.spec, min_delay_asg) <= budget;
    OptResult r = finish_result(p, min_delay_asg, fits, "separable");
    r.quantization_slack = slack;
    return r;
  }

  std::array<int, 4> combo{};
  long long w = best_w;
  for (int c = c_count - 1; c >= 0; --c) {
    const int i = choice[c][w];
    combo[c] = i;
    w -= weights[c][i];
  }
  OptResult r = finish_result(p, combo_to_assignment(p.scheme, tables, combo),
                              true, "separable");
  r.quantization_slack = slack;
  return r;
}

OptResult optimize(const OptProblem& p, const SearchConfig& cfg) {
  try {
    return optimize_oracle(p, cfg);
  } catch (const EnumerationTooLarge&) {
    return optimize_separable(p, cfg);
  }
}

std::vector<OptResult> pareto_frontier(const CacheSpec& spec,
                                       SchemeKind scheme,
                                       std::vector<double> budgets,
                                       const SearchConfig& cfg) {
  if (budgets.empty()) throw OutOfRange("budget list must not be empty");
  std::sort(budgets.begin(), budgets.end());
  std::vector<OptResult> results;
  results.reserve(budgets.size());
  for (double b : budgets) {
    OptProblem p{spec, scheme, b};
    results.push_back(optimize(p, cfg));
  }
  return results;
}

SweepCurve fixed_knob_sweep(const CacheSpec& spec, const std::string& knob,
                            double value) {
  spec.validate();
  SweepCurve curve;
  curve.fixed_knob = knob;
  std::vector<TechPoint> settings;
  if (knob == "vth") {
    curve.fixed_value = spec.grid.snap_vth(value);
    for (double t : spec.grid.tox_values())
      settings.push_back({curve.fixed_value, t});
  } else if (knob == "tox") {
    curve.fixed_value = spec.grid.snap_tox(value);
    for (double v : spec.grid.vth_values())
      settings.push_back({v, curve.fixed_value});
  } else {
    throw ParseError("<knob>", 0,
                     "unknown knob '" + knob + "' (expected vth or tox)");
  }
  for (const TechPoint& pt : settings) {
    const Assignment asg = expand_scheme(SchemeKind::kSchemeIII, {pt});
    curve.points.push_back(
        {cache_delay(spec, asg), cache_leakage(spec, asg)});
  }
  std::sort(curve.points.begin(), curve.points.end(),
            [](const SweepPoint& a, const SweepPoint& b) {
              if (a.delay != b.delay) return a.delay < b.delay;
              return a.leakage < b.leakage;
            });
  return curve;
}

}  // namespace cachevolt
