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

#include "cachevolt/cli.hpp"

#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cachevolt/errors.hpp"
#include "cachevolt/io.hpp"
#include "cachevolt/single_opt.hpp"
#include "cachevolt/synthetic.hpp"

namespace cachevolt {

namespace {

using njson = nlohmann::ordered_json;

constexpr double kNano = 1e-9;

void emit(const std::string& out_path, const std::string& payload) {
  if (out_path.empty()) {
    std::cout << payload;
  } else {
    atomic_write(out_path, payload);
  }
}

njson assignment_json(const Assignment& asg) {
  njson j;
  for (ComponentKind k : kAllComponents) {
    const TechPoint& p = at(asg, k);
    j[component_name(k)] = njson{{"vth_V", p.vth}, {"tox_A", p.tox}};
  }
  return j;
}

njson opt_result_json(const std::string& spec_name, SchemeKind scheme,
                      const OptResult& r) {
  return njson{{"spec", spec_name},
               {"scheme", scheme_name(scheme)},
               {"budget_ns", r.delay_budget / kNano},
               {"feasible", r.feasible},
               {"leakage_nW", r.leakage / kNano},
               {"delay_ns", r.delay / kNano},
               {"method", r.method},
               {"quantization_slack_ns", r.quantization_slack / kNano},
               {"assignment", assignment_json(r.assignment)}};
}

constexpr const char* kFrontierHeader =
    "budget_ns,leakage_nW,delay_ns,feasible,vth_cell,tox_cell,vth_dec,"
    "tox_dec,vth_addr,tox_addr,vth_data,tox_data";

std::string frontier_csv(const std::vector<OptResult>& results) {
  std::string out = std::string(kFrontierHeader) + "\n";
  for (const OptResult& r : results) {
    out += format_g12(r.delay_budget / kNano) + "," +
           format_g12(r.leakage / kNano) + "," + format_g12(r.delay / kNano) +
           "," + (r.feasible ? "1" : "0");
    for (ComponentKind k : kAllComponents) {
      const TechPoint& p = at(r.assignment, k);
      out += "," + format_g12(p.vth) + "," + format_g12(p.tox);
    }
    out += "\n";
  }
  return out;
}

njson energy_json(const EnergyBreakdown& e) {
  return njson{{"l1_leakage_nJ", e.l1_leakage_energy / kNano},
               {"l2_leakage_nJ", e.l2_leakage_energy / kNano},
               {"l1_dynamic_nJ", e.l1_dynamic / kNano},
               {"l2_dynamic_nJ", e.l2_dynamic / kNano},
               {"mem_dynamic_nJ", e.mem_dynamic / kNano},
               {"total_nJ", e.total() / kNano},
               {"amat_ns", e.amat / kNano}};
}

// --- fit ---------------------------------------------------------------------

struct FitOpts {
  std::string samples_path;
  std::string out_path;
  double ref_area = 1.0;
  double area_exponent = 2.0;
};

int run_fit(const FitOpts& o) {
  const auto samples = load_samples(o.samples_path);
  FittedModelFile f;
  f.model.ref_area = o.ref_area;
  f.model.area_exponent = o.area_exponent;
  f.model.leakage = fit_leakage(samples, &f.leakage_fit);
  f.model.delay = fit_delay(samples, &f.delay_fit);
  if (!o.out_path.empty()) save_fitted_model(f, o.out_path);
  std::cout << "leakage fit: rms " << format_g12(f.leakage_fit.rms_residual / kNano)
            << " nW over " << samples.size() << " samples ("
            << f.leakage_fit.iterations << " iterations)\n"
            << "delay fit: rms " << format_g12(f.delay_fit.rms_residual / kNano)
            << " ns over " << samples.size() << " samples ("
            << f.delay_fit.iterations << " iterations)\n";
  return 0;
}

// --- optimize ----------------------------------------------------------------

struct OptimizeOpts {
  std::string spec_path;
  std::string scheme = "scheme1";
  std::string method = "auto";
  double budget_ns = 0.0;
  std::vector<double> frontier_ns;
  std::string sweep;  // "vth=0.2" or "tox=12"
  std::string out_path;
  std::string format = "json";
  bool strict = false;
  long long dp_resolution = 100000;
  double oracle_cap = 1e8;
};

OptResult dispatch_optimize(const OptProblem& p, const std::string& method,
                            const SearchConfig& cfg) {
  if (method == "oracle") return optimize_oracle(p, cfg);
  if (method == "separable") return optimize_separable(p, cfg);
  if (method == "auto") return optimize(p, cfg);
  throw ParseError("<method>", 0,
                   "unknown method '" + method +
                       "' (expected auto, oracle or separable)");
}

int run_optimize(const OptimizeOpts& o) {
  const CacheSpec spec = load_cache_spec(o.spec_path);
  const SchemeKind scheme = scheme_from_name(o.scheme);
  const SearchConfig cfg{o.oracle_cap, o.dp_resolution};

  if (!o.sweep.empty()) {
    const auto eq = o.sweep.find('=');
    if (eq == std::string::npos)
      throw ParseError("<sweep>", 0, "expected knob=value, e.g. vth=0.2");
    const std::string knob = o.sweep.substr(0, eq);
    const double value = std::stod(o.sweep.substr(eq + 1));
    const SweepCurve curve = fixed_knob_sweep(spec, knob, value);
    if (o.format == "csv") {
      std::string out = "delay_ns,leakage_nW\n";
      for (const SweepPoint& pt : curve.points)
        out += format_g12(pt.delay / kNano) + "," +
               format_g12(pt.leakage / kNano) + "\n";
      emit(o.out_path, out);
    } else {
      njson pts = njson::array();
      for (const SweepPoint& pt : curve.points)
        pts.push_back(njson{{"delay_ns", pt.delay / kNano},
                            {"leakage_nW", pt.leakage / kNano}});
      njson j{{"spec", spec.name},
              {"fixed_knob", curve.fixed_knob},
              {curve.fixed_knob == "vth" ? "fixed_value_V" : "fixed_value_A",
               curve.fixed_value},
              {"points", pts}};
      emit(o.out_path, j.dump(2) + "\n");
    }
    return 0;
  }

  if (!o.frontier_ns.empty()) {
    std::vector<double> budgets;
    for (double b : o.frontier_ns) budgets.push_back(b * kNano);
    std::vector<OptResult> results;
    {
      // pareto_frontier sorts internally; method selection follows --method.
      std::sort(budgets.begin(), budgets.end());
      for (double b : budgets)
        results.push_back(dispatch_optimize({spec, scheme, b}, o.method, cfg));
    }
    if (o.format == "csv") {
      emit(o.out_path, frontier_csv(results));
    } else {
      njson arr = njson::array();
      for (const OptResult& r : results)
        arr.push_back(opt_result_json(spec.name, scheme, r));
      emit(o.out_path, arr.dump(2) + "\n");
    }
    const bool any_infeasible =
        std::any_of(results.begin(), results.end(),
                    [](const OptResult& r) { return !r.feasible; });
    return (o.strict && any_infeasible) ? 4 : 0;
  }

  if (!(o.budget_ns > 0))
    throw ParseError("<budget>", 0,
                     "one of --budget-ns, --frontier or --sweep is required");
  const OptResult r =
      dispatch_optimize({spec, scheme, o.budget_ns * kNano}, o.method, cfg);
  if (o.format == "csv") {
    emit(o.out_path, frontier_csv({r}));
  } else {
    emit(o.out_path, opt_result_json(spec.name, scheme, r).dump(2) + "\n");
  }
  return (o.strict && !r.feasible) ? 4 : 0;
}

// --- hierarchy -----------------------------------------------------------------

struct HierarchyOpts {
  std::string system_path;
  std::string mode;  // l2 | l1 | tuple
  double amat_budget_ns = 0.0;
  std::string split = "scheme2";
  std::string objective = "leakage";
  int l1_index = 0;
  int l2_index = 0;
  int max_m = 3;
  int max_n = 3;
  int coarse_tox = 5;
  int coarse_vth = 5;
  std::string out_path;
  bool strict = false;
  long long dp_resolution = 100000;
  double oracle_cap = 1e8;
};

njson level_report_json(const HierarchySpec& h, const LevelReport& rep,
                        Objective objective, const char* fixed_level,
                        int fixed_index, const TechPoint& fixed_point,
                        bool fixed_is_l1) {
  const std::vector<CacheSpec>& fixed_list =
      fixed_is_l1 ? h.l1_candidates : h.l2_candidates;
  njson cands = njson::array();
  for (const LevelCandidateResult& c : rep.candidates) {
    njson jc{{"index", c.index},
             {"name", fixed_is_l1 ? h.l2_candidates[c.index].name
                                  : h.l1_candidates[c.index].name},
             {"size_bytes", c.size_bytes},
             {"feasible", c.feasible},
             {"hit_budget_ns", c.hit_budget / kNano}};
    if (c.feasible) {
      jc["leakage_nW"] = c.opt.leakage / kNano;
      jc["delay_ns"] = c.opt.delay / kNano;
      jc[objective == Objective::kLeakage ? "objective_nW" : "objective_nJ"] =
          c.objective / kNano;
      jc["energy"] = energy_json(c.energy);
      jc["assignment"] = assignment_json(c.opt.assignment);
    }
    cands.push_back(jc);
  }
  njson j{{"workload", h.miss_table.workload},
          {"objective", objective_name(objective)},
          {"fixed",
           njson{{"level", fixed_level},
                 {"index", fixed_index},
                 {"name", fixed_list[fixed_index].name},
                 {"vth_V", fixed_point.vth},
                 {"tox_A", fixed_point.tox}}},
          {"candidates", cands},
          {"best_index", rep.best}};
  if (rep.best >= 0) {
    j["best"] = njson{
        {"l1_index", rep.best_assignment.l1_index},
        {"l2_index", rep.best_assignment.l2_index},
        {"l1_assignment", assignment_json(rep.best_assignment.l1_assignment)},
        {"l2_assignment", assignment_json(rep.best_assignment.l2_assignment)}};
  }
  return j;
}

int run_hierarchy(const HierarchyOpts& o) {
  const SystemFile sys = load_system(o.system_path);
  const HierarchySpec& h = sys.spec;
  const SchemeKind split = scheme_from_name(o.split);
  const Objective objective = objective_from_name(o.objective);
  const SearchConfig cfg{o.oracle_cap, o.dp_resolution};

  if (o.l1_index < 0 || o.l1_index >= static_cast<int>(h.l1_candidates.size()))
    throw ParseError("<l1-index>", 0, "l1 index out of range");
  if (o.l2_index < 0 || o.l2_index >= static_cast<int>(h.l2_candidates.size()))
    throw ParseError("<l2-index>", 0, "l2 index out of range");

  const Assignment l1_def =
      expand_scheme(SchemeKind::kSchemeIII, {sys.l1_default});
  const Assignment l2_def =
      expand_scheme(SchemeKind::kSchemeIII, {sys.l2_default});

  // When no budget is given, fall back to the AMAT of the baseline
  // configuration: the selected candidate pair at the default knob points.
  double amat_budget = o.amat_budget_ns * kNano;
  std::string budget_source = "explicit";
  if (!(amat_budget > 0)) {
    const CacheSpec& l1 = h.l1_candidates[o.l1_index];
    const CacheSpec& l2 = h.l2_candidates[o.l2_index];
    const MissRates& mr = h.miss_table.lookup(l1.size_bytes, l2.size_bytes);
    amat_budget = amat(cache_delay(l1, l1_def), mr.l1_miss,
                       cache_delay(l2, l2_def), mr.l2_local_miss,
                       h.mem_latency);
    budget_source = "baseline";
  }

  if (o.mode == "tuple") {
    const TupleMatrix matrix =
        tuple_sweep(h, o.l1_index, o.l2_index, amat_budget,
                    {o.max_m, o.max_n}, o.coarse_tox, o.coarse_vth);
    std::string out = "m,n,total_energy_nJ,feasible\n";
    for (const TupleCell& cell : matrix.cells) {
      out += std::to_string(cell.m) + "," + std::to_string(cell.n) + "," +
             (cell.feasible ? format_g12(cell.total_energy / kNano) : "inf") +
             "," + (cell.feasible ? "1" : "0") + "\n";
    }
    emit(o.out_path, out);
    const bool any_infeasible = std::any_of(
        matrix.cells.begin(), matrix.cells.end(),
        [](const TupleCell& c) { return !c.feasible; });
    return (o.strict && any_infeasible) ? 4 : 0;
  }

  LevelReport rep;
  njson j;
  if (o.mode == "l2") {
    rep = optimize_l2_report(h, o.l1_index, l1_def, amat_budget, split,
                             objective, cfg);
    j = level_report_json(h, rep, objective, "l1", o.l1_index, sys.l1_default,
                          /*fixed_is_l1=*/true);
  } else if (o.mode == "l1") {
    rep = optimize_l1_report(h, o.l2_index, l2_def, amat_budget, split,
                             objective, cfg);
    j = level_report_json(h, rep, objective, "l2", o.l2_index, sys.l2_default,
                          /*fixed_is_l1=*/false);
  } else {
    throw ParseError("<mode>", 0,
                     "unknown mode '" + o.mode + "' (expected l2, l1 or tuple)");
  }
  j["mode"] = o.mode;
  j["split"] = scheme_name(split);
  j["amat_budget_ns"] = amat_budget / kNano;
  j["amat_budget_source"] = budget_source;
  emit(o.out_path, j.dump(2) + "\n");
  return (o.strict && rep.best < 0) ? 4 : 0;
}

// --- gen-synthetic -------------------------------------------------------------

struct GenOpts {
  std::string out_dir = ".";
  std::uint64_t seed = 42;
};

int run_gen_synthetic(const GenOpts& o) {
  std::filesystem::create_directories(o.out_dir);
  const auto path = [&](const char* name) {
    return (std::filesystem::path(o.out_dir) / name).string();
  };

  Rng rng(o.seed);
  const CacheSpec cache16k = make_synthetic_cache(rng, "synthetic_16k", 16384,
                                                  0.02 * kNano, default_grid());
  save_cache_spec(cache16k, path("cache16k.json"));
  save_cache_spec(make_tiny_spec(), path("tiny.json"));

  Rng sys_rng(o.seed + 1);
  SystemFile sys;
  sys.spec = make_synthetic_system(sys_rng);
  sys.l1_default = {0.35, 12.0};
  sys.l2_default = {0.35, 12.0};
  save_system(sys, path("system.json"));

  const auto& cell = cache16k.model(ComponentKind::kCellArray);
  save_samples_csv(make_samples(cell, cache16k.grid, 5, 5),
                   path("samples_cell16k.csv"));
  Rng noise_rng(o.seed + 2);
  save_samples_csv(make_samples(cell, cache16k.grid, 5, 5, 0.01, &noise_rng),
                   path("samples_cell16k_noisy.csv"));

  std::cout << "wrote cache16k.json tiny.json system.json "
               "samples_cell16k.csv samples_cell16k_noisy.csv to "
            << o.out_dir << " (seed " << o.seed << ")\n";
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"cache leakage and access-time modeling with knob assignment "
               "optimization"};
  app.require_subcommand(1);
  int exit_code = 0;

  auto fit = std::make_shared<FitOpts>();
  {
    CLI::App* sub = app.add_subcommand(
        "fit", "fit leakage/delay coefficients from characterization samples");
    sub->add_option("--samples", fit->samples_path,
                    "sample file (.csv or .json)")
        ->required();
    sub->add_option("--out", fit->out_path, "output model JSON path");
    sub->add_option("--ref-area", fit->ref_area,
                    "relative area at the thinnest oxide");
    sub->add_option("--area-exponent", fit->area_exponent,
                    "power-law exponent of area growth with tox");
    sub->callback([fit, &exit_code] { exit_code = run_fit(*fit); });
  }

  auto opt = std::make_shared<OptimizeOpts>();
  {
    CLI::App* sub = app.add_subcommand(
        "optimize", "minimize cache leakage under a delay budget");
    sub->add_option("--spec", opt->spec_path, "cache spec JSON")->required();
    sub->add_option("--scheme", opt->scheme,
                    "knob sharing: scheme1|scheme2|scheme3");
    sub->add_option("--method", opt->method, "auto|oracle|separable");
    sub->add_option("--budget-ns", opt->budget_ns, "delay budget (ns)");
    sub->add_option("--frontier", opt->frontier_ns,
                    "comma-separated delay budgets (ns)")
        ->delimiter(',');
    sub->add_option("--sweep", opt->sweep,
                    "hold one knob (vth=<V> or tox=<A>) and sweep the other");
    sub->add_option("--out", opt->out_path, "output path (default stdout)");
    sub->add_option("--format", opt->format, "json|csv");
    sub->add_flag("--strict", opt->strict, "exit 4 when infeasible");
    sub->add_option("--dp-resolution", opt->dp_resolution,
                    "delay buckets for the separable search");
    sub->add_option("--oracle-cap", opt->oracle_cap,
                    "max combinations for exhaustive search");
    sub->callback([opt, &exit_code] { exit_code = run_optimize(*opt); });
  }

  auto hier = std::make_shared<HierarchyOpts>();
  {
    CLI::App* sub = app.add_subcommand(
        "hierarchy", "two-level system optimization under an AMAT budget");
    sub->add_option("--system", hier->system_path, "system bundle JSON")
        ->required();
    sub->add_option("--mode", hier->mode, "l2|l1|tuple")->required();
    sub->add_option("--amat-budget-ns", hier->amat_budget_ns,
                    "AMAT budget (ns); defaults to the baseline "
                    "configuration's AMAT");
    sub->add_option("--split", hier->split,
                    "knob sharing for the searched level: scheme2|scheme3");
    sub->add_option("--objective", hier->objective, "leakage|total_energy");
    sub->add_option("--l1-index", hier->l1_index, "L1 candidate");
    sub->add_option("--l2-index", hier->l2_index, "L2 candidate");
    sub->add_option("--max-m", hier->max_m, "max distinct tox values");
    sub->add_option("--max-n", hier->max_n, "max distinct vth values");
    sub->add_option("--coarse-tox", hier->coarse_tox,
                    "tox value candidates for the tuple sweep");
    sub->add_option("--coarse-vth", hier->coarse_vth,
                    "vth value candidates for the tuple sweep");
    sub->add_option("--out", hier->out_path, "output path (default stdout)");
    sub->add_flag("--strict", hier->strict, "exit 4 when nothing is feasible");
    sub->add_option("--dp-resolution", hier->dp_resolution,
                    "delay buckets for the separable search");
    sub->add_option("--oracle-cap", hier->oracle_cap,
                    "max combinations for exhaustive search");
    sub->callback([hier, &exit_code] { exit_code = run_hierarchy(*hier); });
  }

  auto gen = std::make_shared<GenOpts>();
  {
    CLI::App* sub = app.add_subcommand(
        "gen-synthetic", "emit the documented synthetic specs and tables");
    sub->add_option("--out-dir", gen->out_dir, "output directory");
    sub->add_option("--seed", gen->seed, "generator seed");
    sub->callback([gen, &exit_code] { exit_code = run_gen_synthetic(*gen); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const FitError& e) {
    std::cerr << "fit error: " << e.what() << "\n";
    return 3;
  } catch (const MissingMissRate& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 5;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_code;
}

}  // namespace cachevolt
