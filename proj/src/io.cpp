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

#include "cachevolt/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "cachevolt/errors.hpp"

namespace cachevolt {

namespace {

using njson = nlohmann::ordered_json;

constexpr double kNano = 1e-9;  // file unit (nW/ns/nJ) -> internal (W/s/J)

int line_of_offset(const std::string& text, std::size_t offset) {
  int line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

njson parse_json(const std::string& text, const std::string& path) {
  try {
    return njson::parse(text);
  } catch (const njson::parse_error& e) {
    throw ParseError(path, line_of_offset(text, e.byte), e.what());
  }
}

const njson& require(const njson& obj, const std::string& key,
                     const std::string& path) {
  if (!obj.is_object() || !obj.contains(key))
    throw ParseError(path, 0, "missing key '" + key + "'");
  return obj.at(key);
}

double require_num(const njson& obj, const std::string& key,
                   const std::string& path) {
  const njson& v = require(obj, key, path);
  if (!v.is_number())
    throw ParseError(path, 0, "key '" + key + "' must be a number");
  return v.get<double>();
}

std::int64_t require_int(const njson& obj, const std::string& key,
                         const std::string& path) {
  const njson& v = require(obj, key, path);
  if (!v.is_number_integer())
    throw ParseError(path, 0, "key '" + key + "' must be an integer");
  return v.get<std::int64_t>();
}

std::string require_str(const njson& obj, const std::string& key,
                        const std::string& path) {
  const njson& v = require(obj, key, path);
  if (!v.is_string())
    throw ParseError(path, 0, "key '" + key + "' must be a string");
  return v.get<std::string>();
}

// --- coefficient blocks -----------------------------------------------------

njson leakage_to_json(const LeakageCoeffs& c) {
  return njson{{"A0_nW", c.A0 / kNano},
               {"A1_nW", c.A1 / kNano},
               {"a1_perV", c.a1},
               {"A2_nW", c.A2 / kNano},
               {"a2_perA", c.a2}};
}

LeakageCoeffs leakage_from_json(const njson& j, const std::string& path) {
  LeakageCoeffs c;
  c.A0 = require_num(j, "A0_nW", path) * kNano;
  c.A1 = require_num(j, "A1_nW", path) * kNano;
  c.a1 = require_num(j, "a1_perV", path);
  c.A2 = require_num(j, "A2_nW", path) * kNano;
  c.a2 = require_num(j, "a2_perA", path);
  if (c.A1 < 0 || c.A2 < 0 || c.a1 > 0 || c.a2 > 0)
    throw ParseError(path, 0,
                     "leakage coefficients must satisfy A1,A2 >= 0 and "
                     "a1,a2 <= 0");
  return c;
}

njson delay_to_json(const DelayCoeffs& c) {
  return njson{{"k0_ns", c.k0 / kNano},
               {"k1_ns", c.k1 / kNano},
               {"k2_nsPerA", c.k2 / kNano},
               {"k3_perV", c.k3}};
}

DelayCoeffs delay_from_json(const njson& j, const std::string& path) {
  DelayCoeffs c;
  c.k0 = require_num(j, "k0_ns", path) * kNano;
  c.k1 = require_num(j, "k1_ns", path) * kNano;
  c.k2 = require_num(j, "k2_nsPerA", path) * kNano;
  c.k3 = require_num(j, "k3_perV", path);
  if (c.k1 < 0 || c.k2 < 0 || c.k3 < 0)
    throw ParseError(path, 0,
                     "delay coefficients must satisfy k1,k2,k3 >= 0");
  return c;
}

njson component_to_json(const ComponentModel& m) {
  return njson{{"leakage", leakage_to_json(m.leakage)},
               {"delay", delay_to_json(m.delay)},
               {"ref_area", m.ref_area},
               {"area_exponent", m.area_exponent}};
}

ComponentModel component_from_json(const njson& j, const std::string& path) {
  ComponentModel m;
  m.leakage = leakage_from_json(require(j, "leakage", path), path);
  m.delay = delay_from_json(require(j, "delay", path), path);
  m.ref_area = require_num(j, "ref_area", path);
  m.area_exponent = require_num(j, "area_exponent", path);
  if (m.ref_area <= 0) throw ParseError(path, 0, "ref_area must be positive");
  return m;
}

njson grid_to_json(const TechGrid& g) {
  return njson{{"vth_min_V", g.vth_min}, {"vth_max_V", g.vth_max},
               {"vth_step_V", g.vth_step}, {"tox_min_A", g.tox_min},
               {"tox_max_A", g.tox_max},  {"tox_step_A", g.tox_step}};
}

TechGrid grid_from_json(const njson& j, const std::string& path) {
  TechGrid g;
  g.vth_min = require_num(j, "vth_min_V", path);
  g.vth_max = require_num(j, "vth_max_V", path);
  g.vth_step = require_num(j, "vth_step_V", path);
  g.tox_min = require_num(j, "tox_min_A", path);
  g.tox_max = require_num(j, "tox_max_A", path);
  g.tox_step = require_num(j, "tox_step_A", path);
  try {
    g.validate();
  } catch (const Error& e) {
    throw ParseError(path, 0, e.what());
  }
  return g;
}

njson cache_to_json(const CacheSpec& spec) {
  njson comps;
  for (ComponentKind k : kAllComponents)
    comps[component_name(k)] = component_to_json(spec.model(k));
  return njson{{"name", spec.name},
               {"size_bytes", spec.size_bytes},
               {"read_energy_nJ", spec.read_energy / kNano},
               {"grid", grid_to_json(spec.grid)},
               {"components", comps}};
}

CacheSpec cache_from_json(const njson& j, const std::string& path) {
  CacheSpec spec;
  spec.name = require_str(j, "name", path);
  spec.size_bytes = require_int(j, "size_bytes", path);
  spec.read_energy = require_num(j, "read_energy_nJ", path) * kNano;
  spec.grid = grid_from_json(require(j, "grid", path), path);
  const njson& comps = require(j, "components", path);
  for (ComponentKind k : kAllComponents)
    spec.model(k) = component_from_json(require(comps, component_name(k), path), path);
  try {
    spec.validate();
  } catch (const Error& e) {
    throw ParseError(path, 0, e.what());
  }
  return spec;
}

}  // namespace

void RunConfig::validate() const {
  if (dp_resolution < 1000)
    throw OutOfRange("dp resolution must be at least 1000");
  if (oracle_cap < 1) throw OutOfRange("oracle cap must be at least 1");
  if (output_format != "json" && output_format != "csv")
    throw OutOfRange("output format must be json or csv");
  grid.validate();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path, 0, "cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void atomic_write(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + tmp + "' for writing");
    out << contents;
    if (!out) throw Error("short write to '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw Error("cannot move '" + tmp + "' into place");
}

std::string format_g12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// --- samples ----------------------------------------------------------------

namespace {

constexpr const char* kSamplesHeader = "vth_V,tox_A,leakage_nW,delay_ns";

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double_field(const std::string& field, const std::string& path,
                          int line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(field, &used);
    if (used != field.size())
      throw ParseError(path, line, "trailing junk in number '" + field + "'");
    return v;
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    throw ParseError(path, line, "bad number '" + field + "'");
  }
}

std::vector<CharacterizationSample> samples_from_csv(const std::string& text,
                                                     const std::string& path) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool saw_header = false;
  std::vector<CharacterizationSample> samples;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (!saw_header) {
      if (t != kSamplesHeader)
        throw ParseError(path, lineno,
                         "expected header '" + std::string(kSamplesHeader) +
                             "', got '" + t + "'");
      saw_header = true;
      continue;
    }
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(t);
    while (std::getline(ls, field, ',')) fields.push_back(trim(field));
    if (fields.size() != 4)
      throw ParseError(path, lineno, "expected 4 comma-separated fields");
    CharacterizationSample s;
    s.point.vth = parse_double_field(fields[0], path, lineno);
    s.point.tox = parse_double_field(fields[1], path, lineno);
    s.leakage = parse_double_field(fields[2], path, lineno) * kNano;
    s.delay = parse_double_field(fields[3], path, lineno) * kNano;
    if (!(s.leakage > 0) || !(s.delay > 0))
      throw ParseError(path, lineno, "leakage and delay must be positive");
    samples.push_back(s);
  }
  if (!saw_header) throw ParseError(path, 0, "empty file");
  if (samples.empty()) throw ParseError(path, 0, "no data rows");
  return samples;
}

std::vector<CharacterizationSample> samples_from_json(const std::string& text,
                                                      const std::string& path) {
  const njson j = parse_json(text, path);
  if (!j.is_array()) throw ParseError(path, 0, "expected a JSON array");
  std::vector<CharacterizationSample> samples;
  for (const njson& row : j) {
    CharacterizationSample s;
    s.point.vth = require_num(row, "vth_V", path);
    s.point.tox = require_num(row, "tox_A", path);
    s.leakage = require_num(row, "leakage_nW", path) * kNano;
    s.delay = require_num(row, "delay_ns", path) * kNano;
    if (!(s.leakage > 0) || !(s.delay > 0))
      throw ParseError(path, 0, "leakage and delay must be positive");
    samples.push_back(s);
  }
  if (samples.empty()) throw ParseError(path, 0, "no samples");
  return samples;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

std::vector<CharacterizationSample> load_samples(const std::string& path) {
  const std::string text = read_file(path);
  if (ends_with(path, ".json")) return samples_from_json(text, path);
  return samples_from_csv(text, path);
}

void save_samples_csv(const std::vector<CharacterizationSample>& samples,
                      const std::string& path) {
  std::string out = std::string(kSamplesHeader) + "\n";
  for (const auto& s : samples) {
    out += format_g12(s.point.vth) + "," + format_g12(s.point.tox) + "," +
           format_g12(s.leakage / kNano) + "," + format_g12(s.delay / kNano) +
           "\n";
  }
  atomic_write(path, out);
}

// --- cache specs ------------------------------------------------------------

CacheSpec load_cache_spec(const std::string& path) {
  return cache_from_json(parse_json(read_file(path), path), path);
}

void save_cache_spec(const CacheSpec& spec, const std::string& path) {
  atomic_write(path, cache_to_json(spec).dump(2) + "\n");
}

// --- fitted models ----------------------------------------------------------

void save_fitted_model(const FittedModelFile& f, const std::string& path) {
  njson j{{"leakage", leakage_to_json(f.model.leakage)},
          {"delay", delay_to_json(f.model.delay)},
          {"ref_area", f.model.ref_area},
          {"area_exponent", f.model.area_exponent},
          {"fit",
           njson{{"leakage_rms_nW", f.leakage_fit.rms_residual / kNano},
                 {"leakage_iterations", f.leakage_fit.iterations},
                 {"leakage_restarts", f.leakage_fit.restarts},
                 {"delay_rms_ns", f.delay_fit.rms_residual / kNano},
                 {"delay_iterations", f.delay_fit.iterations},
                 {"delay_restarts", f.delay_fit.restarts}}}};
  atomic_write(path, j.dump(2) + "\n");
}

FittedModelFile load_fitted_model(const std::string& path) {
  const njson j = parse_json(read_file(path), path);
  FittedModelFile f;
  f.model = component_from_json(j, path);
  if (j.contains("fit")) {
    const njson& fit = j.at("fit");
    f.leakage_fit.rms_residual =
        require_num(fit, "leakage_rms_nW", path) * kNano;
    f.leakage_fit.iterations =
        static_cast<int>(require_num(fit, "leakage_iterations", path));
    f.leakage_fit.restarts =
        static_cast<int>(require_num(fit, "leakage_restarts", path));
    f.delay_fit.rms_residual = require_num(fit, "delay_rms_ns", path) * kNano;
    f.delay_fit.iterations =
        static_cast<int>(require_num(fit, "delay_iterations", path));
    f.delay_fit.restarts =
        static_cast<int>(require_num(fit, "delay_restarts", path));
  }
  return f;
}

// --- system bundles ----------------------------------------------------------

SystemFile load_system(const std::string& path) {
  const njson j = parse_json(read_file(path), path);
  SystemFile sys;

  const njson& mt = require(j, "miss_table", path);
  sys.spec.miss_table.workload = require_str(mt, "workload", path);
  sys.spec.mem_latency = require_num(mt, "mem_latency_ns", path) * kNano;
  sys.spec.mem_energy_per_access =
      require_num(mt, "mem_energy_nJ", path) * kNano;
  const njson& entries = require(mt, "entries", path);
  if (!entries.is_array() || entries.empty())
    throw ParseError(path, 0, "miss_table.entries must be a non-empty array");
  for (const njson& e : entries) {
    const std::int64_t l1 = require_int(e, "l1_bytes", path);
    const std::int64_t l2 = require_int(e, "l2_bytes", path);
    sys.spec.miss_table.entries[{l1, l2}] = {
        require_num(e, "l1_miss", path),
        require_num(e, "l2_local_miss", path)};
  }

  sys.spec.accesses = require_int(j, "accesses", path);
  sys.spec.runtime = require_num(j, "runtime_ns", path) * kNano;

  const auto load_candidates = [&](const char* key,
                                   std::vector<CacheSpec>& out) {
    const njson& arr = require(j, key, path);
    if (!arr.is_array())
      throw ParseError(path, 0, std::string(key) + " must be an array");
    for (const njson& c : arr) out.push_back(cache_from_json(c, path));
  };
  load_candidates("l1_candidates", sys.spec.l1_candidates);
  load_candidates("l2_candidates", sys.spec.l2_candidates);

  const njson& d1 = require(j, "l1_default", path);
  sys.l1_default = {require_num(d1, "vth_V", path),
                    require_num(d1, "tox_A", path)};
  const njson& d2 = require(j, "l2_default", path);
  sys.l2_default = {require_num(d2, "vth_V", path),
                    require_num(d2, "tox_A", path)};

  try {
    // Completeness of the (l1, l2) pair coverage is deliberately not
    // checked here: a missing pair surfaces as MissingMissRate at use.
    sys.spec.validate();
  } catch (const Error& e) {
    throw ParseError(path, 0, e.what());
  }
  return sys;
}

void save_system(const SystemFile& sys, const std::string& path) {
  njson entries = njson::array();
  for (const auto& [key, rates] : sys.spec.miss_table.entries)
    entries.push_back(njson{{"l1_bytes", key.first},
                            {"l2_bytes", key.second},
                            {"l1_miss", rates.l1_miss},
                            {"l2_local_miss", rates.l2_local_miss}});
  njson l1s = njson::array(), l2s = njson::array();
  for (const auto& c : sys.spec.l1_candidates) l1s.push_back(cache_to_json(c));
  for (const auto& c : sys.spec.l2_candidates) l2s.push_back(cache_to_json(c));

  njson j{{"miss_table",
           njson{{"workload", sys.spec.miss_table.workload},
                 {"mem_latency_ns", sys.spec.mem_latency / kNano},
                 {"mem_energy_nJ", sys.spec.mem_energy_per_access / kNano},
                 {"entries", entries}}},
          {"accesses", sys.spec.accesses},
          {"runtime_ns", sys.spec.runtime / kNano},
          {"l1_default",
           njson{{"vth_V", sys.l1_default.vth}, {"tox_A", sys.l1_default.tox}}},
          {"l2_default",
           njson{{"vth_V", sys.l2_default.vth}, {"tox_A", sys.l2_default.tox}}},
          {"l1_candidates", l1s},
          {"l2_candidates", l2s}};
  atomic_write(path, j.dump(2) + "\n");
}

}  // namespace cachevolt
