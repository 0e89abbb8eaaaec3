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

#include "cachevolt/synthetic.hpp"

#include <algorithm>
#include <cmath>

#include "cachevolt/errors.hpp"

namespace cachevolt {

namespace {
constexpr double kNano = 1e-9;  // generator magnitudes are nW / ns shaped
}

TechGrid default_grid() { return TechGrid{0.2, 0.5, 0.025, 10.0, 14.0, 0.5}; }

TechGrid small_grid() { return TechGrid{0.2, 0.5, 0.075, 10.0, 14.0, 1.0}; }

ComponentModel make_synthetic_component(Rng& rng, double leak_scale,
                                        double delay_scale, bool core) {
  // Subthreshold and gate magnitudes at the (0.2 V, 10 A) corner of the
  // standard spans; the amplitudes are back-computed so those magnitudes
  // hold whatever exponent is drawn.
  const double sub0 = leak_scale * rng.uniform(0.8, 1.25);
  const double gate0 = sub0 * rng.uniform(1.3, 2.0);

  // Core cells keep shallower falloffs: their leakage still dominates at
  // the slow end of the grid, and the last tox step still buys something.
  const double a1 =
      core ? rng.uniform(-9.0, -6.5) : rng.uniform(-14.0, -9.0);
  const double a2 =
      core ? rng.uniform(-1.1, -0.7) : rng.uniform(-2.2, -1.2);

  ComponentModel m;
  m.leakage.A0 = sub0 * rng.uniform(0.2, 0.5);
  m.leakage.a1 = a1;
  m.leakage.A1 = sub0 * std::exp(-0.2 * a1);
  m.leakage.a2 = a2;
  m.leakage.A2 = gate0 * std::exp(-10.0 * a2);

  const double k3 = rng.uniform(3.0, 6.0);
  const double vexp0 = delay_scale * rng.uniform(0.15, 0.3) * kNano;
  m.delay.k3 = k3;
  m.delay.k1 = vexp0 * std::exp(-0.2 * k3);
  m.delay.k2 = delay_scale * kNano *
               (core ? rng.uniform(0.008, 0.014) : rng.uniform(0.01, 0.02));
  m.delay.k0 = delay_scale * rng.uniform(0.1, 0.4) * kNano;

  m.ref_area = 1.0;
  m.area_exponent = 2.0;
  return m;
}

CacheSpec make_synthetic_cache(Rng& rng, const std::string& name,
                               std::int64_t size_bytes, double read_energy,
                               const TechGrid& grid) {
  const double size_kb = static_cast<double>(size_bytes) / 1024.0;
  const double core_scale = 2000.0 * size_kb * kNano;  // watts
  const double delay_scale =
      std::pow(static_cast<double>(size_bytes) / 16384.0, 0.3);
  // Keeps both of every peripheral's leakage amplitudes (subthreshold and
  // gate) at least 10x below the core's across the draw ranges: the worst
  // sub ratio is 0.8*25/1.25 = 16, the worst gate ratio 0.8*1.3*25/(1.25*2).
  const double dominance = rng.uniform(25.0, 40.0);

  CacheSpec spec;
  spec.name = name;
  spec.size_bytes = size_bytes;
  spec.read_energy = read_energy;
  spec.grid = grid;
  spec.model(ComponentKind::kCellArray) =
      make_synthetic_component(rng, core_scale, delay_scale, /*core=*/true);
  for (ComponentKind k :
       {ComponentKind::kDecoder, ComponentKind::kAddressDrivers,
        ComponentKind::kDataDrivers}) {
    const double periph_delay_scale = delay_scale * rng.uniform(0.6, 1.0);
    spec.model(k) = make_synthetic_component(rng, core_scale / dominance,
                                             periph_delay_scale,
                                             /*core=*/false);
  }
  return spec;
}

CacheSpec make_random_cache(Rng& rng, const std::string& name,
                            const TechGrid& grid) {
  CacheSpec spec;
  spec.name = name;
  spec.size_bytes = 16384;
  spec.read_energy = 0.0;
  spec.grid = grid;
  for (ComponentKind k : kAllComponents) {
    const double leak_scale = rng.uniform(50.0, 500.0) * kNano;
    const double delay_scale = rng.uniform(0.5, 1.5);
    // Alternate the falloff regime per draw so components differ widely.
    const bool gentle = rng.uniform() < 0.5;
    spec.model(k) =
        make_synthetic_component(rng, leak_scale, delay_scale, gentle);
  }
  return spec;
}

CacheSpec make_tiny_spec() {
  CacheSpec spec;
  spec.name = "tiny";
  spec.size_bytes = 1024;
  spec.read_energy = 0.001 * kNano;
  spec.grid = TechGrid{0.2, 0.5, 0.3, 10.0, 14.0, 4.0};

  auto set = [&](ComponentKind k, double A0, double A1, double a1, double A2,
                 double a2, double k0, double k1, double k3, double k2) {
    ComponentModel& m = spec.model(k);
    m.leakage = {A0 * kNano, A1 * kNano, a1, A2 * kNano, a2};
    m.delay = {k0 * kNano, k1 * kNano, k2 * kNano, k3};
    m.ref_area = 1.0;
    m.area_exponent = 2.0;
  };
  set(ComponentKind::kCellArray, 10, 100, -10, 300, -1.0, 0.5, 0.2, 3.0, 0.05);
  set(ComponentKind::kDecoder, 5, 40, -8, 100, -0.8, 0.3, 0.1, 4.0, 0.02);
  set(ComponentKind::kAddressDrivers, 3, 25, -9, 60, -0.9, 0.2, 0.08, 3.5,
      0.03);
  set(ComponentKind::kDataDrivers, 4, 30, -7, 80, -1.1, 0.25, 0.12, 2.5,
      0.025);
  return spec;
}

namespace {

double l1_miss_rate(std::int64_t s1) {
  return 0.05 * std::pow(static_cast<double>(s1) / 16384.0, -0.25);
}

double l2_local_miss_rate(std::int64_t s2) {
  return 0.6 * std::exp(-static_cast<double>(s2) / 614400.0) + 0.03;
}

}  // namespace

HierarchySpec make_synthetic_system(Rng& rng) {
  const TechGrid grid = default_grid();
  HierarchySpec h;

  const std::int64_t l1_sizes[] = {8192, 16384, 32768, 65536};
  for (std::int64_t s : l1_sizes) {
    const double read_e =
        0.02 * std::pow(static_cast<double>(s) / 16384.0, 0.4) * kNano;
    h.l1_candidates.push_back(make_synthetic_cache(
        rng, "l1_" + std::to_string(s / 1024) + "k", s, read_e, grid));
  }
  const std::int64_t l2_sizes[] = {262144, 524288, 1048576, 2097152};
  for (std::int64_t s : l2_sizes) {
    const double read_e =
        0.1 * std::pow(static_cast<double>(s) / 524288.0, 0.4) * kNano;
    h.l2_candidates.push_back(make_synthetic_cache(
        rng, "l2_" + std::to_string(s / 1024) + "k", s, read_e, grid));
  }

  h.miss_table.workload = "synthetic_mix";
  for (std::int64_t s1 : l1_sizes)
    for (std::int64_t s2 : l2_sizes)
      h.miss_table.entries[{s1, s2}] = {l1_miss_rate(s1),
                                        l2_local_miss_rate(s2)};

  h.mem_latency = 100.0 * kNano;
  h.mem_energy_per_access = 4.0 * kNano;
  h.accesses = 2000000;
  h.runtime = 0.2;
  return h;
}

HierarchySpec make_micro_system() {
  const TechGrid grid{0.2, 0.5, 0.15, 10.0, 14.0, 2.0};
  Rng rng(7);
  HierarchySpec h;
  h.l1_candidates.push_back(
      make_synthetic_cache(rng, "micro_l1", 8192, 0.02 * kNano, grid));
  h.l2_candidates.push_back(
      make_synthetic_cache(rng, "micro_l2", 65536, 0.1 * kNano, grid));
  h.miss_table.workload = "micro";
  h.miss_table.entries[{8192, 65536}] = {0.05, 0.3};
  h.mem_latency = 100.0 * kNano;
  h.mem_energy_per_access = 4.0 * kNano;
  h.accesses = 1000000;
  h.runtime = 0.001;
  return h;
}

std::vector<CharacterizationSample> make_samples(const ComponentModel& m,
                                                 const TechGrid& grid,
                                                 int vth_count, int tox_count,
                                                 double noise_frac, Rng* rng) {
  if (noise_frac > 0.0 && rng == nullptr)
    throw OutOfRange("noisy samples need a generator");
  const auto pick = [](const std::vector<double>& axis, int count) {
    std::vector<double> out;
    const int n = static_cast<int>(axis.size());
    count = std::min(count, n);
    for (int i = 0; i < count; ++i) {
      const int idx =
          count == 1 ? 0
                     : static_cast<int>(std::llround(double(i) * double(n - 1) /
                                                     double(count - 1)));
      out.push_back(axis[idx]);
    }
    return out;
  };
  const std::vector<double> vths = pick(grid.vth_values(), vth_count);
  const std::vector<double> toxs = pick(grid.tox_values(), tox_count);

  std::vector<CharacterizationSample> samples;
  samples.reserve(vths.size() * toxs.size());
  for (double v : vths) {
    for (double t : toxs) {
      CharacterizationSample s;
      s.point = {v, t};
      s.leakage = eval_leakage(m.leakage, s.point);
      s.delay = eval_delay(m.delay, s.point);
      if (noise_frac > 0.0) {
        s.leakage *= 1.0 + noise_frac * (2.0 * rng->uniform() - 1.0);
        s.delay *= 1.0 + noise_frac * (2.0 * rng->uniform() - 1.0);
      }
      samples.push_back(s);
    }
  }
  return samples;
}

}  // namespace cachevolt
