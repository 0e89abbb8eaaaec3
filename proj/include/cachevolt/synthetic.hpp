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

#ifndef CACHEVOLT_SYNTHETIC_HPP_
#define CACHEVOLT_SYNTHETIC_HPP_

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cachevolt/hierarchy_opt.hpp"

namespace cachevolt {

// Deterministic uniform generator. Draws use only the top 53 engine bits,
// so the stream is identical on every platform for a given seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 gen_;
};

// The standard characterization lattice: 13 vth values (0.2..0.5 V by
// 0.025) x 9 tox values (10..14 A by 0.5).
TechGrid default_grid();

// A 5x5 lattice over the same spans (0.075 V / 1.0 A steps); small enough
// for exhaustive cross-checks of every scheme.
TechGrid small_grid();

// One component with randomized coefficients. All generated models are
// synthetic stand-ins for circuit characterization: magnitudes are drawn
// around `leak_scale` (watts) and `delay_scale` (dimensionless multiplier
// on nanosecond-scale delays), with the knob sensitivities chosen so that
//   - leakage falls off faster along tox than along vth,
//   - delay moves much further along vth than along tox,
// matching the qualitative behavior the models are meant to mimic. Core
// (cell-array) components get gentler leakage falloff than peripherals so
// that their absolute leakage dominates across the whole grid.
ComponentModel make_synthetic_component(Rng& rng, double leak_scale,
                                        double delay_scale, bool core);

// A structured cache: core leakage amplitudes at least an order of
// magnitude above each peripheral's, leakage scaling linearly and delay
// polynomially with size.
CacheSpec make_synthetic_cache(Rng& rng, const std::string& name,
                               std::int64_t size_bytes, double read_energy,
                               const TechGrid& grid);

// A fully randomized cache (each component drawn independently over wide
// ranges) for stress-testing the optimizers.
CacheSpec make_random_cache(Rng& rng, const std::string& name,
                            const TechGrid& grid);

// A fixed 2x2-grid, four-component cache with hand-set coefficients; small
// enough that every optimization over it can be checked by hand.
CacheSpec make_tiny_spec();

// A two-level system: four L1 candidates (8..64 KB), four L2 candidates
// (256 KB..2 MB), a miss-rate table with an exponentially decaying L2 miss
// curve, and fixed main-memory constants.
HierarchySpec make_synthetic_system(Rng& rng);

// A deterministic single-candidate system on a 3x3 grid, small enough for
// brute-force joint optimization over both levels.
HierarchySpec make_micro_system();

// Samples the model on an evenly spaced vth_count x tox_count sublattice of
// the grid. noise_frac > 0 applies independent multiplicative noise
// uniform in [-noise_frac, +noise_frac] to each reading (rng required).
std::vector<CharacterizationSample> make_samples(const ComponentModel& m,
                                                 const TechGrid& grid,
                                                 int vth_count, int tox_count,
                                                 double noise_frac = 0.0,
                                                 Rng* rng = nullptr);

}  // namespace cachevolt

#endif  // CACHEVOLT_SYNTHETIC_HPP_
