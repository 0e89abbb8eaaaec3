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

#ifndef CACHEVOLT_TECH_MODEL_HPP_
#define CACHEVOLT_TECH_MODEL_HPP_

#include <cstddef>
#include <vector>

namespace cachevolt {

// One (threshold voltage, oxide thickness) knob setting.
// Internal units are volts and angstroms everywhere; file formats carry
// nW/ns/nJ variants and are converted at ingestion.
struct TechPoint {
  double vth = 0.0;  // volts
  double tox = 0.0;  // angstroms

  friend bool operator==(const TechPoint&, const TechPoint&) = default;
};

// Lexicographic (vth, tox) order; used for deterministic tie-breaking.
inline bool lex_less(const TechPoint& a, const TechPoint& b) {
  if (a.vth != b.vth) return a.vth < b.vth;
  return a.tox < b.tox;
}

// The discrete knob lattice. Both axes are inclusive arithmetic ranges.
struct TechGrid {
  double vth_min = 0.2;    // volts
  double vth_max = 0.5;    // volts
  double vth_step = 0.025;  // volts
  double tox_min = 10.0;   // angstroms
  double tox_max = 14.0;   // angstroms
  double tox_step = 0.5;   // angstroms

  // Number of enumerated values per axis: floor((max-min)/step) + 1.
  std::size_t vth_count() const;
  std::size_t tox_count() const;
  std::size_t point_count() const { return vth_count() * tox_count(); }

  double vth_at(std::size_t i) const { return vth_min + vth_step * double(i); }
  double tox_at(std::size_t j) const { return tox_min + tox_step * double(j); }

  std::vector<double> vth_values() const;
  std::vector<double> tox_values() const;

  // All grid points, vth-major then tox, in ascending axis order.
  std::vector<TechPoint> points() const;

  // True when `v` coincides with a lattice value up to a small absolute
  // tolerance (guards against decimal-to-binary drift in input files).
  bool contains_vth(double v) const;
  bool contains_tox(double t) const;
  bool contains(const TechPoint& p) const {
    return contains_vth(p.vth) && contains_tox(p.tox);
  }

  // Nearest lattice value (used to snap file inputs); throws OffGridValue
  // when the value is not on the lattice.
  double snap_vth(double v) const;
  double snap_tox(double t) const;
  TechPoint snap(const TechPoint& p) const {
    return {snap_vth(p.vth), snap_tox(p.tox)};
  }

  void validate() const;  // throws OutOfRange on bad steps/ranges

  friend bool operator==(const TechGrid&, const TechGrid&) = default;
};

// Leakage model P(vth, tox) = A0 + A1*exp(a1*vth) + A2*exp(a2*tox).
// Sign convention: a1, a2 <= 0 and A1, A2 >= 0, so leakage falls as either
// knob rises.
struct LeakageCoeffs {
  double A0 = 0.0;  // watts
  double A1 = 0.0;  // watts
  double a1 = 0.0;  // 1/volt, <= 0
  double A2 = 0.0;  // watts
  double a2 = 0.0;  // 1/angstrom, <= 0

  friend bool operator==(const LeakageCoeffs&, const LeakageCoeffs&) = default;
};

// Delay model Td(vth, tox) = k0 + k1*exp(k3*vth) + k2*tox.
// Sign convention: k1, k2, k3 >= 0, so delay grows with either knob.
struct DelayCoeffs {
  double k0 = 0.0;  // seconds
  double k1 = 0.0;  // seconds
  double k2 = 0.0;  // seconds/angstrom, >= 0
  double k3 = 0.0;  // 1/volt, >= 0

  friend bool operator==(const DelayCoeffs&, const DelayCoeffs&) = default;
};

// Fitted models plus the area-scaling rule for one cache component.
// area(tox) = ref_area * (tox / tox_min)^area_exponent, non-decreasing.
struct ComponentModel {
  LeakageCoeffs leakage;
  DelayCoeffs delay;
  double ref_area = 1.0;       // relative area at tox = tox_min
  double area_exponent = 2.0;  // both cell dimensions scale with channel

  friend bool operator==(const ComponentModel&,
                         const ComponentModel&) = default;
};

// One measured (point, leakage, delay) row of a characterization run.
struct CharacterizationSample {
  TechPoint point;
  double leakage = 0.0;  // watts
  double delay = 0.0;    // seconds
};

// -- Evaluation --------------------------------------------------------------

double eval_leakage(const LeakageCoeffs& c, const TechPoint& p);
double eval_delay(const DelayCoeffs& c, const TechPoint& p);

// Relative area at `tox`; throws OutOfRange when tox is outside grid bounds.
double area_factor(const ComponentModel& m, const TechGrid& grid, double tox);

// -- Fitting -----------------------------------------------------------------
//
// Box-constrained nonlinear least squares by damped Gauss-Newton:
// iterative linearization with a Levenberg-style damping factor, initialized
// from a log-linear pre-fit of (value - floor) against each knob at the other
// knob held fixed. Caps at 500 iterations; converged when the relative change
// of the sum of squared residuals drops below 1e-12.
//
// Requires >= 5 samples spanning >= 2 distinct vth and >= 2 distinct tox
// values; otherwise InsufficientSamples / DegenerateDesign. FitDiverged when
// no restart reaches a usable minimum within the iteration budget.

struct FitReport {
  double rms_residual = 0.0;  // root mean squared residual over the samples
  int iterations = 0;
  int restarts = 0;  // multi-start attempts consumed (0 = first start won)
};

LeakageCoeffs fit_leakage(const std::vector<CharacterizationSample>& samples,
                          FitReport* report = nullptr);
DelayCoeffs fit_delay(const std::vector<CharacterizationSample>& samples,
                      FitReport* report = nullptr);

}  // namespace cachevolt

#endif  // CACHEVOLT_TECH_MODEL_HPP_
