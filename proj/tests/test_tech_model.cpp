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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "cachevolt/errors.hpp"
#include "cachevolt/synthetic.hpp"
#include "cachevolt/tech_model.hpp"

using namespace cachevolt;

namespace {

double rel_err(double got, double want) {
  return std::fabs(got - want) / std::max(std::fabs(want), 1e-300);
}

}  // namespace

TEST_CASE("leakage model evaluates its closed form") {
  const LeakageCoeffs c{0.5, 10.0, -8.0, 200.0, -0.9};
  // 0.5 + 10*e^-1.6 + 200*e^-9, checked against an independent evaluation.
  CHECK(eval_leakage(c, {0.2, 10.0}) ==
        doctest::Approx(2.54364714076389).epsilon(1e-12));
  // A0-only model is flat.
  CHECK(eval_leakage({3.0, 0, 0, 0, 0}, {0.5, 14.0}) == 3.0);
}

TEST_CASE("delay model evaluates its closed form") {
  const DelayCoeffs c{0.1, 0.05, 0.01, 2.0};
  // 0.1 + 0.05*e^0.6 + 0.01*12, checked against an independent evaluation.
  CHECK(eval_delay(c, {0.3, 12.0}) ==
        doctest::Approx(0.31110594001952546).epsilon(1e-12));
}

TEST_CASE("leakage falls and delay rises along both knobs") {
  Rng rng(11);
  const ComponentModel m = make_synthetic_component(rng, 1e-7, 1.0, false);
  const TechGrid g = default_grid();
  double prev_leak = 1e300, prev_delay = -1.0;
  for (double v : g.vth_values()) {
    const double leak = eval_leakage(m.leakage, {v, 12.0});
    const double delay = eval_delay(m.delay, {v, 12.0});
    CHECK(leak < prev_leak);
    CHECK(delay > prev_delay);
    prev_leak = leak;
    prev_delay = delay;
  }
  prev_leak = 1e300, prev_delay = -1.0;
  for (double t : g.tox_values()) {
    const double leak = eval_leakage(m.leakage, {0.3, t});
    const double delay = eval_delay(m.delay, {0.3, t});
    CHECK(leak < prev_leak);
    CHECK(delay > prev_delay);
    prev_leak = leak;
    prev_delay = delay;
  }
}

TEST_CASE("grid counts, axis values and point order") {
  const TechGrid g = default_grid();
  CHECK(g.vth_count() == 13);
  CHECK(g.tox_count() == 9);
  CHECK(g.point_count() == 117);
  CHECK(g.vth_at(0) == 0.2);
  CHECK(g.vth_at(12) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(g.tox_at(8) == doctest::Approx(14.0).epsilon(1e-12));

  const auto pts = g.points();
  REQUIRE(pts.size() == 117);
  CHECK(pts.front() == TechPoint{0.2, 10.0});
  CHECK(pts[1] == TechPoint{0.2, 10.5});  // vth-major, tox fastest
  CHECK(pts.back().vth == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(pts.back().tox == doctest::Approx(14.0).epsilon(1e-12));

  // A step that does not divide the span truncates: 0.2..0.5 by 0.08
  // covers 0.2, 0.28, 0.36, 0.44.
  const TechGrid odd{0.2, 0.5, 0.08, 10.0, 14.0, 3.0};
  CHECK(odd.vth_count() == 4);
  CHECK(odd.tox_count() == 2);
}

TEST_CASE("grid membership tolerates decimal drift, rejects off-grid") {
  const TechGrid g = default_grid();
  CHECK(g.contains_vth(0.225));
  CHECK(g.contains_vth(0.225 + 5e-10));
  CHECK_FALSE(g.contains_vth(0.21));
  CHECK_FALSE(g.contains_vth(0.5 + 0.025));  // one step past the end
  CHECK(g.contains_tox(14.0 - 1e-10));
  CHECK_FALSE(g.contains_tox(14.3));

  CHECK(g.snap_vth(0.225 + 5e-10) == doctest::Approx(0.225).epsilon(1e-14));
  CHECK(g.snap_tox(11.5 - 3e-10) == doctest::Approx(11.5).epsilon(1e-14));
  CHECK_THROWS_AS(g.snap_vth(0.21), OffGridValue);
  CHECK_THROWS_AS(g.snap_tox(9.0), OffGridValue);
}

TEST_CASE("grid validation rejects bad ranges") {
  TechGrid g = default_grid();
  CHECK_NOTHROW(g.validate());
  g.vth_step = 0.0;
  CHECK_THROWS_AS(g.validate(), OutOfRange);
  g = default_grid();
  g.tox_min = 15.0;
  CHECK_THROWS_AS(g.validate(), OutOfRange);
}

TEST_CASE("area factor follows the power law and checks bounds") {
  ComponentModel m;
  m.ref_area = 2.0;
  m.area_exponent = 2.0;
  const TechGrid g = default_grid();
  CHECK(area_factor(m, g, 10.0) == doctest::Approx(2.0));
  CHECK(area_factor(m, g, 14.0) == doctest::Approx(2.0 * 1.96).epsilon(1e-12));
  m.area_exponent = 1.0;
  CHECK(area_factor(m, g, 12.0) == doctest::Approx(2.4).epsilon(1e-12));
  CHECK_THROWS_AS(area_factor(m, g, 9.5), OutOfRange);
  CHECK_THROWS_AS(area_factor(m, g, 14.5), OutOfRange);
}

TEST_CASE("fit recovers generating coefficients from exact samples") {
  Rng rng(5);
  const TechGrid g = default_grid();
  for (bool core : {true, false}) {
    const ComponentModel truth =
        make_synthetic_component(rng, 2e-7, 1.0, core);
    const auto samples = make_samples(truth, g, 5, 5);
    REQUIRE(samples.size() == 25);

    FitReport rep;
    const LeakageCoeffs lf = fit_leakage(samples, &rep);
    CHECK(rep.iterations >= 1);
    CHECK(rel_err(lf.A0, truth.leakage.A0) < 1e-6);
    CHECK(rel_err(lf.A1, truth.leakage.A1) < 1e-6);
    CHECK(rel_err(lf.a1, truth.leakage.a1) < 1e-6);
    CHECK(rel_err(lf.A2, truth.leakage.A2) < 1e-6);
    CHECK(rel_err(lf.a2, truth.leakage.a2) < 1e-6);

    const DelayCoeffs df = fit_delay(samples, &rep);
    CHECK(rel_err(df.k0, truth.delay.k0) < 1e-6);
    CHECK(rel_err(df.k1, truth.delay.k1) < 1e-6);
    CHECK(rel_err(df.k2, truth.delay.k2) < 1e-6);
    CHECK(rel_err(df.k3, truth.delay.k3) < 1e-6);
  }
}

TEST_CASE("fit respects the sign conventions") {
  Rng rng(17);
  const ComponentModel truth = make_synthetic_component(rng, 1e-7, 1.0, true);
  Rng noise(18);
  const auto samples = make_samples(truth, default_grid(), 5, 5, 0.01, &noise);
  const LeakageCoeffs lf = fit_leakage(samples);
  CHECK(lf.A1 >= 0.0);
  CHECK(lf.A2 >= 0.0);
  CHECK(lf.a1 <= 0.0);
  CHECK(lf.a2 <= 0.0);
  const DelayCoeffs df = fit_delay(samples);
  CHECK(df.k1 >= 0.0);
  CHECK(df.k2 >= 0.0);
  CHECK(df.k3 >= 0.0);
}

TEST_CASE("fit under multiplicative noise stays within the noise floor") {
  Rng rng(23);
  const ComponentModel truth = make_synthetic_component(rng, 1e-7, 1.0, false);
  Rng noise(24);
  const auto samples = make_samples(truth, default_grid(), 5, 5, 0.01, &noise);

  const LeakageCoeffs lf = fit_leakage(samples);
  const DelayCoeffs df = fit_delay(samples);
  double lsum = 0.0, dsum = 0.0;
  for (const auto& s : samples) {
    lsum += std::pow(eval_leakage(lf, s.point) / s.leakage - 1.0, 2);
    dsum += std::pow(eval_delay(df, s.point) / s.delay - 1.0, 2);
  }
  CHECK(std::sqrt(lsum / samples.size()) <= 0.02);
  CHECK(std::sqrt(dsum / samples.size()) <= 0.02);
}

TEST_CASE("fit is deterministic") {
  Rng rng(31);
  const ComponentModel truth = make_synthetic_component(rng, 1e-7, 1.0, true);
  Rng n1(32), n2(32);
  const auto s1 = make_samples(truth, default_grid(), 5, 5, 0.02, &n1);
  const auto s2 = make_samples(truth, default_grid(), 5, 5, 0.02, &n2);
  CHECK(fit_leakage(s1) == fit_leakage(s2));
  CHECK(fit_delay(s1) == fit_delay(s2));
}

TEST_CASE("fit rejects undersized or degenerate designs") {
  Rng rng(41);
  const ComponentModel truth = make_synthetic_component(rng, 1e-7, 1.0, true);
  auto samples = make_samples(truth, default_grid(), 2, 2);
  REQUIRE(samples.size() == 4);
  CHECK_THROWS_AS(fit_leakage(samples), InsufficientSamples);
  CHECK_THROWS_AS(fit_delay(samples), InsufficientSamples);

  // Six samples all at one vth: tox varies but vth does not.
  std::vector<CharacterizationSample> one_vth;
  for (int j = 0; j < 6; ++j) {
    TechPoint p{0.3, 10.0 + 0.5 * j};
    one_vth.push_back({p, eval_leakage(truth.leakage, p),
                       eval_delay(truth.delay, p)});
  }
  CHECK_THROWS_AS(fit_leakage(one_vth), DegenerateDesign);
  CHECK_THROWS_AS(fit_delay(one_vth), DegenerateDesign);

  std::vector<CharacterizationSample> one_tox;
  for (int i = 0; i < 6; ++i) {
    TechPoint p{0.2 + 0.05 * i, 12.0};
    one_tox.push_back({p, eval_leakage(truth.leakage, p),
                       eval_delay(truth.delay, p)});
  }
  CHECK_THROWS_AS(fit_leakage(one_tox), DegenerateDesign);

  // FitError::kind() names the failure without RTTI.
  try {
    fit_leakage(one_vth);
    FAIL("expected DegenerateDesign");
  } catch (const FitError& e) {
    CHECK(e.kind() == "DegenerateDesign");
  }
}

TEST_CASE("minimum viable design: five samples, two values per axis") {
  Rng rng(47);
  const ComponentModel truth = make_synthetic_component(rng, 1e-7, 1.0, false);
  std::vector<CharacterizationSample> samples;
  for (TechPoint p : std::vector<TechPoint>{
           {0.2, 10.0}, {0.2, 14.0}, {0.5, 10.0}, {0.5, 14.0}, {0.35, 12.0}}) {
    samples.push_back(
        {p, eval_leakage(truth.leakage, p), eval_delay(truth.delay, p)});
  }
  FitReport rep;
  const LeakageCoeffs lf = fit_leakage(samples, &rep);
  // Five exact samples constrain the five leakage parameters.
  for (const auto& s : samples)
    CHECK(rel_err(eval_leakage(lf, s.point), s.leakage) < 1e-6);
}

TEST_CASE("sample generator covers the requested sublattice") {
  Rng rng(53);
  const ComponentModel m = make_synthetic_component(rng, 1e-7, 1.0, true);
  const TechGrid g = default_grid();
  auto s = make_samples(m, g, 5, 5);
  REQUIRE(s.size() == 25);
  CHECK(s.front().point == TechPoint{0.2, 10.0});
  CHECK(s.back().point.vth == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s.back().point.tox == doctest::Approx(14.0).epsilon(1e-12));
  for (const auto& row : s) {
    CHECK(g.contains(row.point));
    CHECK(row.leakage == eval_leakage(m.leakage, row.point));
    CHECK(row.delay == eval_delay(m.delay, row.point));
  }
  // Noise requires a generator.
  CHECK_THROWS_AS(make_samples(m, g, 5, 5, 0.01, nullptr), OutOfRange);
}
