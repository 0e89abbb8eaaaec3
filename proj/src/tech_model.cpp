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

#include "cachevolt/tech_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "cachevolt/errors.hpp"

namespace cachevolt {

namespace {

// Absolute tolerance for matching a value against a lattice coordinate.
// Knob values are O(0.1)..O(10), so this comfortably absorbs the drift
// of decimal literals through text round-trips.
constexpr double kGridTol = 1e-9;

std::size_t axis_count(double lo, double hi, double step) {
  return static_cast<std::size_t>(std::floor((hi - lo) / step + kGridTol)) + 1;
}

}  // namespace

std::size_t TechGrid::vth_count() const {
  return axis_count(vth_min, vth_max, vth_step);
}

std::size_t TechGrid::tox_count() const {
  return axis_count(tox_min, tox_max, tox_step);
}

std::vector<double> TechGrid::vth_values() const {
  std::vector<double> v;
  v.reserve(vth_count());
  for (std::size_t i = 0; i < vth_count(); ++i) v.push_back(vth_at(i));
  return v;
}

std::vector<double> TechGrid::tox_values() const {
  std::vector<double> t;
  t.reserve(tox_count());
  for (std::size_t j = 0; j < tox_count(); ++j) t.push_back(tox_at(j));
  return t;
}

std::vector<TechPoint> TechGrid::points() const {
  std::vector<TechPoint> pts;
  pts.reserve(point_count());
  for (std::size_t i = 0; i < vth_count(); ++i)
    for (std::size_t j = 0; j < tox_count(); ++j)
      pts.push_back({vth_at(i), tox_at(j)});
  return pts;
}

namespace {

bool on_axis(double v, double lo, double step, std::size_t count) {
  const double raw = (v - lo) / step;
  const long long idx = std::llround(raw);
  if (idx < 0 || static_cast<std::size_t>(idx) >= count) return false;
  return std::abs(lo + step * double(idx) - v) <= kGridTol;
}

double snap_axis(double v, double lo, double step, std::size_t count,
                 const char* axis) {
  const double raw = (v - lo) / step;
  const long long idx = std::llround(raw);
  if (idx >= 0 && static_cast<std::size_t>(idx) < count) {
    const double snapped = lo + step * double(idx);
    if (std::abs(snapped - v) <= kGridTol) return snapped;
  }
  throw OffGridValue(std::string(axis) + " value " + std::to_string(v) +
                     " is not on the grid");
}

}  // namespace

bool TechGrid::contains_vth(double v) const {
  return on_axis(v, vth_min, vth_step, vth_count());
}

bool TechGrid::contains_tox(double t) const {
  return on_axis(t, tox_min, tox_step, tox_count());
}

double TechGrid::snap_vth(double v) const {
  return snap_axis(v, vth_min, vth_step, vth_count(), "vth");
}

double TechGrid::snap_tox(double t) const {
  return snap_axis(t, tox_min, tox_step, tox_count(), "tox");
}

void TechGrid::validate() const {
  if (!(vth_step > 0.0) || !(tox_step > 0.0))
    throw OutOfRange("grid steps must be strictly positive");
  if (vth_min > vth_max || tox_min > tox_max)
    throw OutOfRange("grid min must not exceed max");
}

double eval_leakage(const LeakageCoeffs& c, const TechPoint& p) {
  return c.A0 + c.A1 * std::exp(c.a1 * p.vth) + c.A2 * std::exp(c.a2 * p.tox);
}

double eval_delay(const DelayCoeffs& c, const TechPoint& p) {
  return c.k0 + c.k1 * std::exp(c.k3 * p.vth) + c.k2 * p.tox;
}

double area_factor(const ComponentModel& m, const TechGrid& grid, double tox) {
  if (tox < grid.tox_min - kGridTol || tox > grid.tox_max + kGridTol)
    throw OutOfRange("tox " + std::to_string(tox) + " outside grid bounds [" +
                     std::to_string(grid.tox_min) + ", " +
                     std::to_string(grid.tox_max) + "]");
  return m.ref_area * std::pow(tox / grid.tox_min, m.area_exponent);
}

// ---------------------------------------------------------------------------
// Fitting.
//
// Both models share the shape  y = c0 + amp * exp(rate * (x1 - x1_min)) + g(x2)
// where g is either a second exponential (leakage) or a linear term (delay).
// We fit in an anchored parameterization -- amplitudes taken at the sample
// minimum of each knob -- which keeps the Jacobian columns within a few
// orders of magnitude of each other even for steep exponents. Box
// constraints (amplitudes >= 0, leakage rates <= 0, delay rates >= 0) are
// enforced by projecting after every accepted step.
// ---------------------------------------------------------------------------

namespace {

constexpr int kMaxIterations = 500;
constexpr double kRelObjectiveTol = 1e-12;

struct DesignCheck {
  double vth_min = 0.0;
  double tox_min = 0.0;
  double y_min = 0.0;
  double y_max = 0.0;
};

// Counts values that differ by more than an absolute tolerance.
std::size_t distinct_count(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.empty() ? 0 : 1;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] - v[i - 1] > kGridTol) ++n;
  return n;
}

DesignCheck check_design(const std::vector<CharacterizationSample>& samples,
                         bool use_delay) {
  if (samples.size() < 5)
    throw InsufficientSamples("need at least 5 samples, got " +
                              std::to_string(samples.size()));
  std::vector<double> vths, toxs;
  DesignCheck d;
  d.y_min = std::numeric_limits<double>::infinity();
  d.y_max = -std::numeric_limits<double>::infinity();
  for (const auto& s : samples) {
    vths.push_back(s.point.vth);
    toxs.push_back(s.point.tox);
    const double y = use_delay ? s.delay : s.leakage;
    d.y_min = std::min(d.y_min, y);
    d.y_max = std::max(d.y_max, y);
  }
  if (distinct_count(vths) < 2)
    throw DegenerateDesign("all samples share one vth value");
  if (distinct_count(toxs) < 2)
    throw DegenerateDesign("all samples share one tox value");
  d.vth_min = *std::min_element(vths.begin(), vths.end());
  d.tox_min = *std::min_element(toxs.begin(), toxs.end());
  return d;
}

// Slope of a least-squares line through (x, log(y - floor)); clamped to the
// requested sign. Used only to seed the nonlinear solve.
double log_linear_slope(const std::vector<CharacterizationSample>& samples,
                        bool use_delay, bool against_vth, double floor) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& s : samples) {
    const double y = (use_delay ? s.delay : s.leakage) - floor;
    if (y <= 0) continue;
    const double x = against_vth ? s.point.vth : s.point.tox;
    const double ly = std::log(y);
    sx += x;
    sy += ly;
    sxx += x * x;
    sxy += x * ly;
    ++n;
  }
  if (n < 2) return 0.0;
  const double denom = double(n) * sxx - sx * sx;
  if (std::abs(denom) < 1e-30) return 0.0;
  return (double(n) * sxy - sx * sy) / denom;
}

// Model abstraction over the shared fit loop. Parameter vector layout:
//   leakage: (c0, amp1, rate1, amp2, rate2), rates <= 0
//   delay:   (c0, amp1, rate1, slope2),      rate/slope >= 0
// Amplitudes are anchored: amp = coeff * exp(rate * knob_min).
struct FitTarget {
  bool use_delay;
  DesignCheck design;

  int param_count() const { return use_delay ? 4 : 5; }

  double predict(const Eigen::VectorXd& th, const TechPoint& p) const {
    const double dv = p.vth - design.vth_min;
    if (use_delay)
      return th[0] + th[1] * std::exp(th[2] * dv) + th[3] * p.tox;
    const double dt = p.tox - design.tox_min;
    return th[0] + th[1] * std::exp(th[2] * dv) +
           th[3] * std::exp(th[4] * dt);
  }

  void jacobian_row(const Eigen::VectorXd& th, const TechPoint& p,
                    Eigen::RowVectorXd& row) const {
    const double dv = p.vth - design.vth_min;
    const double e1 = std::exp(th[2] * dv);
    row[0] = 1.0;
    row[1] = e1;
    row[2] = th[1] * dv * e1;
    if (use_delay) {
      row[3] = p.tox;
    } else {
      const double dt = p.tox - design.tox_min;
      const double e2 = std::exp(th[4] * dt);
      row[3] = e2;
      row[4] = th[3] * dt * e2;
    }
  }

  void project(Eigen::VectorXd& th) const {
    th[1] = std::max(th[1], 0.0);
    if (use_delay) {
      th[2] = std::max(th[2], 0.0);  // vth rate grows delay
      th[3] = std::max(th[3], 0.0);  // tox slope grows delay
    } else {
      th[2] = std::min(th[2], 0.0);  // vth rate shrinks leakage
      th[3] = std::max(th[3], 0.0);
      th[4] = std::min(th[4], 0.0);  // tox rate shrinks leakage
    }
  }

  // With the rates pinned, the model is linear in the remaining parameters;
  // solve that subproblem to complete a starting point.
  void solve_amplitudes(const std::vector<CharacterizationSample>& samples,
                        Eigen::VectorXd& th) const {
    const int n = static_cast<int>(samples.size());
    Eigen::MatrixXd X(n, 3);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
      const auto& s = samples[i];
      const double dv = s.point.vth - design.vth_min;
      X(i, 0) = 1.0;
      X(i, 1) = std::exp(th[2] * dv);
      X(i, 2) = use_delay ? s.point.tox
                          : std::exp(th[4] * (s.point.tox - design.tox_min));
      y[i] = use_delay ? s.delay : s.leakage;
    }
    Eigen::Vector3d sol =
        X.colPivHouseholderQr().solve(y);
    th[0] = sol[0];
    th[1] = std::max(sol[1], 0.0);
    th[3] = std::max(sol[2], 0.0);
  }
};

double sum_sq_residuals(const FitTarget& t,
                        const std::vector<CharacterizationSample>& samples,
                        const Eigen::VectorXd& th) {
  double sse = 0.0;
  for (const auto& s : samples) {
    const double r = t.predict(th, s.point) - (t.use_delay ? s.delay : s.leakage);
    sse += r * r;
  }
  return sse;
}

struct SolveOutcome {
  Eigen::VectorXd theta;
  double sse = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

// Damped Gauss-Newton from one starting point.
SolveOutcome run_gauss_newton(const FitTarget& t,
                              const std::vector<CharacterizationSample>& samples,
                              Eigen::VectorXd th) {
  const int n = static_cast<int>(samples.size());
  const int k = t.param_count();
  Eigen::MatrixXd J(n, k);
  Eigen::VectorXd r(n);
  Eigen::RowVectorXd row(k);

  t.project(th);
  double sse = sum_sq_residuals(t, samples, th);
  double lambda = 1e-3;
  SolveOutcome out;

  for (int iter = 0; iter < kMaxIterations; ++iter) {
    out.iterations = iter + 1;
    for (int i = 0; i < n; ++i) {
      const auto& s = samples[i];
      r[i] = t.predict(th, s.point) - (t.use_delay ? s.delay : s.leakage);
      t.jacobian_row(th, s.point, row);
      J.row(i) = row;
    }
    const Eigen::MatrixXd JtJ = J.transpose() * J;
    const Eigen::VectorXd Jtr = J.transpose() * r;

    bool stepped = false;
    for (int tries = 0; tries < 40; ++tries) {
      Eigen::MatrixXd damped = JtJ;
      for (int d = 0; d < k; ++d)
        damped(d, d) += lambda * std::max(JtJ(d, d), 1e-12);
      const Eigen::VectorXd delta = damped.ldlt().solve(-Jtr);
      Eigen::VectorXd cand = th + delta;
      t.project(cand);
      const double cand_sse = sum_sq_residuals(t, samples, cand);
      if (std::isfinite(cand_sse) && cand_sse <= sse) {
        const double rel_drop =
            (sse - cand_sse) / std::max(sse, 1e-300);
        th = cand;
        sse = cand_sse;
        lambda = std::max(lambda / 3.0, 1e-12);
        stepped = true;
        if (rel_drop < kRelObjectiveTol) {
          out.converged = true;
        }
        break;
      }
      lambda *= 10.0;
      if (lambda > 1e14) break;
    }
    if (!stepped) {
      // No downhill step exists at any damping: stationary point.
      out.converged = true;
    }
    if (out.converged) break;
  }
  out.theta = th;
  out.sse = sse;
  return out;
}

// Deterministic multipliers applied to the seeded rates for restarts.
constexpr double kRestartScales[] = {1.0, 0.5, 2.0, 0.25, 4.0, 0.1, 8.0};

SolveOutcome fit_shared(const FitTarget& t,
                        const std::vector<CharacterizationSample>& samples,
                        double seeded_rate1, double seeded_rate2,
                        FitReport* report) {
  SolveOutcome best;
  int restarts_used = 0;
  const double span = t.design.y_max - t.design.y_min;
  // Accept once the residual is negligible against the sample spread;
  // otherwise keep trying restarts and keep the best.
  const double good_enough = 1e-18 * std::max(span * span, 1e-30);

  for (std::size_t si = 0; si < std::size(kRestartScales); ++si) {
    Eigen::VectorXd th = Eigen::VectorXd::Zero(t.param_count());
    th[2] = seeded_rate1 * kRestartScales[si];
    if (!t.use_delay) th[4] = seeded_rate2 * kRestartScales[si];
    t.project(th);
    t.solve_amplitudes(samples, th);
    SolveOutcome o = run_gauss_newton(t, samples, th);
    if (o.sse < best.sse) {
      best = o;
      restarts_used = static_cast<int>(si);
    }
    if (best.converged && best.sse <= good_enough) break;
  }
  if (!best.converged)
    throw FitDiverged("no start converged within " +
                      std::to_string(kMaxIterations) + " iterations");
  if (report) {
    report->rms_residual = std::sqrt(best.sse / double(samples.size()));
    report->iterations = best.iterations;
    report->restarts = restarts_used;
  }
  return best;
}

}  // namespace

LeakageCoeffs fit_leakage(const std::vector<CharacterizationSample>& samples,
                          FitReport* report) {
  FitTarget t{/*use_delay=*/false, check_design(samples, false)};
  // Seed rates from log-linear slopes of (y - floor) against each knob.
  const double floor = 0.99 * t.design.y_min;
  const double rate_v =
      std::min(log_linear_slope(samples, false, /*against_vth=*/true, floor),
               -1e-3);
  const double rate_t =
      std::min(log_linear_slope(samples, false, /*against_vth=*/false, floor),
               -1e-3);
  SolveOutcome o = fit_shared(t, samples, rate_v, rate_t, report);

  LeakageCoeffs c;
  c.A0 = o.theta[0];
  c.a1 = o.theta[2];
  c.A1 = o.theta[1] * std::exp(-c.a1 * t.design.vth_min);
  c.a2 = o.theta[4];
  c.A2 = o.theta[3] * std::exp(-c.a2 * t.design.tox_min);
  return c;
}

DelayCoeffs fit_delay(const std::vector<CharacterizationSample>& samples,
                      FitReport* report) {
  FitTarget t{/*use_delay=*/true, check_design(samples, true)};
  const double floor = 0.99 * t.design.y_min;
  const double rate_v =
      std::max(log_linear_slope(samples, true, /*against_vth=*/true, floor),
               1e-3);
  SolveOutcome o = fit_shared(t, samples, rate_v, 0.0, report);

  DelayCoeffs c;
  c.k0 = o.theta[0];
  c.k3 = o.theta[2];
  c.k1 = o.theta[1] * std::exp(-c.k3 * t.design.vth_min);
  c.k2 = o.theta[3];
  return c;
}

}  // namespace cachevolt
