// Copyright 2026 The qthermo Authors
//
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

// Dormand-Prince 5(4) with per-step hermitization, exact landing on sample
// times and a replayable step schedule.

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "qthermo/lindblad.hpp"

namespace qthermo {

namespace {

constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct Stepper {
  const Generator& gen;
  Kernel kernel;
  kernels::Workspace ws;
  CMatrix k1, k2, k3, k4, k5, k6, k7, tmp, ynew;

  void f(const CMatrix& y, CMatrix& out) { gen.apply(y, out, ws, kernel); }

  // One trial step from y with k1 = f(y) precomputed; leaves ynew and k7 = f(ynew).
  void step(const CMatrix& y, double h) {
    tmp = y + h * a21 * k1;
    f(tmp, k2);
    tmp = y + h * (a31 * k1 + a32 * k2);
    f(tmp, k3);
    tmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    f(tmp, k4);
    tmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    f(tmp, k5);
    tmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    f(tmp, k6);
    ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    f(ynew, k7);
  }

  double error_norm(const CMatrix& y, double h, double rtol, double atol) {
    tmp = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const Eigen::ArrayXXd scale = atol + rtol * y.array().abs2().max(ynew.array().abs2()).sqrt();
    return std::sqrt((tmp.array().abs2() / scale.square()).mean());
  }
};

}  // namespace

Trajectory evolve(const DensityMatrix& rho0, const Generator& gen, std::span<const double> t_grid,
                  const EvolveOptions& opt) {
  if (rho0.space != gen.space()) throw DimensionError("evolve: initial state and generator spaces differ");
  if (t_grid.empty()) throw DomainError("evolve: empty time grid");
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] >= 0) || !std::isfinite(t_grid[i])) throw DomainError("evolve: times must be finite and >= 0");
    if (i > 0 && !(t_grid[i] > t_grid[i - 1])) throw DomainError("evolve: time grid must be strictly increasing");
  }

  Trajectory traj;
  CMatrix y = rho0.rho;
  hermitize(y);
  auto record = [&](double t) {
    DensityMatrix s(rho0.space, y);
    const double tail = top_level_population(s);
    traj.times.push_back(t);
    traj.states.push_back(std::move(s));
    traj.tail.push_back(tail);
  };
  auto check_tail = [&](double t) {
    const double tail = top_level_population(rho0.space, y);
    traj.max_tail = std::max(traj.max_tail, tail);
    if (tail > opt.tail_tol) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "evolve: top-level population %.3g exceeds %.3g at t=%.6g; raise cutoff", tail,
                    opt.tail_tol, t);
      throw CutoffError(buf);
    }
  };

  std::size_t idx = 0;
  while (idx < t_grid.size() && t_grid[idx] == 0.0) {
    record(0.0);
    ++idx;
  }
  check_tail(0.0);
  if (idx == t_grid.size()) return traj;

  Stepper st{gen, opt.kernel, {}, {}, {}, {}, {}, {}, {}, {}, {}, {}};
  st.f(y, st.k1);
  double t = 0.0;

  if (opt.replay) {
    for (const auto& rec : *opt.replay) {
      if (idx >= t_grid.size()) break;
      st.step(y, rec.h);
      y.swap(st.ynew);
      hermitize(y);
      st.k1.swap(st.k7);
      t = rec.hits_sample ? t_grid[idx] : t + rec.h;
      check_tail(t);
      if (rec.hits_sample) record(t_grid[idx++]);
    }
    if (idx < t_grid.size()) throw DomainError("evolve: replay schedule does not cover the time grid");
    traj.schedule = *opt.replay;
    return traj;
  }

  double h = std::min(opt.initial_step, opt.max_step);
  long steps = 0;
  while (idx < t_grid.size()) {
    const double target = t_grid[idx];
    double h_try = std::min(h, opt.max_step);
    bool hits = false;
    if (t + h_try >= target * (1.0 - 1e-14)) {
      h_try = target - t;
      hits = true;
    }
    if (h_try < opt.min_step) throw ConvergenceError("evolve: step size underflow");
    if (++steps > opt.max_steps) throw ConvergenceError("evolve: step budget exhausted");
    st.step(y, h_try);
    const double err = st.error_norm(y, h_try, opt.rtol, opt.atol);
    if (!std::isfinite(err)) throw ConvergenceError("evolve: non-finite error estimate");
    if (err <= 1.0) {
      y.swap(st.ynew);
      hermitize(y);
      st.k1.swap(st.k7);
      t = hits ? target : t + h_try;
      traj.schedule.push_back({h_try, hits});
      check_tail(t);
      if (hits) record(t_grid[idx++]);
      const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      // A step shortened to land on a sample should not shrink the next one.
      h = hits ? std::max(h, h_try * fac) : h_try * fac;
    } else {
      ++traj.rejected;
      h = h_try * std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
    }
  }
  return traj;
}

}  // namespace qthermo
