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

#include <algorithm>
#include <cmath>

#include "qthermo/fisher.hpp"

namespace qthermo {

std::optional<GaussianState> gaussian_initial_state(const ProbeSpec& probe) {
  switch (probe.family) {
    case Family::Coherent: return GaussianState::coherent(probe.alpha);
    case Family::SqueezedVacuum: return GaussianState::squeezed_vacuum(probe.r);
    case Family::Thermal: return GaussianState::thermal(2.0 * probe.nbar + 1.0);
    case Family::SqueezedThermal: {
      GaussianState s = GaussianState::squeezed_vacuum(probe.r);
      s.cov *= 2.0 * probe.nbar + 1.0;
      return s;
    }
    default: return std::nullopt;
  }
}

TransientResult transient_qfi(const ProbeSpec& probe, const BathSpec& bath, ProbeModel model,
                              std::span<const double> t_grid, const TransientOptions& opt) {
  probe.validate();
  bath.validate();
  if (t_grid.empty()) throw DomainError("transient_qfi: empty time grid");
  const int modes = model == ProbeModel::SingleMode ? 1 : 2;
  TransientResult res;
  res.cutoff = opt.cutoff > 0 ? opt.cutoff : (modes == 1 ? 60 : 20);
  res.curve.label = probe.to_string();
  auto& pts = res.curve.points;

  if (modes == 1 && opt.gaussian_fast_path) {
    if (auto g0 = gaussian_initial_state(probe)) {
      for (double t : t_grid) pts.push_back({t, gaussian_qfi_evolved(*g0, bath, t), Engine::ClosedForm});
      return res;
    }
  }
  if (modes == 1 && opt.fock_closed_form && probe.family == Family::Fock) {
    for (double t : t_grid) pts.push_back({t, fock_qfi_exact(probe.n0, bath, t), Engine::ClosedForm});
    return res;
  }

  const FockSpace space(modes, res.cutoff);
  Prepared prep = prepare_checked(space, probe, opt.prepare);
  res.prep_tail = prep.tail;
  const bool pure = std::holds_alternative<StateVector>(prep.state);
  const DensityMatrix rho0 = to_density(prep.state);

  // Points the integrator must resolve; pure inputs are exactly 0 for gamma t < 1e-3.
  std::vector<double> grid;
  for (double t : t_grid) {
    if (!(t >= 0)) throw DomainError("transient_qfi: times must be >= 0");
    if (t == 0.0 || (pure && bath.gamma * t < 1e-3)) continue;
    grid.push_back(t);
  }
  auto make_gen = [&](double temp) {
    const BathSpec b = bath.with_temperature(temp);
    return modes == 1 ? single_mode_generator(space, b, opt.frame) : two_mode_generator(space, b, opt.xi);
  };
  std::vector<QfiResult> q;
  if (!grid.empty()) {
    const Trajectory nominal = evolve(rho0, make_gen(bath.temperature), grid, opt.evolve);
    res.max_tail = nominal.max_tail;
    EvolveOptions replay = opt.evolve;
    replay.replay = &nominal.schedule;
    // Perturbed-T runs reuse the nominal step sequence; the guard still applies.
    TrajectoryFamily fam = [&](double temp) {
      if (temp == bath.temperature) return nominal.states;
      return evolve(rho0, make_gen(temp), grid, replay).states;
    };
    // Pairs below ~100 atol only divide integrator noise by a tiny eigenvalue.
    QfiOptions qo = opt.qfi;
    qo.eps = std::max(qo.eps, 100.0 * opt.evolve.atol);
    q = qfi_numeric_batch(fam, bath.temperature, qo);
  }
  std::size_t k = 0;
  for (double t : t_grid) {
    if (k < grid.size() && grid[k] == t) {
      pts.push_back({t, q[k].value, Engine::NumericSld, q[k].error, q[k].converged});
      ++k;
    } else {
      pts.push_back({t, 0.0, Engine::ClosedForm, 0.0, true});
    }
  }
  return res;
}

FisherCurve transient_qfi_curve(const ProbeSpec& probe, const BathSpec& bath, ProbeModel model,
                                std::span<const double> t_grid, const TransientOptions& opt) {
  return transient_qfi(probe, bath, model, t_grid, opt).curve;
}

}  // namespace qthermo
