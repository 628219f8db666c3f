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

#include <cmath>
#include <numbers>

#include "experiment_detail.hpp"

namespace qthermo {

namespace detail {
namespace {

enum class StepType { Transient, Ratio, Equilibrium, Kurtosis, Wigner, FockCompare };

struct Step {
  StepType type;
  std::string stem;
  std::string t = "t", T = "T", r = "r";  // grid names
  std::vector<std::string> tags = {};
  std::string axis = "T";
};

struct Catalog {
  FigureInfo info;
  ExperimentConfig cfg;
  std::vector<Step> steps;
};

ProbeSpec with_energy(ProbeSpec p, double e) {
  p.target_energy = e;
  return p;
}

Catalog entry(int id) {
  Catalog c;
  auto& cfg = c.cfg;
  cfg.kind = ExperimentKind::Figure;
  cfg.figure_id = id;
  cfg.name = "fig" + std::to_string(id);
  cfg.bath = BathSpec(1.0, 0.4, 0.2);
  auto lin = [](double a, double b, int n) { return parse_grid("linspace(" + fmt(a) + "," + fmt(b) + "," + std::to_string(n) + ")"); };
  const double half_pi = std::numbers::pi / 2;
  switch (id) {
    case 2:
      c.info = {2, "Fock vs squeezed vacuum QFI and their ratio", "omega=1 T=0.4 gamma=0.2 n0=4 r=asinh(2)"};
      cfg.probes = {ProbeSpec::fock(4), with_energy(ProbeSpec::squeezed_vacuum(0), 4.5)};
      cfg.grids = {{"t", lin(0.05, 20, 80)}, {"T", {0.3, 0.4, 0.7}}, {"t_ratio", lin(0.01, 1, 50)}};
      c.steps = {{StepType::Transient, "fig2a_qfi"}, {StepType::Ratio, "fig2b_ratio", "t_ratio"}};
      break;
    case 3:
      c.info = {3, "Single-mode probes at equal energy", "E0=4.5 omega=1 T=0.4 gamma=0.2; coherent, svs, fock, odd cat, gkp"};
      cfg.probes = {with_energy(ProbeSpec::coherent(0), 4.5), with_energy(ProbeSpec::squeezed_vacuum(0), 4.5),
                    with_energy(ProbeSpec::fock(0), 4.5), with_energy(ProbeSpec::cat(1, Parity::Odd), 4.5),
                    with_energy(ProbeSpec::gkp(0.08), 4.5)};
      cfg.grids = {{"t", lin(0.1, 15, 50)}};
      c.steps = {{StepType::Transient, "fig3_qfi"}};
      break;
    case 4:
      c.info = {4, "Two-mode probes at equal energy",
                "Et=6 omega=1 alpha_p=4 g=0.08 phi=pi/2 T=0.4 gamma=0.2; coherent, tmsv, noon, entangled cats"};
      cfg.probes = {with_energy(ProbeSpec::coherent(0), 6), with_energy(ProbeSpec::tmsv(0), 6),
                    with_energy(ProbeSpec::noon(1), 6), with_energy(ProbeSpec::entangled_cat(1, Parity::Even), 6),
                    with_energy(ProbeSpec::entangled_cat(1, Parity::Odd), 6)};
      cfg.engine.model = ProbeModel::TwoMode;
      cfg.engine.pump_g = 0.08;
      cfg.engine.pump_alpha = 4;
      cfg.engine.pump_phi = half_pi;
      // tmsv at r=1.317 loses ~3e-3 of its norm at 20 levels per mode
      cfg.engine.cutoff = 20;
      cfg.engine.prep_tail_tol = 1e-2;
      cfg.engine.tail_tol = 1e-2;
      // dim 400 on one core: looser steps, no half-step rerun
      cfg.engine.rtol = 1e-8;
      cfg.engine.atol = 1e-10;
      cfg.engine.richardson = false;
      cfg.grids = {{"t", lin(0.25, 15, 30)}};
      c.steps = {{StepType::Transient, "fig4_qfi"}};
      break;
    case 5:
      c.info = {5, "Two-mode squeezed vacuum vs single-mode squeezed vacuum",
                "r=1 T=0.8 omega=1 alpha_p=4 g=0.08 phi=pi/2 gamma=0.2"};
      cfg.bath = BathSpec(1.0, 0.8, 0.2);
      cfg.probes = {ProbeSpec::squeezed_vacuum(1.0), ProbeSpec::tmsv(1.0)};
      cfg.engine.pump_g = 0.08;
      cfg.engine.pump_alpha = 4;
      cfg.engine.pump_phi = half_pi;
      cfg.engine.cutoff = 20;
      cfg.engine.prep_tail_tol = 1e-4;
      // pumped evolution pushes the top levels to ~3.5e-4
      cfg.engine.tail_tol = 1e-3;
      cfg.grids = {{"t", lin(0.5, 10, 20)}};
      c.steps = {{StepType::Transient, "fig5_qfi"}};
      break;
    case 6:
      c.info = {6, "Single-mode squeezed thermal state in equilibrium",
                "omega=1; photon-number and x CFI over T; Wigner and Var(n) at T=0.1 r=0.5"};
      cfg.bath = BathSpec(1.0, 0.1, 0.2);
      cfg.engine.observables = {"photon-number", "photon-number-exact"};
      cfg.grids = {{"r", {0.0, 0.2, 0.5, 0.8}},
                   {"T", lin(0.05, 2, 40)},
                   {"r_var", lin(0, 2, 41)},
                   {"T_var", {0.1}},
                   {"wigner_r", {0.5}},
                   {"r0", {0.0}}};
      c.steps = {{StepType::Equilibrium, "fig6a_photon_number_cfi"},
                 {StepType::Wigner, "fig6b_wigner", "t", "T_var", "wigner_r"},
                 {StepType::Equilibrium, "fig6c_photon_variance", "t", "T_var", "r_var",
                  {"photon-variance", "photon-variance-printed"}, "r"},
                 {StepType::Equilibrium, "fig6d_quadrature_single_cfi", "t", "T", "r0", {"quadrature-single"}}};
      break;
    case 7:
      c.info = {7, "Two-mode squeezed thermal state, quadrature CFI",
                "omega=1; exact over T for r in {0.1,0.5,0.9}; low-T form over r; Var(X) and N_A+N_B at r=0.1 phi=pi/2"};
      cfg.engine.observables = {"quadrature-two"};
      cfg.engine.phi = half_pi;
      cfg.grids = {{"r", {0.1, 0.5, 0.9}}, {"T", lin(0.05, 1, 40)}, {"r_lowT", lin(0, 0.95, 20)},
                   {"T_lowT", {0.05, 0.1, 0.2}}, {"r_pop", {0.1}}};
      c.steps = {{StepType::Equilibrium, "fig7a_quadrature_two_cfi"},
                 {StepType::Equilibrium, "fig7b_quadrature_two_lowT", "t", "T_lowT", "r_lowT", {"quadrature-two-lowT", "quadrature-two"}, "r"},
                 {StepType::Equilibrium, "fig7c_variance_population", "t", "T", "r_pop",
                  {"quadrature-variance", "total-population"}}};
      break;
    case 8:
      c.info = {8, "Optimal (energy) CFI, exact and low-T", "omega=2; r in {0.5,1,1.5,1.9}"};
      cfg.bath = BathSpec(2.0, 0.4, 0.2);
      cfg.engine.observables = {"optimal", "optimal-lowT"};
      cfg.grids = {{"r", {0.5, 1.0, 1.5, 1.9}}, {"T", lin(0.05, 1, 40)}};
      c.steps = {{StepType::Equilibrium, "fig8_optimal_cfi"}};
      break;
    case 9:
      c.info = {9, "Fock |6> QFI, closed form vs master equation", "omega=1 T=0.4 gamma=0.2 n0=6"};
      cfg.probes = {ProbeSpec::fock(6)};
      cfg.grids = {{"t", lin(0.5, 20, 40)}};
      c.steps = {{StepType::FockCompare, "fig9_fock_comparison"}};
      break;
    case 10:
      c.info = {10, "Quadrature kurtosis along thermalization",
                "omega=1 gamma=0.2 T in {0.1,0.5,1,2}; coherent alpha=2, svs r=0.5, fock 6, gkp delta=0.08"};
      cfg.probes = {ProbeSpec::coherent(2), ProbeSpec::squeezed_vacuum(0.5), ProbeSpec::fock(6), ProbeSpec::gkp(0.08)};
      cfg.grids = {{"t", lin(0, 25, 51)}, {"T", {0.1, 0.5, 1.0, 2.0}}};
      c.steps = {{StepType::Kurtosis, "fig10_kurtosis"}};
      break;
    case 11:
      c.info = {11, "Long-time QFI ratio Fock/SVS", "omega=1 gamma=0.2 n0=4 T in {0.3,0.4,0.5,0.7}"};
      cfg.probes = {ProbeSpec::fock(4)};
      cfg.grids = {{"t", lin(0.1, 20, 80)}, {"T", {0.3, 0.4, 0.5, 0.7}}};
      c.steps = {{StepType::Ratio, "fig11_ratio"}};
      break;
    case 12:
      c.info = {12, "Population-difference CFI", "omega=2; r in {0.5,1,1.5,1.9}"};
      cfg.bath = BathSpec(2.0, 0.4, 0.2);
      cfg.engine.observables = {"population-difference", "optimal"};
      cfg.grids = {{"r", {0.5, 1.0, 1.5, 1.9}}, {"T", lin(0.05, 1, 40)}};
      c.steps = {{StepType::Equilibrium, "fig12_population_difference_cfi"}};
      break;
    default: throw ConfigError("unknown figure id " + std::to_string(id) + " (supported: 2-12)");
  }
  return c;
}

const std::vector<std::string>& tags_of(const Step& s, const ExperimentConfig& cfg) {
  return s.tags.empty() ? cfg.engine.observables : s.tags;
}

PhaseGrid wigner_grid() {
  PhaseGrid g;
  g.nx = g.np = 101;
  return g;
}

}  // namespace

void validate_figure(const ExperimentConfig& cfg, ValidationReport& rep) {
  const Catalog cat = entry(cfg.figure_id);
  bool probes_done = false;
  for (const auto& s : cat.steps) {
    switch (s.type) {
      case StepType::Transient:
      case StepType::Kurtosis:
      case StepType::FockCompare:
        check_times(cfg.grid(s.t), "grid." + s.t);
        if (s.type == StepType::Kurtosis) check_positive(cfg.grid(s.T), "grid." + s.T);
        if (cfg.probes.empty()) throw ConfigError("probes: at least one probe is required");
        if (s.type == StepType::FockCompare && cfg.probes[0].family != Family::Fock)
          throw ConfigError("probes[0]: figure 9 compares a fock probe");
        if (!probes_done) {
          for (std::size_t i = 0; i < cfg.probes.size(); ++i) {
            const std::string path = "probes[" + std::to_string(i) + "]";
            ExperimentConfig c2 = cfg;
            if (s.type == StepType::Kurtosis) {
              c2.engine.gaussian_fast_path = false;
              if (cfg.probes[i].two_mode_only()) throw DomainError(path + ": quadrature moments are single-mode only");
            }
            const ResolvedProbe r = with_path(path, [&] { return resolve_probe(cfg.probes[i], c2); });
            rep.resolved.push_back(r.spec);
            rep.cutoffs.push_back(r.cutoff);
            rep.lines.push_back(path + ": " + r.spec.to_string() +
                                (r.cutoff ? " cutoff=" + std::to_string(r.cutoff) : ""));
          }
          probes_done = true;
        }
        break;
      case StepType::Ratio:
        check_times(cfg.grid(s.t), "grid." + s.t);
        if (cfg.grid(s.t).front() <= 0) throw DomainError("grid." + s.t + ": ratio needs t > 0");
        check_positive(cfg.grid(s.T), "grid." + s.T);
        if (cfg.probes.empty() || cfg.probes[0].family != Family::Fock)
          throw ConfigError("probes[0]: the ratio panel needs a fock probe");
        break;
      case StepType::Equilibrium:
        check_equilibrium(tags_of(s, cfg), cfg.bath.omega, cfg.grid(s.r), cfg.grid(s.T), "grid");
        break;
      case StepType::Wigner:
        check_nonnegative(cfg.grid(s.r), "grid." + s.r);
        check_positive(cfg.grid(s.T), "grid." + s.T);
        break;
    }
  }
}

Output run_figure(const ExperimentConfig& cfg) {
  const Catalog cat = entry(cfg.figure_id);
  Output out;
  for (const auto& s : cat.steps) {
    switch (s.type) {
      case StepType::Transient: out.tables.push_back(transient_table(cfg, s.stem, cfg.probes, cfg.grid(s.t))); break;
      case StepType::Ratio: {
        // fock probe n0 fixes r = asinh(sqrt(n0)) inside the ratio
        const ProbeSpec p = resolve_probe(cfg.probes[0], cfg).spec;
        out.tables.push_back(ratio_table(cfg, s.stem, p.n0, cfg.grid(s.T), cfg.grid(s.t)));
        break;
      }
      case StepType::Equilibrium:
        out.tables.push_back(equilibrium_table(cfg, s.stem, tags_of(s, cfg), cfg.grid(s.r), cfg.grid(s.T), s.axis));
        break;
      case StepType::Kurtosis:
        out.tables.push_back(kurtosis_table(cfg, s.stem, cfg.probes, cfg.grid(s.T), cfg.grid(s.t)));
        break;
      case StepType::Wigner:
        out.tables.push_back(
            wigner_table(s.stem, cfg.bath.omega, cfg.grid(s.r).front(), cfg.grid(s.T).front(), wigner_grid()));
        break;
      case StepType::FockCompare: {
        ExperimentConfig numeric = cfg, exact = cfg;
        numeric.engine.fock_closed_form = false;
        exact.engine.fock_closed_form = true;
        const std::vector<ProbeSpec> one = {cfg.probes[0]};
        Table a = transient_table(exact, s.stem, one, cfg.grid(s.t));
        Table b = transient_table(numeric, s.stem, one, cfg.grid(s.t));
        Table t = a;
        t.rows.clear();
        t.series.clear();
        t.meta["curves"] = nlohmann::json::array();
        double gap = 0.0;
        for (std::size_t i = 0; i < a.rows.size(); ++i) {
          const double ve = a.series[0].y[i], vn = b.series[0].y[i];
          gap = std::max(gap, std::abs(vn - ve) / std::abs(ve));
        }
        for (auto [tab, label] : {std::pair{&a, "exact"}, std::pair{&b, "numeric"}}) {
          for (auto row : tab->rows) {
            row[1] = label;
            t.rows.push_back(row);
          }
          Series ser = tab->series[0];
          ser.label = label;
          t.series.push_back(ser);
          auto m = tab->meta["curves"][0];
          m["label"] = label;
          t.meta["curves"].push_back(m);
        }
        t.meta["max_rel_gap"] = gap;
        out.metrics["max_rel_gap"] = gap;
        out.tables.push_back(std::move(t));
        break;
      }
    }
  }
  if (cfg.figure_id == 2) {
    // first grid time at which the svs curve reaches the fock curve
    const auto& tab = out.tables.front();
    const auto& f = tab.series[0];
    const auto& g = tab.series[1];
    double cross = NAN;
    for (std::size_t i = 0; i < f.x.size(); ++i)
      if (g.y[i] >= f.y[i]) {
        cross = f.x[i];
        break;
      }
    out.metrics["t_cross"] = cross;
  }
  return out;
}

}  // namespace detail

std::vector<FigureInfo> list_figures() {
  std::vector<FigureInfo> out;
  for (int id = 2; id <= 12; ++id) out.push_back(detail::entry(id).info);
  return out;
}

ExperimentConfig figure_config(int id) { return detail::entry(id).cfg; }

}  // namespace qthermo
