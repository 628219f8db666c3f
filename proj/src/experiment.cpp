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

#include "qthermo/experiment.hpp"

#include <omp.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "experiment_detail.hpp"
#include "qthermo/diagnostics.hpp"
#include "qthermo/equilibrium.hpp"

#ifndef QTHERMO_VERSION
#define QTHERMO_VERSION "0.0.0"
#endif

namespace qthermo {

using detail::Table;

std::string kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::TransientQfi: return "transient-qfi";
    case ExperimentKind::Ratio: return "ratio";
    case ExperimentKind::EquilibriumCfi: return "equilibrium-cfi";
    case ExperimentKind::Diagnostics: return "diagnostics";
    case ExperimentKind::Figure: return "figure";
  }
  return "?";
}

ExperimentKind parse_kind(std::string_view s) {
  for (auto k : {ExperimentKind::TransientQfi, ExperimentKind::Ratio, ExperimentKind::EquilibriumCfi,
                 ExperimentKind::Diagnostics, ExperimentKind::Figure})
    if (kind_name(k) == s) return k;
  throw ConfigError("unknown experiment kind '" + std::string(s) + "'");
}

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t k = s.find(sep, start);
    out.push_back(trim(s.substr(start, k == std::string_view::npos ? std::string_view::npos : k - start)));
    if (k == std::string_view::npos) break;
    start = k + 1;
  }
  return out;
}

double to_double(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::logic_error&) {
    throw ConfigError(where + ": not a number '" + s + "'");
  }
}

int to_int(const std::string& s, const std::string& where) {
  const double v = to_double(s, where);
  if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError(where + ": not an integer '" + s + "'");
  return static_cast<int>(v);
}

bool to_bool(const std::string& s, const std::string& where) {
  if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
  if (s == "false" || s == "no" || s == "0" || s == "off") return false;
  throw ConfigError(where + ": not a boolean '" + s + "'");
}

std::string num17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Entry {
  std::string section, key, value;
  int line;
};

std::vector<Entry> tokenize(std::string_view text) {
  std::vector<Entry> out;
  std::string section;
  int lineno = 0;
  for (const std::string& raw : split(text, '\n')) {
    ++lineno;
    std::string line = raw;
    // comments: '#' at line start or after whitespace
    for (std::size_t i = 0; i < line.size(); ++i)
      if (line[i] == '#' && (i == 0 || std::isspace(static_cast<unsigned char>(line[i - 1])))) {
        line.resize(i);
        break;
      }
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": unterminated section");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    if (section.empty()) throw ConfigError("line " + std::to_string(lineno) + ": key outside a section");
    out.push_back({section, trim(std::string_view(line).substr(0, eq)), trim(std::string_view(line).substr(eq + 1)),
                   lineno});
  }
  return out;
}

std::string model_name(ProbeModel m) { return m == ProbeModel::SingleMode ? "single" : "two"; }

}  // namespace

std::vector<double> parse_grid(std::string_view text) {
  const std::string s = trim(text);
  auto ranged = [&](const char* fn) -> std::optional<std::vector<double>> {
    const std::string f = fn;
    if (s.rfind(f + "(", 0) != 0) return std::nullopt;
    if (s.back() != ')') throw ConfigError("grid: missing ')' in '" + s + "'");
    const auto args = split(std::string_view(s).substr(f.size() + 1, s.size() - f.size() - 2), ',');
    if (args.size() != 3) throw ConfigError("grid: " + f + " takes (start, stop, count)");
    const double a = to_double(args[0], "grid"), b = to_double(args[1], "grid");
    const int n = to_int(args[2], "grid");
    if (n < 0) throw ConfigError("grid: negative count");
    if (f == "geomspace" && !(a > 0 && b > 0)) throw ConfigError("grid: geomspace needs positive bounds");
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) {
      const double u = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
      v[i] = f == "linspace" ? a + (b - a) * u : a * std::pow(b / a, u);
    }
    if (n > 1) v.back() = b;
    return v;
  };
  if (auto v = ranged("linspace")) return *v;
  if (auto v = ranged("geomspace")) return *v;
  std::vector<double> v;
  if (s.empty()) return v;
  for (const auto& tok : split(s, ',')) v.push_back(to_double(tok, "grid"));
  return v;
}

ExperimentConfig ExperimentConfig::parse(std::string_view text) {
  const auto entries = tokenize(text);
  ExperimentKind kind = ExperimentKind::TransientQfi;
  std::optional<int> id;
  for (const auto& e : entries) {
    if (e.section == "experiment" && e.key == "kind") kind = parse_kind(e.value);
    if (e.section == "experiment" && e.key == "id") id = to_int(e.value, "experiment.id");
  }
  ExperimentConfig c;
  if (kind == ExperimentKind::Figure) {
    if (!id) throw ConfigError("experiment.id is required for kind = figure");
    c = figure_config(*id);
  }
  c.kind = kind;
  bool probes_seen = false;
  for (const auto& e : entries) {
    const std::string where = "line " + std::to_string(e.line) + " (" + e.section + "." + e.key + ")";
    auto dbl = [&] { return to_double(e.value, where); };
    auto unknown = [&] { throw ConfigError(where + ": unknown key"); };
    if (e.section == "experiment") {
      if (e.key == "kind") {
      } else if (e.key == "id") {
        c.figure_id = to_int(e.value, where);
      } else if (e.key == "name") {
        c.name = e.value;
      } else {
        unknown();
      }
    } else if (e.section == "bath") {
      if (e.key == "omega") c.bath.omega = dbl();
      else if (e.key == "temperature" || e.key == "T") c.bath.temperature = dbl();
      else if (e.key == "gamma") c.bath.gamma = dbl();
      else unknown();
    } else if (e.section == "probes") {
      if (e.key != "probe") unknown();
      if (!probes_seen) c.probes.clear();
      probes_seen = true;
      try {
        c.probes.push_back(ProbeSpec::parse(e.value));
      } catch (const Error& err) {
        throw ConfigError(where + ": " + err.what());
      }
    } else if (e.section == "grid") {
      try {
        c.grids[e.key] = parse_grid(e.value);
      } catch (const ConfigError& err) {
        throw ConfigError(where + ": " + err.what());
      }
    } else if (e.section == "engine") {
      auto& g = c.engine;
      if (e.key == "cutoff") g.cutoff = to_int(e.value, where);
      else if (e.key == "rtol" || e.key == "tol") g.rtol = dbl();
      else if (e.key == "atol") g.atol = dbl();
      else if (e.key == "workers") g.workers = to_int(e.value, where);
      else if (e.key == "model") {
        if (e.value == "single") g.model = ProbeModel::SingleMode;
        else if (e.value == "two") g.model = ProbeModel::TwoMode;
        else throw ConfigError(where + ": model is single or two");
      } else if (e.key == "pump_g") g.pump_g = dbl();
      else if (e.key == "pump_alpha") g.pump_alpha = dbl();
      else if (e.key == "pump_phi") g.pump_phi = dbl();
      else if (e.key == "fock_closed_form") g.fock_closed_form = to_bool(e.value, where);
      else if (e.key == "gaussian_fast_path") g.gaussian_fast_path = to_bool(e.value, where);
      else if (e.key == "richardson") g.richardson = to_bool(e.value, where);
      else if (e.key == "prep_tail_tol") g.prep_tail_tol = dbl();
      else if (e.key == "tail_tol") g.tail_tol = dbl();
      else if (e.key == "observables") {
        g.observables.clear();
        for (auto& t : split(e.value, ','))
          if (!t.empty()) g.observables.push_back(t);
      } else if (e.key == "theta") g.theta = dbl();
      else if (e.key == "phi") g.phi = dbl();
      else unknown();
    } else if (e.section == "output") {
      if (e.key == "dir") c.out_dir = e.value;
      else if (e.key == "svg") c.svg = to_bool(e.value, where);
      else unknown();
    } else {
      throw ConfigError(where + ": unknown section");
    }
  }
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string ExperimentConfig::to_string() const {
  std::ostringstream os;
  os << "[experiment]\nkind = " << kind_name(kind) << "\n";
  if (kind == ExperimentKind::Figure) os << "id = " << figure_id << "\n";
  os << "name = " << name << "\n\n[bath]\n";
  os << "omega = " << num17(bath.omega) << "\ntemperature = " << num17(bath.temperature)
     << "\ngamma = " << num17(bath.gamma) << "\n\n[probes]\n";
  for (const auto& p : probes) os << "probe = " << p.to_string() << "\n";
  os << "\n[grid]\n";
  for (const auto& [k, v] : grids) {
    os << k << " =";
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : " ") << num17(v[i]);
    os << "\n";
  }
  const auto& g = engine;
  os << "\n[engine]\ncutoff = " << g.cutoff << "\nrtol = " << num17(g.rtol) << "\natol = " << num17(g.atol)
     << "\nworkers = " << g.workers << "\nmodel = " << model_name(g.model) << "\npump_g = " << num17(g.pump_g)
     << "\npump_alpha = " << num17(g.pump_alpha) << "\npump_phi = " << num17(g.pump_phi)
     << "\nfock_closed_form = " << (g.fock_closed_form ? "true" : "false")
     << "\ngaussian_fast_path = " << (g.gaussian_fast_path ? "true" : "false")
     << "\nrichardson = " << (g.richardson ? "true" : "false")
     << "\nprep_tail_tol = " << num17(g.prep_tail_tol) << "\ntail_tol = " << num17(g.tail_tol) << "\nobservables =";
  for (std::size_t i = 0; i < g.observables.size(); ++i) os << (i ? ", " : " ") << g.observables[i];
  os << "\ntheta = " << num17(g.theta) << "\nphi = " << num17(g.phi) << "\n";
  os << "\n[output]\ndir = " << out_dir << "\nsvg = " << (svg ? "true" : "false") << "\n";
  return os.str();
}

const std::vector<double>& ExperimentConfig::grid(const std::string& axis) const {
  const auto it = grids.find(axis);
  if (it == grids.end()) throw ConfigError("grid." + axis + " is required");
  return it->second;
}

bool ExperimentConfig::has_grid(const std::string& axis) const { return grids.count(axis) > 0; }

bool operator==(const EngineConfig& a, const EngineConfig& b) {
  return a.cutoff == b.cutoff && a.rtol == b.rtol && a.atol == b.atol && a.workers == b.workers &&
         a.model == b.model && a.pump_g == b.pump_g && a.pump_alpha == b.pump_alpha && a.pump_phi == b.pump_phi &&
         a.fock_closed_form == b.fock_closed_form && a.gaussian_fast_path == b.gaussian_fast_path &&
         a.richardson == b.richardson &&
         a.prep_tail_tol == b.prep_tail_tol && a.tail_tol == b.tail_tol && a.observables == b.observables &&
         a.theta == b.theta && a.phi == b.phi;
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
  if (a.probes.size() != b.probes.size()) return false;
  for (std::size_t i = 0; i < a.probes.size(); ++i)
    if (a.probes[i].to_string() != b.probes[i].to_string()) return false;
  return a.kind == b.kind && (a.kind != ExperimentKind::Figure || a.figure_id == b.figure_id) && a.name == b.name &&
         a.bath.omega == b.bath.omega && a.bath.temperature == b.bath.temperature && a.bath.gamma == b.bath.gamma &&
         a.grids == b.grids && a.engine == b.engine && a.out_dir == b.out_dir && a.svg == b.svg;
}

std::string ValidationReport::to_string() const {
  std::string s;
  for (const auto& l : lines) s += l + "\n";
  return s;
}

std::string config_hash(const ExperimentConfig& cfg) {
  // FNV-1a 64 over the canonical text; where the output goes is not part of the experiment
  ExperimentConfig c = cfg;
  c.out_dir.clear();
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : c.to_string()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::filesystem::path resolve_out_dir(const ExperimentConfig& cfg) {
  if (const char* env = std::getenv("QTHERMO_OUT_DIR"); env && *env) return env;
  return cfg.out_dir;
}

namespace detail {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string Table::csv() const {
  std::string s;
  for (std::size_t i = 0; i < header.size(); ++i) s += (i ? "," : "") + header[i];
  s += "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + r[i];
    s += "\n";
  }
  return s;
}

std::string probe_label(const ProbeSpec& p) {
  std::string s = family_name(p.family);
  if (p.family == Family::Cat || p.family == Family::EntangledCat) s += p.parity == Parity::Even ? "+" : "-";
  return s;
}

ProbeModel model_for(const ProbeSpec& p, const EngineConfig& e) {
  return e.model == ProbeModel::TwoMode || natural_modes(p) == 2 ? ProbeModel::TwoMode : ProbeModel::SingleMode;
}

std::vector<int> cutoff_ladder(const EngineConfig& e, ProbeModel model) {
  if (e.cutoff > 0) return {e.cutoff};
  if (model == ProbeModel::TwoMode) return {20, 24, 28};
  return {60, 80, 100, 130, 160, 200};
}

namespace {

bool needs_fock_space(const ProbeSpec& p, const EngineConfig& e, ProbeModel model) {
  if (model == ProbeModel::TwoMode) return true;
  if (e.gaussian_fast_path && gaussian_initial_state(p)) return false;
  if (e.fock_closed_form && p.family == Family::Fock) return false;
  return true;
}

ProbeSpec matched(const ProbeSpec& p, const ExperimentConfig& cfg, ProbeModel model, int cutoff) {
  if (!p.target_energy) return p;
  MatchOptions mo;
  mo.cutoff = cutoff > 0 ? cutoff : 60;
  mo.modes = model == ProbeModel::TwoMode ? 2 : 1;
  mo.prepare.tail_tol = cfg.engine.prep_tail_tol;
  return match_energy(p, *p.target_energy, cfg.bath.omega, mo);
}

TransientOptions transient_options(const ExperimentConfig& cfg, int cutoff) {
  TransientOptions o;
  o.cutoff = cutoff;
  o.xi = pump_coupling(cfg.engine.pump_g, cfg.engine.pump_alpha, cfg.engine.pump_phi);
  o.gaussian_fast_path = cfg.engine.gaussian_fast_path;
  o.fock_closed_form = cfg.engine.fock_closed_form;
  o.evolve.rtol = cfg.engine.rtol;
  o.evolve.atol = cfg.engine.atol;
  o.evolve.tail_tol = cfg.engine.tail_tol;
  o.qfi.richardson = cfg.engine.richardson;
  o.prepare.tail_tol = cfg.engine.prep_tail_tol;
  return o;
}

}  // namespace

ResolvedProbe resolve_probe(const ProbeSpec& p, const ExperimentConfig& cfg) {
  p.validate();
  const ProbeModel model = model_for(p, cfg.engine);
  if (model == ProbeModel::SingleMode && p.two_mode_only())
    throw DomainError(family_name(p.family) + " needs the two-mode model");
  if (!needs_fock_space(p, cfg.engine, model) &&
      (!p.target_energy || (p.family != Family::Cat && p.family != Family::Gkp)))
    return {matched(p, cfg, model, 0), 0, 0.0};
  const auto ladder = cutoff_ladder(cfg.engine, model);
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    try {
      const ProbeSpec s = matched(p, cfg, model, ladder[i]);
      PrepareOptions po;
      po.tail_tol = cfg.engine.prep_tail_tol;
      const Prepared prep = prepare_checked(FockSpace(model == ProbeModel::TwoMode ? 2 : 1, ladder[i]), s, po);
      return {s, ladder[i], prep.tail};
    } catch (const CutoffError&) {
      if (i + 1 == ladder.size()) throw;
    }
  }
  throw CutoffError("no cutoff on the ladder");
}

void check_times(const std::vector<double>& t, const std::string& path) {
  if (t.empty()) throw DomainError(path + ": empty grid");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!std::isfinite(t[i]) || t[i] < 0) throw DomainError(path + "[" + std::to_string(i) + "]: times must be >= 0");
    if (i && !(t[i] > t[i - 1])) throw DomainError(path + ": times must be strictly increasing");
  }
}

void check_positive(const std::vector<double>& v, const std::string& path) {
  if (v.empty()) throw DomainError(path + ": empty grid");
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i]) || !(v[i] > 0)) throw DomainError(path + "[" + std::to_string(i) + "]: must be > 0");
}

void check_nonnegative(const std::vector<double>& v, const std::string& path) {
  if (v.empty()) throw DomainError(path + ": empty grid");
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i]) || v[i] < 0) throw DomainError(path + "[" + std::to_string(i) + "]: must be >= 0");
}

namespace {

const std::set<std::string> kSingleTags = {"photon-number", "photon-number-exact", "quadrature-single",
                                           "photon-variance", "photon-variance-printed"};
const std::set<std::string> kTwoTags = {"quadrature-two",   "quadrature-two-lowT",   "optimal",
                                        "optimal-lowT",     "population-difference", "quadrature-variance",
                                        "total-population", "heat-capacity"};

double thermal_nbar(double omega, double temperature) { return 1.0 / std::expm1(omega / temperature); }

}  // namespace

bool is_two_mode_observable(const std::string& tag) { return kTwoTags.count(tag) > 0; }

void check_observable(const std::string& tag) {
  if (!kSingleTags.count(tag) && !kTwoTags.count(tag)) throw ConfigError("unknown observable '" + tag + "'");
}

double equilibrium_value(const std::string& tag, double omega, double r, double temperature, double theta,
                         double phi) {
  if (tag == "photon-number") return cfi_photon_number_single(r, omega, temperature);
  if (tag == "photon-number-exact")
    return cfi_photon_number_single(r, omega, temperature, false, VarianceForm::Exact);
  if (tag == "quadrature-single") return cfi_quadrature_single(omega, temperature);
  if (tag == "photon-variance") return sq_thermal_moments_exact(r, thermal_nbar(omega, temperature)).variance;
  if (tag == "photon-variance-printed") return sq_thermal_moments(r, thermal_nbar(omega, temperature)).variance;
  if (tag == "quadrature-two") return cfi_quadrature_two(omega, r, temperature, theta, phi);
  if (tag == "quadrature-two-lowT") return cfi_quadrature_two_lowT(omega, r, temperature);
  if (tag == "optimal") return cfi_optimal(omega, r, temperature);
  if (tag == "optimal-lowT") return cfi_optimal_lowT(omega, r, temperature);
  if (tag == "population-difference") return cfi_population_difference(omega, r, temperature);
  if (tag == "quadrature-variance") return quadrature_variance_two(omega, r, temperature, theta, phi);
  if (tag == "total-population") {
    const auto m = normal_modes(omega, r, temperature);
    return m.nbar_plus + m.nbar_minus;
  }
  if (tag == "heat-capacity") return gibbs_energy_and_heat_capacity(normal_modes(omega, r, temperature)).heat_capacity;
  throw ConfigError("unknown observable '" + tag + "'");
}

void check_equilibrium(const std::vector<std::string>& tags, double omega, const std::vector<double>& rs,
                       const std::vector<double>& Ts, const std::string& path) {
  if (tags.empty()) throw ConfigError(path + ": engine.observables is empty");
  for (const auto& t : tags) check_observable(t);
  check_nonnegative(rs, path + ".r");
  check_positive(Ts, path + ".T");
  for (const auto& t : tags) {
    if (!is_two_mode_observable(t)) continue;
    for (std::size_t i = 0; i < rs.size(); ++i)
      for (std::size_t j = 0; j < Ts.size(); ++j)
        with_path(path + ".r[" + std::to_string(i) + "]", [&] { normal_modes(omega, rs[i], Ts[j]); });
  }
}

Table transient_table(const ExperimentConfig& cfg, const std::string& stem, const std::vector<ProbeSpec>& probes,
                      const std::vector<double>& t) {
  Table tab;
  tab.stem = stem;
  tab.header = {"t", "curve", "value", "engine", "error"};
  tab.x_label = "t";
  tab.y_label = "QFI";
  tab.meta["curves"] = nlohmann::json::array();
  std::map<std::string, int> seen;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const std::string path = "probes[" + std::to_string(i) + "] (" + family_name(probes[i].family) + ")";
    std::string label = probe_label(probes[i]);
    if (seen[label]++) label += "#" + std::to_string(i);
    const ProbeModel model = model_for(probes[i], cfg.engine);
    // Climb the ladder on either tail guard so the run reports the cutoff it needed.
    TransientResult res;
    ResolvedProbe rp = with_path(path, [&] { return resolve_probe(probes[i], cfg); });
    auto ladder = cutoff_ladder(cfg.engine, model);
    auto it = std::find(ladder.begin(), ladder.end(), rp.cutoff);
    for (;;) {
      try {
        res = with_path(path, [&] { return transient_qfi(rp.spec, cfg.bath, model, t, transient_options(cfg, rp.cutoff)); });
        break;
      } catch (const CutoffError&) {
        if (rp.cutoff == 0 || it == ladder.end() || ++it == ladder.end()) throw;
        ExperimentConfig c2 = cfg;
        c2.engine.cutoff = *it;
        rp = with_path(path, [&] { return resolve_probe(probes[i], c2); });
      }
    }
    Series s{label, {}, {}};
    nlohmann::json errs = nlohmann::json::array();
    std::set<std::string> engines;
    int bad = 0;
    double max_err = 0.0;
    for (const auto& p : res.curve.points) {
      tab.rows.push_back({fmt(p.x), label, fmt(p.value), engine_name(p.engine), fmt(p.error)});
      s.x.push_back(p.x);
      s.y.push_back(p.value);
      errs.push_back(p.error);
      engines.insert(engine_name(p.engine));
      max_err = std::max(max_err, p.error);
      bad += p.converged ? 0 : 1;
    }
    tab.series.push_back(std::move(s));
    bool fock_space = false;
    for (const auto& e : engines) fock_space |= e == engine_name(Engine::NumericSld);
    tab.meta["curves"].push_back({{"label", label},
                                  {"probe", rp.spec.to_string()},
                                  {"model", model == ProbeModel::SingleMode ? "single" : "two"},
                                  {"cutoff", fock_space ? res.cutoff : 0},
                                  {"prep_tail", res.prep_tail},
                                  {"max_tail", res.max_tail},
                                  {"engines", engines},
                                  {"max_error", max_err},
                                  {"nonconverged", bad},
                                  {"errors", errs}});
  }
  return tab;
}

Table ratio_table(const ExperimentConfig& cfg, const std::string& stem, int n0, const std::vector<double>& Ts,
                  const std::vector<double>& t) {
  Table tab;
  tab.stem = stem;
  tab.header = {"t", "curve", "value", "engine", "error"};
  tab.x_label = "t";
  tab.y_label = "R";
  for (std::size_t j = 0; j < Ts.size(); ++j) {
    const std::string label = "T=" + fmt(Ts[j]);
    const FisherCurve c = with_path("grid.T[" + std::to_string(j) + "]",
                                    [&] { return ratio_curve(n0, cfg.bath.with_temperature(Ts[j]), t); });
    Series s{label, {}, {}};
    for (const auto& p : c.points) {
      tab.rows.push_back({fmt(p.x), label, fmt(p.value), engine_name(p.engine), fmt(p.error)});
      s.x.push_back(p.x);
      s.y.push_back(p.value);
    }
    tab.series.push_back(std::move(s));
  }
  tab.meta["n0"] = n0;
  return tab;
}

Table equilibrium_table(const ExperimentConfig& cfg, const std::string& stem, const std::vector<std::string>& tags,
                        const std::vector<double>& rs, const std::vector<double>& Ts, const std::string& x_axis) {
  struct Cell {
    std::size_t tag, i, j;
  };
  std::vector<Cell> cells;
  for (std::size_t k = 0; k < tags.size(); ++k)
    for (std::size_t i = 0; i < rs.size(); ++i)
      for (std::size_t j = 0; j < Ts.size(); ++j) cells.push_back({k, i, j});
  std::vector<double> vals(cells.size());
  std::vector<std::exception_ptr> errs(cells.size());
  const long n = static_cast<long>(cells.size());
#pragma omp parallel for schedule(static)
  for (long c = 0; c < n; ++c) {
    const Cell& x = cells[c];
    try {
      vals[c] = with_path("grid.r[" + std::to_string(x.i) + "], grid.T[" + std::to_string(x.j) + "]", [&] {
        return equilibrium_value(tags[x.tag], cfg.bath.omega, rs[x.i], Ts[x.j], cfg.engine.theta, cfg.engine.phi);
      });
    } catch (...) {
      errs[c] = std::current_exception();
    }
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);

  Table tab;
  tab.stem = stem;
  tab.header = {"T", "r", "observable", "value", "engine"};
  tab.x_label = x_axis;
  tab.y_label = "value";
  std::map<std::string, Series> series;
  std::vector<std::string> order;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const Cell& x = cells[c];
    tab.rows.push_back({fmt(Ts[x.j]), fmt(rs[x.i]), tags[x.tag], fmt(vals[c]), engine_name(Engine::ClosedForm)});
    const std::string key =
        tags[x.tag] + (x_axis == "T" ? " r=" + fmt(rs[x.i]) : " T=" + fmt(Ts[x.j]));
    if (!series.count(key)) order.push_back(key);
    auto& s = series[key];
    s.label = key;
    s.x.push_back(x_axis == "T" ? Ts[x.j] : rs[x.i]);
    s.y.push_back(vals[c]);
  }
  for (const auto& k : order) {
    auto s = series[k];
    // plot order along the axis
    std::vector<std::size_t> idx(s.x.size());
    for (std::size_t q = 0; q < idx.size(); ++q) idx[q] = q;
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return s.x[a] < s.x[b]; });
    Series sorted{s.label, {}, {}};
    for (auto q : idx) {
      sorted.x.push_back(s.x[q]);
      sorted.y.push_back(s.y[q]);
    }
    tab.series.push_back(std::move(sorted));
  }
  tab.meta["omega"] = cfg.bath.omega;
  tab.meta["observables"] = tags;
  return tab;
}

Table kurtosis_table(const ExperimentConfig& cfg, const std::string& stem, const std::vector<ProbeSpec>& probes,
                     const std::vector<double>& Ts, const std::vector<double>& t) {
  struct Job {
    std::size_t probe, temp;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < probes.size(); ++i)
    for (std::size_t j = 0; j < Ts.size(); ++j) jobs.push_back({i, j});
  std::vector<ResolvedProbe> rp(probes.size());
  for (std::size_t i = 0; i < probes.size(); ++i) {
    ExperimentConfig c2 = cfg;
    c2.engine.gaussian_fast_path = false;
    c2.engine.fock_closed_form = false;
    c2.engine.model = ProbeModel::SingleMode;
    rp[i] = with_path("probes[" + std::to_string(i) + "]", [&] { return resolve_probe(probes[i], c2); });
  }
  std::vector<std::vector<KurtosisPoint>> out(jobs.size());
  std::vector<int> used(jobs.size());
  std::vector<std::exception_ptr> errs(jobs.size());
  const long n = static_cast<long>(jobs.size());
#pragma omp parallel for schedule(dynamic)
  for (long k = 0; k < n; ++k) {
    const Job& jb = jobs[k];
    try {
      const std::string path = "probes[" + std::to_string(jb.probe) + "], grid.T[" + std::to_string(jb.temp) + "]";
      auto ladder = cutoff_ladder(cfg.engine, ProbeModel::SingleMode);
      auto it = std::find(ladder.begin(), ladder.end(), rp[jb.probe].cutoff);
      for (;; ++it) {
        KurtosisOptions ko;
        ko.cutoff = *it;
        ko.evolve.rtol = cfg.engine.rtol;
        ko.evolve.atol = cfg.engine.atol;
        ko.evolve.tail_tol = cfg.engine.tail_tol;
        ko.prepare.tail_tol = cfg.engine.prep_tail_tol;
        try {
          out[k] = with_path(path, [&] {
            return kurtosis_trajectory(rp[jb.probe].spec, cfg.bath.with_temperature(Ts[jb.temp]), t, ko);
          });
          used[k] = *it;
          break;
        } catch (const CutoffError&) {
          if (it + 1 == ladder.end()) throw;
        }
      }
    } catch (...) {
      errs[k] = std::current_exception();
    }
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);

  Table tab;
  tab.stem = stem;
  tab.header = {"t", "curve", "T", "kurtosis", "skewness", "cutoff_warning", "engine"};
  tab.x_label = "t";
  tab.y_label = "K";
  tab.meta["curves"] = nlohmann::json::array();
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    const std::string label = probe_label(probes[jobs[k].probe]);
    const double T = Ts[jobs[k].temp];
    Series s{label + " T=" + fmt(T), {}, {}};
    int warnings = 0;
    for (const auto& p : out[k]) {
      tab.rows.push_back({fmt(p.t), label, fmt(T), fmt(p.kurtosis), fmt(p.skewness), p.cutoff_warning ? "1" : "0",
                          "fock-moments"});
      s.x.push_back(p.t);
      s.y.push_back(p.kurtosis);
      warnings += p.cutoff_warning;
    }
    tab.series.push_back(std::move(s));
    tab.meta["curves"].push_back({{"label", label},
                                  {"T", T},
                                  {"probe", rp[jobs[k].probe].spec.to_string()},
                                  {"cutoff", used[k]},
                                  {"cutoff_warnings", warnings}});
  }
  return tab;
}

Table wigner_table(const std::string& stem, double omega, double r, double temperature, const PhaseGrid& grid) {
  GaussianState s = GaussianState::squeezed_vacuum(r);
  s.cov *= 1.0 / std::tanh(omega / (2.0 * temperature));
  const WignerField w = wigner_gaussian(s, grid);
  Table tab;
  tab.stem = stem;
  tab.header = {"x", "p", "W", "engine"};
  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j < grid.np; ++j)
      tab.rows.push_back({fmt(w.x(i)), fmt(w.p(j)), fmt(w.values(i, j)), engine_name(Engine::ClosedForm)});
  tab.meta = {{"r", r}, {"T", temperature}, {"omega", omega}, {"nx", grid.nx}, {"np", grid.np}};
  return tab;
}

}  // namespace detail

namespace {

using namespace detail;

const std::vector<double>& temps_or_bath(const ExperimentConfig& cfg, std::vector<double>& storage) {
  if (cfg.has_grid("T")) return cfg.grid("T");
  storage = {cfg.bath.temperature};
  return storage;
}

void validate_engine(const EngineConfig& e) {
  if (e.cutoff != 0 && e.cutoff < 2) throw ConfigError("engine.cutoff must be 0 or >= 2");
  if (!(e.rtol > 0) || !(e.atol > 0)) throw ConfigError("engine.rtol and engine.atol must be > 0");
  if (e.workers < 0) throw ConfigError("engine.workers must be >= 0");
  if (!(e.prep_tail_tol > 0) || !(e.tail_tol > 0)) throw ConfigError("engine tail tolerances must be > 0");
}

void validate_probes(const ExperimentConfig& cfg, ValidationReport& rep) {
  if (cfg.probes.empty()) throw ConfigError("probes: at least one probe is required");
  for (std::size_t i = 0; i < cfg.probes.size(); ++i) {
    const std::string path = "probes[" + std::to_string(i) + "]";
    const ResolvedProbe r = with_path(path, [&] { return resolve_probe(cfg.probes[i], cfg); });
    rep.resolved.push_back(r.spec);
    rep.cutoffs.push_back(r.cutoff);
    rep.lines.push_back(path + ": " + r.spec.to_string() + (r.cutoff ? " cutoff=" + std::to_string(r.cutoff) : ""));
  }
}

Output run_kind(const ExperimentConfig& cfg) {
  Output out;
  std::vector<double> tmp;
  switch (cfg.kind) {
    case ExperimentKind::TransientQfi:
      out.tables.push_back(transient_table(cfg, cfg.name, cfg.probes, cfg.grid("t")));
      break;
    case ExperimentKind::Ratio:
      out.tables.push_back(ratio_table(cfg, cfg.name, cfg.probes.front().n0, temps_or_bath(cfg, tmp), cfg.grid("t")));
      break;
    case ExperimentKind::EquilibriumCfi:
      out.tables.push_back(
          equilibrium_table(cfg, cfg.name, cfg.engine.observables, cfg.grid("r"), cfg.grid("T"), "T"));
      break;
    case ExperimentKind::Diagnostics:
      out.tables.push_back(kurtosis_table(cfg, cfg.name, cfg.probes, temps_or_bath(cfg, tmp), cfg.grid("t")));
      break;
    case ExperimentKind::Figure: return run_figure(cfg);
  }
  return out;
}

std::string svg_plot(const Table& t) {
  const double W = 640, H = 420, L = 70, R = 20, T = 20, B = 50;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : t.series)
    for (std::size_t i = 0; i < s.x.size(); ++i)
      if (std::isfinite(s.y[i])) {
        x0 = std::min(x0, s.x[i]);
        x1 = std::max(x1, s.x[i]);
        y0 = std::min(y0, s.y[i]);
        y1 = std::max(y1, s.y[i]);
      }
  if (!(x1 > x0)) x1 = x0 + 1;
  if (!(y1 > y0)) y1 = y0 + 1;
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};
  std::ostringstream os;
  char buf[128];
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  std::snprintf(buf, sizeof buf, "<rect x=\"%g\" y=\"%g\" width=\"%g\" height=\"%g\" fill=\"none\" stroke=\"black\"/>\n",
                L, T, W - L - R, H - T - B);
  os << buf;
  os << "<text x=\"" << W / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">" << t.x_label << " ["
     << fmt(x0) << ", " << fmt(x1) << "]</text>\n";
  os << "<text x=\"15\" y=\"" << H / 2 << "\" transform=\"rotate(-90 15 " << H / 2 << ")\" text-anchor=\"middle\">"
     << t.y_label << " [" << fmt(y0) << ", " << fmt(y1) << "]</text>\n";
  for (std::size_t k = 0; k < t.series.size(); ++k) {
    const auto& s = t.series[k];
    os << "<polyline fill=\"none\" stroke=\"" << colors[k % 8] << "\" points=\"";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", L + (s.x[i] - x0) / (x1 - x0) * (W - L - R),
                    H - B - (s.y[i] - y0) / (y1 - y0) * (H - T - B));
      os << buf;
    }
    os << "\"/>\n<text x=\"" << L + 10 << "\" y=\"" << T + 16 * (k + 1) << "\" fill=\"" << colors[k % 8] << "\">"
       << s.label << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string utc_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

ValidationReport validate(const ExperimentConfig& cfg) {
  ValidationReport rep;
  rep.lines.push_back("kind: " + kind_name(cfg.kind) +
                      (cfg.kind == ExperimentKind::Figure ? " " + std::to_string(cfg.figure_id) : ""));
  with_path("bath", [&] { cfg.bath.validate(); });
  validate_engine(cfg.engine);
  std::vector<double> tmp;
  switch (cfg.kind) {
    case ExperimentKind::TransientQfi:
      check_times(cfg.grid("t"), "grid.t");
      validate_probes(cfg, rep);
      break;
    case ExperimentKind::Ratio:
      check_times(cfg.grid("t"), "grid.t");
      if (cfg.grid("t").front() <= 0) throw DomainError("grid.t: ratio needs t > 0");
      check_positive(temps_or_bath(cfg, tmp), "grid.T");
      if (cfg.probes.size() != 1 || cfg.probes[0].family != Family::Fock)
        throw ConfigError("probes: ratio takes exactly one fock probe");
      with_path("probes[0]", [&] { cfg.probes[0].validate(); });
      rep.lines.push_back("probes[0]: " + cfg.probes[0].to_string());
      break;
    case ExperimentKind::EquilibriumCfi:
      check_equilibrium(cfg.engine.observables, cfg.bath.omega, cfg.grid("r"), cfg.grid("T"), "grid");
      break;
    case ExperimentKind::Diagnostics:
      check_times(cfg.grid("t"), "grid.t");
      check_positive(temps_or_bath(cfg, tmp), "grid.T");
      validate_probes(cfg, rep);
      for (std::size_t i = 0; i < cfg.probes.size(); ++i)
        if (cfg.probes[i].two_mode_only())
          throw DomainError("probes[" + std::to_string(i) + "]: quadrature moments are single-mode only");
      break;
    case ExperimentKind::Figure: validate_figure(cfg, rep); break;
  }
  rep.lines.push_back("ok");
  return rep;
}

RunReport run(const ExperimentConfig& cfg) {
  validate(cfg);
  if (cfg.engine.workers > 0) omp_set_num_threads(cfg.engine.workers);
  const Output out = run_kind(cfg);

  const std::filesystem::path dir = resolve_out_dir(cfg);
  RunReport rep;
  rep.metrics = out.metrics;
  nlohmann::json m;
  m["name"] = cfg.name;
  m["kind"] = kind_name(cfg.kind);
  if (cfg.kind == ExperimentKind::Figure) m["figure"] = cfg.figure_id;
  m["version"] = QTHERMO_VERSION;
  m["engines"] = {"numeric-SLD", "closed-form", "fock-moments"};
  m["config_hash"] = config_hash(cfg);
  m["config"] = cfg.to_string();
  m["timestamp"] = utc_now();
  m["metrics"] = out.metrics;
  m["tables"] = nlohmann::json::array();

  std::vector<std::pair<std::filesystem::path, std::string>> files;
  for (const auto& t : out.tables) {
    files.emplace_back(dir / (t.stem + ".csv"), t.csv());
    if (cfg.svg && !t.series.empty()) files.emplace_back(dir / (t.stem + ".svg"), svg_plot(t));
    nlohmann::json tj = t.meta;
    tj["stem"] = t.stem;
    tj["file"] = t.stem + ".csv";
    tj["header"] = t.header;
    tj["rows"] = t.rows.size();
    m["tables"].push_back(tj);
  }
  rep.manifest = m.dump(2) + "\n";
  files.emplace_back(dir / (cfg.name + ".manifest.json"), rep.manifest);

  // Single collector; roll back everything written if any file fails.
  bool created_dir = false;
  std::vector<std::filesystem::path> written;
  try {
    if (!std::filesystem::exists(dir)) created_dir = std::filesystem::create_directories(dir);
    for (const auto& [path, text] : files) {
      written.push_back(path);
      std::ofstream f(path, std::ios::binary | std::ios::trunc);
      f << text;
      f.close();
      if (!f) throw Error("cannot write " + path.string());
    }
  } catch (const std::exception& e) {
    std::error_code ec;
    for (const auto& p : written) std::filesystem::remove(p, ec);
    if (created_dir) std::filesystem::remove(dir, ec);
    if (dynamic_cast<const Error*>(&e)) throw;
    throw Error(std::string("output: ") + e.what());
  }
  for (const auto& f : files) rep.files.push_back(f.first);
  return rep;
}

}  // namespace qthermo
