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

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "qthermo/fisher.hpp"
#include "qthermo/gaussian.hpp"
#include "qthermo/probe.hpp"

namespace qthermo {

enum class ExperimentKind { TransientQfi, Ratio, EquilibriumCfi, Diagnostics, Figure };

std::string kind_name(ExperimentKind k);
ExperimentKind parse_kind(std::string_view s);

struct EngineConfig {
  int cutoff = 0;  // 0: smallest cutoff on the ladder that passes the tail guards
  double rtol = 1e-10;
  double atol = 1e-12;
  int workers = 0;  // 0: OpenMP default
  ProbeModel model = ProbeModel::SingleMode;
  double pump_g = 0.0;
  double pump_alpha = 0.0;
  double pump_phi = 0.0;
  bool fock_closed_form = false;
  bool gaussian_fast_path = true;
  bool richardson = true;  // half-step finite-difference check
  double prep_tail_tol = 1e-6;
  double tail_tol = 1e-5;
  std::vector<std::string> observables;  // equilibrium-cfi tags
  double theta = 0.0;
  double phi = 0.0;
};

// Flat sectioned key=value text; see README for the schema.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::TransientQfi;
  int figure_id = 0;
  std::string name = "experiment";  // output file stem
  BathSpec bath{1.0, 0.4, 0.2};
  std::vector<ProbeSpec> probes;
  std::map<std::string, std::vector<double>> grids;
  EngineConfig engine;
  std::string out_dir = "out";
  bool svg = false;

  static ExperimentConfig parse(std::string_view text);
  static ExperimentConfig load(const std::filesystem::path& path);
  // Lossless: parse(to_string()) reproduces every field bit for bit.
  std::string to_string() const;

  const std::vector<double>& grid(const std::string& axis) const;
  bool has_grid(const std::string& axis) const;
};

bool operator==(const EngineConfig& a, const EngineConfig& b);
bool operator==(const ExperimentConfig& a, const ExperimentConfig& b);

// linspace(a, b, n), geomspace(a, b, n) or a comma list.
std::vector<double> parse_grid(std::string_view text);

struct FigureInfo {
  int id;
  std::string title;
  std::string parameters;
};

std::vector<FigureInfo> list_figures();
// Default configuration for a catalog figure; ConfigError for unknown ids.
ExperimentConfig figure_config(int id);

struct ValidationReport {
  std::vector<std::string> lines;
  std::vector<ProbeSpec> resolved;  // probes after energy matching
  std::vector<int> cutoffs;         // per resolved probe, 0 when no Fock space is needed
  std::string to_string() const;
};

// All precondition checks, no dynamics. Throws the engine's typed error with the
// offending parameter path prefixed.
ValidationReport validate(const ExperimentConfig& cfg);

struct RunReport {
  std::vector<std::filesystem::path> files;
  std::map<std::string, double> metrics;
  std::string manifest;  // JSON text also written next to the CSVs
};

// Output dir: QTHERMO_OUT_DIR overrides cfg.out_dir. Nothing is left on disk on failure.
RunReport run(const ExperimentConfig& cfg);

std::filesystem::path resolve_out_dir(const ExperimentConfig& cfg);
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace qthermo
