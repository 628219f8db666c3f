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

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "qthermo/diagnostics.hpp"
#include "qthermo/experiment.hpp"

namespace qthermo::detail {

struct Series {
  std::string label;
  std::vector<double> x, y;
};

struct Table {
  std::string stem;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<Series> series;  // svg only
  std::string x_label, y_label;
  nlohmann::json meta = nlohmann::json::object();

  std::string csv() const;
};

struct Output {
  std::vector<Table> tables;
  std::map<std::string, double> metrics;
};

std::string fmt(double v);  // 12 significant digits

// Re-throws the same error type with "path: " prepended.
template <class F>
auto with_path(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const InstabilityError& e) {
    throw InstabilityError(path + ": " + e.what());
  } catch (const DomainError& e) {
    throw DomainError(path + ": " + e.what());
  } catch (const DimensionError& e) {
    throw DimensionError(path + ": " + e.what());
  } catch (const CutoffError& e) {
    throw CutoffError(path + ": " + e.what());
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(path + ": " + e.what());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

std::string probe_label(const ProbeSpec& p);
ProbeModel model_for(const ProbeSpec& p, const EngineConfig& e);
std::vector<int> cutoff_ladder(const EngineConfig& e, ProbeModel model);

struct ResolvedProbe {
  ProbeSpec spec;
  int cutoff = 0;  // 0 when the probe needs no Fock space (closed-form family)
  double prep_tail = 0.0;
};

// Energy matching plus a prepare-time tail check, climbing the cutoff ladder.
ResolvedProbe resolve_probe(const ProbeSpec& p, const ExperimentConfig& cfg);

// Grid checks.
void check_times(const std::vector<double>& t, const std::string& path);
void check_positive(const std::vector<double>& v, const std::string& path);
void check_nonnegative(const std::vector<double>& v, const std::string& path);

bool is_two_mode_observable(const std::string& tag);
void check_observable(const std::string& tag);
double equilibrium_value(const std::string& tag, double omega, double r, double temperature, double theta,
                         double phi);
void check_equilibrium(const std::vector<std::string>& tags, double omega, const std::vector<double>& rs,
                       const std::vector<double>& Ts, const std::string& path);

// Table builders; all columns fixed, engine tag on every row.
Table transient_table(const ExperimentConfig& cfg, const std::string& stem, const std::vector<ProbeSpec>& probes,
                      const std::vector<double>& t);
Table ratio_table(const ExperimentConfig& cfg, const std::string& stem, int n0, const std::vector<double>& Ts,
                  const std::vector<double>& t);
// x_axis "T" puts T on the plot axis with one series per (observable, r); "r" the reverse.
Table equilibrium_table(const ExperimentConfig& cfg, const std::string& stem, const std::vector<std::string>& tags,
                        const std::vector<double>& rs, const std::vector<double>& Ts, const std::string& x_axis);
Table kurtosis_table(const ExperimentConfig& cfg, const std::string& stem, const std::vector<ProbeSpec>& probes,
                     const std::vector<double>& Ts, const std::vector<double>& t);
Table wigner_table(const std::string& stem, double omega, double r, double temperature, const PhaseGrid& grid);

Output run_figure(const ExperimentConfig& cfg);
void validate_figure(const ExperimentConfig& cfg, ValidationReport& rep);

}  // namespace qthermo::detail
