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

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qthermo/experiment.hpp"

namespace {

const char* error_kind(const std::exception& e) {
  using namespace qthermo;
  if (dynamic_cast<const InstabilityError*>(&e)) return "instability";
  if (dynamic_cast<const DomainError*>(&e)) return "domain";
  if (dynamic_cast<const DimensionError*>(&e)) return "dimension";
  if (dynamic_cast<const CutoffError*>(&e)) return "cutoff";
  if (dynamic_cast<const ConvergenceError*>(&e)) return "convergence";
  if (dynamic_cast<const ConfigError*>(&e)) return "config";
  return "error";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qthermo: transient and equilibrium thermometry datasets"};
  app.require_subcommand(1);
  std::optional<int> cutoff, workers;
  std::optional<double> tol;
  app.add_option("--cutoff", cutoff, "Fock cutoff per mode (overrides the config)");
  app.add_option("--tol", tol, "integrator relative tolerance");
  app.add_option("--workers", workers, "OpenMP worker count");

  std::string config_path, out_dir;
  int figure_id = 0;
  auto* run_cmd = app.add_subcommand("run", "run an experiment config");
  run_cmd->add_option("config", config_path)->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--out", out_dir, "output directory");
  auto* fig_cmd = app.add_subcommand("figure", "reproduce a catalog figure");
  fig_cmd->add_option("id", figure_id)->required();
  fig_cmd->add_option("--out", out_dir, "output directory");
  auto* list_cmd = app.add_subcommand("list", "list catalog figures");
  auto* val_cmd = app.add_subcommand("validate", "check a config without computing");
  val_cmd->add_option("config", config_path)->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  auto apply = [&](qthermo::ExperimentConfig& c) {
    if (cutoff) c.engine.cutoff = *cutoff;
    if (tol) c.engine.rtol = *tol;
    if (workers) c.engine.workers = *workers;
  };
  try {
    if (*list_cmd) {
      for (const auto& f : qthermo::list_figures()) std::printf("%2d  %s  [%s]\n", f.id, f.title.c_str(), f.parameters.c_str());
      return 0;
    }
    qthermo::ExperimentConfig cfg;
    if (*fig_cmd) {
      cfg = qthermo::figure_config(figure_id);
    } else {
      cfg = qthermo::ExperimentConfig::load(config_path);
    }
    apply(cfg);
    if (*val_cmd) {
      std::cout << qthermo::validate(cfg).to_string();
      return 0;
    }
    if (!out_dir.empty()) {
      cfg.out_dir = out_dir;
      // --out is explicit, so it wins over the environment
      ::unsetenv("QTHERMO_OUT_DIR");
    }
    const auto rep = qthermo::run(cfg);
    for (const auto& f : rep.files) std::printf("wrote %s\n", f.string().c_str());
    for (const auto& [k, v] : rep.metrics) std::printf("%s = %.12g\n", k.c_str(), v);
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "qthermo: %s error: %s\n", error_kind(e), e.what());
    return 2;
  }
}
