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

#include <optional>
#include <string>
#include <string_view>

#include "qthermo/fockspace.hpp"

namespace qthermo {

enum class Family {
  Fock,
  Coherent,
  SqueezedVacuum,
  Cat,
  Gkp,
  Tmsv,
  Noon,
  EntangledCat,
  Thermal,
  SqueezedThermal,
};

enum class Parity { Even, Odd };

std::string family_name(Family f);
Family parse_family(std::string_view name);

// Only the fields relevant to `family` are read.
struct ProbeSpec {
  Family family = Family::Fock;
  int n0 = 0;           // fock
  double alpha = 0.0;   // coherent, cat, entangled cat
  double r = 0.0;       // squeezed vacuum, tmsv, gkp, squeezed thermal
  double delta = 0.08;  // gkp envelope
  int kmax = 6;         // gkp: k in [-kmax, kmax]
  int N = 1;            // noon
  Parity parity = Parity::Even;
  double nbar = 0.0;    // thermal, squeezed thermal
  std::optional<double> target_energy;

  void validate() const;
  // States that only exist on two modes.
  bool two_mode_only() const;

  // Flat "key=value" form, e.g. "family=gkp delta=0.08 r=0.5 kmax=6".
  std::string to_string() const;
  static ProbeSpec parse(std::string_view text);

  static ProbeSpec fock(int n0);
  static ProbeSpec coherent(double alpha);
  static ProbeSpec squeezed_vacuum(double r);
  static ProbeSpec cat(double alpha, Parity p);
  static ProbeSpec gkp(double delta, double r = 0.5, int kmax = 6);
  static ProbeSpec tmsv(double r);
  static ProbeSpec noon(int N);
  static ProbeSpec entangled_cat(double alpha, Parity p);
  static ProbeSpec thermal(double nbar);
  static ProbeSpec squeezed_thermal(double r, double nbar);
};

struct PrepareOptions {
  double tail_tol = 1e-6;  // max norm lost to truncation
  int pad = -1;            // extra levels for the padded build; <0 picks automatically
};

struct Prepared {
  State state;
  double tail = 0.0;  // norm lost to truncation before renormalization
};

// Single-mode families on a two-mode space give identical product states.
Prepared prepare_checked(const FockSpace& space, const ProbeSpec& probe,
                         const PrepareOptions& opt = {});
State prepare(const FockSpace& space, const ProbeSpec& probe, const PrepareOptions& opt = {});

struct MatchOptions {
  int cutoff = 60;  // per mode, used by the bisection families
  int modes = 1;    // coherent only: 2 gives the product two-mode state
  double tol = 1e-10;
  PrepareOptions prepare;
};

// Family parameter such that mean_energy(prepare(result)) == energy.
ProbeSpec match_energy(const ProbeSpec& base, double energy, double omega,
                       const MatchOptions& opt = {});

int natural_modes(const ProbeSpec& probe);

}  // namespace qthermo
