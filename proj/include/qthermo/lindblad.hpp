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

#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qthermo/fockspace.hpp"
#include "qthermo/gaussian.hpp"
#include "qthermo/kernels.hpp"

namespace qthermo {

// rate * D[left, right], D[A, B] rho = A rho B^dag - 1/2 {B^dag A, rho}.
struct DissipatorTerm {
  double rate;
  Operator left;
  Operator right;
};

enum class Kernel { Parallel, SerialReference };

class Generator {
 public:
  Generator(Operator hamiltonian, std::vector<DissipatorTerm> terms);

  const FockSpace& space() const { return h_.space; }
  const Operator& hamiltonian() const { return h_; }
  const std::vector<DissipatorTerm>& terms() const { return terms_; }

  void apply(const CMatrix& rho, CMatrix& out, kernels::Workspace& ws, Kernel k = Kernel::Parallel) const;
  CMatrix apply(const CMatrix& rho, Kernel k = Kernel::Parallel) const;

  const kernels::Compiled& compiled() const { return *compiled_; }
  const std::vector<kernels::DenseTerm>& dense_terms() const { return dense_; }

 private:
  Operator h_;
  std::vector<DissipatorTerm> terms_;
  std::vector<kernels::DenseTerm> dense_;
  std::shared_ptr<const kernels::Compiled> compiled_;
};

// Interaction picture drops omega a^dag a, which commutes with the dissipator.
enum class Frame { Interaction, Lab };

Generator single_mode_generator(const FockSpace& space, const BathSpec& bath, Frame frame = Frame::Interaction);
// Collective jumps a+b at gamma (nbar+1) and a^dag+b^dag at gamma nbar, plus H2(xi).
Generator two_mode_generator(const FockSpace& space, const BathSpec& bath, Complex xi,
                             std::optional<double> omega_b = std::nullopt);

struct StepRecord {
  double h;
  bool hits_sample;
};

struct EvolveOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  double initial_step = 1e-3;
  double max_step = std::numeric_limits<double>::infinity();
  double min_step = 1e-12;
  long max_steps = 10'000'000;
  double tail_tol = 1e-5;  // top-two-level population guard
  Kernel kernel = Kernel::Parallel;
  // Fixed step sequence from an earlier run on the same grid; skips error control.
  const std::vector<StepRecord>* replay = nullptr;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  std::vector<double> tail;  // top-two-level population at each stored time
  std::vector<StepRecord> schedule;
  long rejected = 0;
  double max_tail = 0.0;

  // time, trace, <n> per mode, purity, tail
  std::string to_csv() const;
};

// Largest marginal population in the top two levels of any mode.
double top_level_population(const DensityMatrix& rho);
double top_level_population(const FockSpace& space, const CMatrix& rho);
void hermitize(CMatrix& m);

Trajectory evolve(const DensityMatrix& rho0, const Generator& gen, std::span<const double> t_grid,
                  const EvolveOptions& opt = {});

DensityMatrix steady_state(const Generator& gen);

double fidelity(const DensityMatrix& a, const DensityMatrix& b);

}  // namespace qthermo
