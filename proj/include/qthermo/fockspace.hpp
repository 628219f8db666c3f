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

#include <variant>

#include "qthermo/types.hpp"

namespace qthermo {

// Truncated bosonic Fock space of one or two modes, photon numbers 0..cutoff-1.
// Two-mode basis index is n_a * cutoff + n_b.
class FockSpace {
 public:
  FockSpace(int modes, int cutoff);

  int modes() const { return modes_; }
  int cutoff() const { return cutoff_; }
  Eigen::Index dim() const { return dim_; }
  Eigen::Index index(int na, int nb = 0) const;

  bool operator==(const FockSpace& o) const { return modes_ == o.modes_ && cutoff_ == o.cutoff_; }
  bool operator!=(const FockSpace& o) const { return !(*this == o); }

 private:
  int modes_;
  int cutoff_;
  Eigen::Index dim_;
};

struct Operator {
  FockSpace space;
  CMatrix matrix;

  Operator(FockSpace s, CMatrix m);
};

struct StateVector {
  FockSpace space;
  CVector amplitudes;

  StateVector(FockSpace s, CVector v);
  double norm() const { return amplitudes.norm(); }
};

struct DensityMatrix {
  FockSpace space;
  CMatrix rho;

  DensityMatrix(FockSpace s, CMatrix m);
  static DensityMatrix from_pure(const StateVector& psi);

  double trace() const { return rho.trace().real(); }
  double purity() const;
  double hermiticity_defect() const;
  double min_eigenvalue() const;
  RVector populations() const { return rho.diagonal().real(); }
};

using State = std::variant<StateVector, DensityMatrix>;

const FockSpace& space_of(const State& s);
DensityMatrix to_density(const State& s);

struct Ladder {
  Operator annihilation;
  Operator creation;
};

Ladder ladder(const FockSpace& space, int mode);
Operator number_operator(const FockSpace& space, int mode);
Operator total_number_operator(const FockSpace& space);
Operator identity(const FockSpace& space);

// Single mode: omega a^dag a.  Two modes:
// omega (n_a + n_b) + conj(xi) a b + xi a^dag b^dag.
Operator build_hamiltonian(const FockSpace& space, double omega, Complex xi = 0.0);
// Classical-pump coupling xi = g |alpha_p| e^{i phi}.
Complex pump_coupling(double g, double alpha_p, double phi);

Complex expectation(const StateVector& psi, const Operator& op);
Complex expectation(const DensityMatrix& rho, const Operator& op);
Complex expectation(const State& s, const Operator& op);

// Traces out `traced_mode` of a two-mode state; result lives on a one-mode space.
DensityMatrix partial_trace(const DensityMatrix& rho, int traced_mode);

Operator matrix_exponential(const Operator& a);

// exp(G) v without forming exp(G): scaled Taylor series on a sparse generator.
CVector expm_action(const SparseOp& g, const CVector& v);

StateVector kron(const StateVector& a, const StateVector& b);
DensityMatrix kron(const DensityMatrix& a, const DensityMatrix& b);

double mean_photon_number(const State& s, int mode);
double mean_total_photon_number(const State& s);
// One mode: omega (<n> + 1/2).  Two modes: omega <n_a + n_b>.
double mean_energy(const State& s, double omega);

}  // namespace qthermo
