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

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qthermo/fockspace.hpp"
#include "qthermo/gaussian.hpp"
#include "qthermo/lindblad.hpp"
#include "qthermo/probe.hpp"

namespace qthermo {

// T -> rho at fixed everything else. Must be pure and re-entrant.
using StateFamily = std::function<DensityMatrix(double)>;
// T -> states at a fixed list of sample times.
using TrajectoryFamily = std::function<std::vector<DensityMatrix>(double)>;

struct QfiOptions {
  std::optional<double> dT;  // default max(1e-4, 1e-3 T)
  double eps = 1e-12;        // drop pairs with lambda_j + lambda_k <= eps Tr rho
  bool richardson = true;    // repeat at dT/2 to flag non-convergence
  double richardson_tol = 1e-3;
};

struct QfiResult {
  double value = 0.0;
  double error = 0.0;  // |F(dT) - F(dT/2)| when the check runs
  bool converged = true;
};

double default_dT(double temperature);

// 2 sum |(d rho)_jk|^2 / (lambda_j + lambda_k) in the eigenbasis of rho.
double qfi_spectral(const DensityMatrix& rho, const CMatrix& drho, double eps = 1e-12);

QfiResult qfi_numeric(const StateFamily& family, double temperature, const QfiOptions& opt = {});
std::vector<QfiResult> qfi_numeric_batch(const TrajectoryFamily& family, double temperature,
                                         const QfiOptions& opt = {});

// sum (dp)^2 / p over entries with p >= 1e-15.
double qfi_diagonal(std::span<const double> p, std::span<const double> dp);

struct EFGCoefficients {
  double E;
  double F;
  double G;
};

EFGCoefficients efg(const BathSpec& bath, double t);

struct FockPopulations {
  std::vector<double> p;
  std::vector<double> dp_dT;
};

// Closed-form populations of a damped Fock state and their temperature derivatives.
FockPopulations fock_populations_with_derivative(int n0, const BathSpec& bath, double t);
std::vector<double> fock_populations(int n0, const BathSpec& bath, double t);
double fock_qfi_exact(int n0, const BathSpec& bath, double t);
double fock_qfi_slope(int n0, const BathSpec& bath);
double fock_qfi_short_time(int n0, const BathSpec& bath, double t);

// Fock-to-squeezed-vacuum short-time slope ratio at equal photon number n.
double ratio_short_time(int n, const BathSpec& bath);

enum class Engine { NumericSld, ClosedForm, ShortTime };
std::string engine_name(Engine e);

struct FisherPoint {
  double x;
  double value;
  Engine engine;
  double error = 0.0;
  bool converged = true;
};

struct FisherCurve {
  std::string axis = "t";
  std::string label;
  std::vector<FisherPoint> points;

  std::vector<double> values() const;
  // axis,value,engine,error with 12 significant digits
  std::string to_csv() const;
};

// R(t) = F_Fock(t) / F_SVS(t) at equal energy, r = asinh sqrt(n0).
FisherCurve ratio_curve(int n0, const BathSpec& bath, std::span<const double> t_grid);

enum class ProbeModel { SingleMode, TwoMode };

struct TransientOptions {
  int cutoff = 0;  // 0: 60 for one mode, 20 per mode for two
  Complex xi = 0.0;
  Frame frame = Frame::Interaction;
  bool gaussian_fast_path = true;
  bool fock_closed_form = false;
  EvolveOptions evolve;
  QfiOptions qfi;
  PrepareOptions prepare;
};

struct TransientResult {
  FisherCurve curve;
  double prep_tail = 0.0;
  double max_tail = 0.0;  // largest top-level population seen while integrating
  int cutoff = 0;
};

TransientResult transient_qfi(const ProbeSpec& probe, const BathSpec& bath, ProbeModel model,
                              std::span<const double> t_grid, const TransientOptions& opt = {});
FisherCurve transient_qfi_curve(const ProbeSpec& probe, const BathSpec& bath, ProbeModel model,
                                std::span<const double> t_grid, const TransientOptions& opt = {});

// Gaussian initial data for single-mode Gaussian families, if any.
std::optional<GaussianState> gaussian_initial_state(const ProbeSpec& probe);

}  // namespace qthermo
