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

#include "qthermo/types.hpp"

namespace qthermo {

// Bogoliubov normal modes of the two-mode squeezing Hamiltonian.
struct NormalModes {
  double omega_plus;   // omega + r
  double omega_minus;  // omega - r
  double nbar_plus;
  double nbar_minus;
  double temperature;
};

// Throws InstabilityError for r >= omega, DomainError for omega_minus / T < 1e-3.
NormalModes normal_modes(double omega, double r, double temperature);

struct SqueezedThermalMoments {
  double mean;
  double variance;
};

// Printed closed form: <n> = sinh^2 r + cosh(2r) nbar,
// Var = sinh^2 r (sinh^2 r + 1) + cosh^2(2r) nbar (nbar + 1).
SqueezedThermalMoments sq_thermal_moments(double r, double nbar);
// Moments of S(r) rho_th S(r)^dag from its covariance: Var = (nbar + 1/2)^2 cosh(4r) - 1/4.
SqueezedThermalMoments sq_thermal_moments_exact(double r, double nbar);

// (d mu)^2 / s2 + (d s2)^2 / (2 s2^2)
double gaussian_scalar_cfi(double mu, double dmu, double s2, double ds2);

enum class VarianceForm { Printed, Exact };

// Photon-number CFI (d<n>/dT)^2 / Var(n). `printed_prefactor` reproduces the
// published expression, which is 1/8 of this.
double cfi_photon_number_single(double r, double omega, double temperature, bool printed_prefactor = false,
                                VarianceForm form = VarianceForm::Printed);

double cfi_quadrature_single(double omega, double temperature);
// theta, phi enter only through |u(theta)|^2, which cancels.
double cfi_quadrature_two(double omega, double r, double temperature, double theta = 0.0, double phi = 0.0);
double cfi_quadrature_two_lowT(double omega, double r, double temperature);
// Variance of X_theta: |u|^2 (coth(w+/2T) + coth(w-/2T)).
double quadrature_variance_two(double omega, double r, double temperature, double theta, double phi);

struct EnergyAndHeatCapacity {
  double energy;
  double heat_capacity;
};

EnergyAndHeatCapacity gibbs_energy_and_heat_capacity(const NormalModes& modes);

double cfi_optimal(double omega, double r, double temperature);
double cfi_optimal_lowT(double omega, double r, double temperature);
double cfi_population_difference(double omega, double r, double temperature);

}  // namespace qthermo
