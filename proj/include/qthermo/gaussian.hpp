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

#include <Eigen/Dense>

#include "qthermo/types.hpp"

namespace qthermo {

// Bath record; units hbar = k_B = 1.
struct BathSpec {
  double omega = 1.0;
  double temperature = 1.0;
  double gamma = 0.0;

  BathSpec() = default;
  BathSpec(double omega, double temperature, double gamma);
  void validate() const;

  // Bose-Einstein occupation and its temperature derivative (omega/T^2) nbar (nbar+1).
  double nbar() const;
  double dnbar_dT() const;
  BathSpec with_temperature(double t) const { return BathSpec(omega, t, gamma); }
};

struct NuDerivative {
  double nu;      // coth(omega / 2T)
  double dnu_dT;  // (omega / 2T^2) csch^2(omega / 2T)
};

NuDerivative nu_of(const BathSpec& bath);

// First moments (x, p) and covariance; vacuum covariance = identity.
struct GaussianState {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d cov = Eigen::Matrix2d::Identity();

  static GaussianState vacuum() { return {}; }
  static GaussianState thermal(double nu);
  // S(r)|0>: x squeezed, cov = diag(e^{-2r}, e^{2r}).
  static GaussianState squeezed_vacuum(double r);
  static GaussianState coherent(double alpha_re, double alpha_im = 0.0);

  bool is_physical(double tol = 1e-9) const;
  double purity() const;  // 1 / sqrt(det cov)
};

// sigma_t = e^{-gamma t} O sigma_0 O^T + (1 - e^{-gamma t}) nu I; d_t = e^{-gamma t / 2} O d_0.
GaussianState evolve_cm(const GaussianState& s0, const BathSpec& bath, double t,
                        const Eigen::Matrix2d& rotation = Eigen::Matrix2d::Identity());

// Temperature derivative of the evolved covariance: (1 - e^{-gamma t}) dnu/dT I.
Eigen::Matrix2d evolved_cm_temperature_derivative(const BathSpec& bath, double t);

// Three-term Gaussian QFI. Rejects det sigma <= 1 + 1e-12 unless every derivative vanishes.
double gaussian_qfi(const GaussianState& s, const Eigen::Matrix2d& dcov, double dpurity,
                    const Eigen::Vector2d& dmean);
// Same, with d(purity)/dT implied by dcov and dmean = 0.
double gaussian_qfi(const GaussianState& s, const Eigen::Matrix2d& dcov);

// QFI of evolve_cm(s0, bath, t) with respect to T; 0 at t = 0.
double gaussian_qfi_evolved(const GaussianState& s0, const BathSpec& bath, double t);

double thermal_qfi(double omega, double temperature);

double svs_qfi_evolved(double r_sq, const BathSpec& bath, double t);
double svs_qfi_short_time(double n_sv, const BathSpec& bath, double t);
// Slope d/dt of the short-time law.
double svs_qfi_slope(double n_sv, const BathSpec& bath);

}  // namespace qthermo
