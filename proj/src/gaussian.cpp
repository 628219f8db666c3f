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

#include "qthermo/gaussian.hpp"

#include <cmath>

namespace qthermo {

BathSpec::BathSpec(double w, double t, double g) : omega(w), temperature(t), gamma(g) { validate(); }

void BathSpec::validate() const {
  if (!(omega > 0)) throw DomainError("BathSpec: omega must be > 0");
  if (!(temperature > 0)) throw DomainError("BathSpec: temperature must be > 0");
  if (!(gamma >= 0)) throw DomainError("BathSpec: gamma must be >= 0");
}

double BathSpec::nbar() const { return 1.0 / std::expm1(omega / temperature); }

double BathSpec::dnbar_dT() const {
  const double n = nbar();
  return omega / (temperature * temperature) * n * (n + 1.0);
}

NuDerivative nu_of(const BathSpec& bath) {
  bath.validate();
  const double x = bath.omega / (2.0 * bath.temperature);
  const double s = std::sinh(x);
  // coth via nbar keeps full precision when x is large.
  const double nu = 2.0 * bath.nbar() + 1.0;
  const double dnu = std::isinf(s) ? 0.0 : bath.omega / (2.0 * bath.temperature * bath.temperature) / (s * s);
  return {nu, dnu};
}

GaussianState GaussianState::thermal(double nu) {
  GaussianState s;
  s.cov = nu * Eigen::Matrix2d::Identity();
  return s;
}

GaussianState GaussianState::squeezed_vacuum(double r) {
  GaussianState s;
  s.cov << std::exp(-2.0 * r), 0.0, 0.0, std::exp(2.0 * r);
  return s;
}

GaussianState GaussianState::coherent(double re, double im) {
  GaussianState s;
  s.mean << std::sqrt(2.0) * re, std::sqrt(2.0) * im;
  return s;
}

bool GaussianState::is_physical(double tol) const {
  if (std::abs(cov(0, 1) - cov(1, 0)) > tol) return false;
  return cov(0, 0) > 0 && cov.determinant() >= 1.0 - tol;
}

double GaussianState::purity() const { return 1.0 / std::sqrt(cov.determinant()); }

GaussianState evolve_cm(const GaussianState& s0, const BathSpec& bath, double t, const Eigen::Matrix2d& rotation) {
  if (!(t >= 0)) throw DomainError("evolve_cm: t must be >= 0");
  const double e = std::exp(-bath.gamma * t);
  const double nu = nu_of(bath).nu;
  GaussianState s;
  s.cov = e * rotation * s0.cov * rotation.transpose() + (1.0 - e) * nu * Eigen::Matrix2d::Identity();
  s.mean = std::sqrt(e) * rotation * s0.mean;
  return s;
}

Eigen::Matrix2d evolved_cm_temperature_derivative(const BathSpec& bath, double t) {
  return -std::expm1(-bath.gamma * t) * nu_of(bath).dnu_dT * Eigen::Matrix2d::Identity();
}

double gaussian_qfi(const GaussianState& s, const Eigen::Matrix2d& dcov, double dpurity,
                    const Eigen::Vector2d& dmean) {
  if (dcov.isZero(0.0) && dpurity == 0.0 && dmean.isZero(0.0)) return 0.0;
  const double det = s.cov.determinant();
  if (det <= 1.0 + 1e-12) throw DomainError("gaussian_qfi: state is pure (det sigma <= 1), QFI formula singular");
  const Eigen::Matrix2d inv = s.cov.inverse();
  const Eigen::Matrix2d m = inv * dcov;
  const double mu = 1.0 / std::sqrt(det);
  const double mu2 = mu * mu;
  return 0.5 * (m * m).trace() / (1.0 + mu2) + 2.0 * dpurity * dpurity / (1.0 - mu2 * mu2) +
         2.0 * dmean.dot(inv * dmean);
}

double gaussian_qfi(const GaussianState& s, const Eigen::Matrix2d& dcov) {
  const double mu = s.purity();
  const double dmu = -0.5 * mu * (s.cov.inverse() * dcov).trace();
  return gaussian_qfi(s, dcov, dmu, Eigen::Vector2d::Zero());
}

double gaussian_qfi_evolved(const GaussianState& s0, const BathSpec& bath, double t) {
  if (t == 0.0 || bath.gamma == 0.0) return 0.0;
  return gaussian_qfi(evolve_cm(s0, bath, t), evolved_cm_temperature_derivative(bath, t));
}

double thermal_qfi(double omega, double temperature) {
  const double s = std::sinh(omega / (2.0 * temperature));
  if (std::isinf(s)) return 0.0;
  return omega * omega / (4.0 * std::pow(temperature, 4)) / (s * s);
}

double svs_qfi_evolved(double r_sq, const BathSpec& bath, double t) {
  if (!(r_sq >= 0) || !(t >= 0)) throw DomainError("svs_qfi_evolved: needs r >= 0, t >= 0");
  if (t == 0.0 || bath.gamma == 0.0) return 0.0;
  const auto [nu, dnu] = nu_of(bath);
  const double e = std::exp(-bath.gamma * t);
  const double c = -std::expm1(-bath.gamma * t);
  const double a = e * std::exp(2.0 * r_sq) + c * nu;
  const double b = e * std::exp(-2.0 * r_sq) + c * nu;
  const double ab = a * b;
  return 0.5 * c * c * dnu * dnu * (a * a + b * b + 2.0) / (ab * ab - 1.0);
}

double svs_qfi_slope(double n_sv, const BathSpec& bath) {
  if (!(n_sv >= 0)) throw DomainError("svs_qfi_slope: n_sv must be >= 0");
  const auto [nu, dnu] = nu_of(bath);
  const double m = 2.0 * n_sv + 1.0;
  return 0.5 * bath.gamma * dnu * dnu * m * m / (nu * m - 1.0);
}

double svs_qfi_short_time(double n_sv, const BathSpec& bath, double t) { return svs_qfi_slope(n_sv, bath) * t; }

}  // namespace qthermo
