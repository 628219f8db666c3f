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

#include "qthermo/equilibrium.hpp"

#include <cmath>
#include <complex>

namespace qthermo {

namespace {

double bose(double w, double t) { return 1.0 / std::expm1(w / t); }

// d nbar / dT = (w / T^2) n (n + 1)
double dbose(double w, double t) {
  const double n = bose(w, t);
  return w / (t * t) * n * (n + 1.0);
}

double coth_half(double w, double t) { return 2.0 * bose(w, t) + 1.0; }

double dcoth_half(double w, double t) { return 2.0 * dbose(w, t); }

// w^2 e^{w/T} / (T^2 (e^{w/T} - 1)^2) = (w/T)^2 n (n + 1)
double mode_heat_capacity(double w, double t) {
  const double n = bose(w, t);
  return w * w / (t * t) * n * (n + 1.0);
}

void check_temperature(double t) {
  if (!(t > 0)) throw DomainError("temperature must be > 0");
}

}  // namespace

NormalModes normal_modes(double omega, double r, double temperature) {
  check_temperature(temperature);
  if (!(omega > 0)) throw DomainError("normal_modes: omega must be > 0");
  if (!(r >= 0)) throw DomainError("normal_modes: r must be >= 0");
  if (r >= omega) throw InstabilityError("normal_modes: r >= omega, Gibbs state undefined");
  const double wm = omega - r;
  if (wm / temperature < 1e-3) throw DomainError("normal_modes: soft mode, omega - r << T (occupation diverges)");
  return {omega + r, wm, bose(omega + r, temperature), bose(wm, temperature), temperature};
}

SqueezedThermalMoments sq_thermal_moments(double r, double nbar) {
  if (!(r >= 0) || !(nbar >= 0)) throw DomainError("sq_thermal_moments: needs r >= 0, nbar >= 0");
  const double s2 = std::sinh(r) * std::sinh(r);
  const double c2 = std::cosh(2.0 * r);
  return {s2 + c2 * nbar, s2 * (s2 + 1.0) + c2 * c2 * nbar * (nbar + 1.0)};
}

SqueezedThermalMoments sq_thermal_moments_exact(double r, double nbar) {
  if (!(r >= 0) || !(nbar >= 0)) throw DomainError("sq_thermal_moments_exact: needs r >= 0, nbar >= 0");
  const double h = nbar + 0.5;
  return {h * std::cosh(2.0 * r) - 0.5, h * h * std::cosh(4.0 * r) - 0.25};
}

double gaussian_scalar_cfi(double /*mu*/, double dmu, double s2, double ds2) {
  if (!(s2 > 0)) throw DomainError("gaussian_scalar_cfi: variance must be > 0");
  return dmu * dmu / s2 + ds2 * ds2 / (2.0 * s2 * s2);
}

double cfi_photon_number_single(double r, double omega, double temperature, bool printed_prefactor,
                                VarianceForm form) {
  check_temperature(temperature);
  const double nb = bose(omega, temperature);
  const auto m = form == VarianceForm::Printed ? sq_thermal_moments(r, nb) : sq_thermal_moments_exact(r, nb);
  const double dmean = std::cosh(2.0 * r) * dbose(omega, temperature);
  const double f = gaussian_scalar_cfi(m.mean, dmean, m.variance, 0.0);
  return printed_prefactor ? f / 8.0 : f;
}

double cfi_quadrature_single(double omega, double temperature) {
  check_temperature(temperature);
  // Variance channel of sigma_x^2 = (nbar + 1/2) e^{-2r}; the e^{-2r} cancels.
  const double c = coth_half(omega, temperature);
  return gaussian_scalar_cfi(0.0, 0.0, c, dcoth_half(omega, temperature));
}

double quadrature_variance_two(double omega, double r, double temperature, double theta, double phi) {
  const NormalModes m = normal_modes(omega, r, temperature);
  const std::complex<double> u =
      std::cosh(r) * std::polar(1.0, -theta) - std::sinh(r) * std::polar(1.0, phi - theta);
  return std::norm(u) * (coth_half(m.omega_plus, temperature) + coth_half(m.omega_minus, temperature));
}

double cfi_quadrature_two(double omega, double r, double temperature, double theta, double phi) {
  const NormalModes m = normal_modes(omega, r, temperature);
  const std::complex<double> u =
      std::cosh(r) * std::polar(1.0, -theta) - std::sinh(r) * std::polar(1.0, phi - theta);
  const double u2 = std::norm(u);
  const double s2 = u2 * (coth_half(m.omega_plus, temperature) + coth_half(m.omega_minus, temperature));
  const double ds2 = u2 * (dcoth_half(m.omega_plus, temperature) + dcoth_half(m.omega_minus, temperature));
  return gaussian_scalar_cfi(0.0, 0.0, s2, ds2);
}

double cfi_quadrature_two_lowT(double omega, double r, double temperature) {
  check_temperature(temperature);
  const double w = omega - r;
  return w * w / (2.0 * std::pow(temperature, 4)) * std::exp(-2.0 * w / temperature);
}

EnergyAndHeatCapacity gibbs_energy_and_heat_capacity(const NormalModes& m) {
  const double t = m.temperature;
  return {m.omega_plus * m.nbar_plus + m.omega_minus * m.nbar_minus,
          mode_heat_capacity(m.omega_plus, t) + mode_heat_capacity(m.omega_minus, t)};
}

double cfi_optimal(double omega, double r, double temperature) {
  const NormalModes m = normal_modes(omega, r, temperature);
  return gibbs_energy_and_heat_capacity(m).heat_capacity / (temperature * temperature);
}

double cfi_optimal_lowT(double omega, double r, double temperature) {
  check_temperature(temperature);
  const double w = omega - r;
  return w * w / std::pow(temperature, 4) * std::exp(-w / temperature);
}

double cfi_population_difference(double omega, double r, double temperature) {
  const NormalModes m = normal_modes(omega, r, temperature);
  const double d = dbose(m.omega_plus, temperature) - dbose(m.omega_minus, temperature);
  const double var = m.nbar_plus * (1.0 + m.nbar_plus) + m.nbar_minus * (1.0 + m.nbar_minus);
  return d * d / var;
}

}  // namespace qthermo
