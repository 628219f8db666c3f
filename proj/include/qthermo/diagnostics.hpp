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

#include <span>
#include <string>
#include <vector>

#include "qthermo/fockspace.hpp"
#include "qthermo/gaussian.hpp"
#include "qthermo/lindblad.hpp"
#include "qthermo/probe.hpp"

namespace qthermo {

// Central moments of x = (a + a^dag)/sqrt(2); vacuum m2 = 1/2.
struct QuadratureMoments {
  double mean = 0.0;
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;
  bool cutoff_warning = false;  // <x^4> moves by > 1e-4 relative with 10 extra levels
};

QuadratureMoments quadrature_moments(const DensityMatrix& rho);
double kurtosis(const QuadratureMoments& m);
double skewness(const QuadratureMoments& m);
double kurtosis(const DensityMatrix& rho);
double skewness(const DensityMatrix& rho);

struct KurtosisPoint {
  double t;
  double kurtosis;
  double skewness;
  bool cutoff_warning;
};

struct KurtosisOptions {
  int cutoff = 60;
  Frame frame = Frame::Interaction;
  EvolveOptions evolve;
  PrepareOptions prepare;
};

std::vector<KurtosisPoint> kurtosis_trajectory(const ProbeSpec& probe, const BathSpec& bath,
                                               std::span<const double> t_grid, const KurtosisOptions& opt = {});
std::string kurtosis_csv(const std::vector<KurtosisPoint>& pts);

// <n^2> - <n>^2, total photon number for two modes.
double photon_variance(const DensityMatrix& rho);

// First and second quadrature moments of a one-mode state, vacuum covariance = identity.
GaussianState gaussian_moments(const DensityMatrix& rho);

struct PhaseGrid {
  double x_min = -5, x_max = 5;
  int nx = 201;
  double p_min = -5, p_max = 5;
  int np = 201;
};

struct WignerField {
  PhaseGrid grid;
  Eigen::MatrixXd values;  // values(i, j) at (x_i, p_j)

  double x(int i) const;
  double p(int j) const;
  // x,p,W rows, x outer
  std::string to_csv() const;
};

// Gaussian Wigner function with covariance sigma / 2; throws if the grid misses
// more than 1e-3 of the normalization.
WignerField wigner_gaussian(const GaussianState& state, const PhaseGrid& grid);

}  // namespace qthermo
