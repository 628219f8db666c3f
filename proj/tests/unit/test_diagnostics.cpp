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


#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qthermo/diagnostics.hpp"
#include "qthermo/equilibrium.hpp"

using namespace qthermo;

namespace {
const FockSpace kSpace(1, 60);
DensityMatrix make(const ProbeSpec& p, const FockSpace& s = kSpace) { return to_density(prepare(s, p)); }
}  // namespace

TEST(Moments, FockStates) {
  // <x^4> = 3/4 (2n^2 + 2n + 1), <x^2> = n + 1/2
  const QuadratureMoments m = quadrature_moments(make(ProbeSpec::fock(6)));
  EXPECT_NEAR(m.mean, 0.0, 1e-14);
  EXPECT_NEAR(m.m2, 6.5, 1e-12);
  EXPECT_NEAR(m.m4, 63.75, 1e-10);
  EXPECT_NEAR(kurtosis(m), 255.0 / 169.0, 1e-12);
  EXPECT_NEAR(skewness(m), 0.0, 1e-12);
  EXPECT_FALSE(m.cutoff_warning);
  EXPECT_NEAR(quadrature_moments(make(ProbeSpec::fock(0))).m2, 0.5, 1e-14);
}

TEST(Moments, GaussianFamiliesHaveNormalKurtosis) {
  const ProbeSpec states[] = {ProbeSpec::coherent(1.5), ProbeSpec::coherent(2.0), ProbeSpec::squeezed_vacuum(0.5),
                              ProbeSpec::thermal(0.3), ProbeSpec::squeezed_thermal(0.4, 0.2)};
  for (const auto& p : states) {
    const DensityMatrix rho = make(p);
    EXPECT_NEAR(kurtosis(rho), 3.0, 1e-6) << p.to_string();
    EXPECT_NEAR(skewness(rho), 0.0, 1e-8) << p.to_string();
  }
}

TEST(Moments, CatIsPlatykurtic) {
  const DensityMatrix rho = make(ProbeSpec::cat(2.0, Parity::Odd));
  EXPECT_LT(kurtosis(rho), 2.0);
  EXPECT_NEAR(skewness(rho), 0.0, 1e-10);
}

TEST(Moments, DisplacedMeanAndSkew) {
  // a coherent state is symmetric about its mean
  const QuadratureMoments m = quadrature_moments(make(ProbeSpec::coherent(1.2)));
  EXPECT_NEAR(m.mean, std::sqrt(2.0) * 1.2, 1e-10);
  EXPECT_NEAR(m.m2, 0.5, 1e-10);
  EXPECT_NEAR(m.m3, 0.0, 1e-9);
}

TEST(Moments, CutoffWarning) {
  const FockSpace s(1, 30);
  EXPECT_TRUE(quadrature_moments(make(ProbeSpec::fock(29), s)).cutoff_warning);
  EXPECT_FALSE(quadrature_moments(make(ProbeSpec::coherent(1.0), s)).cutoff_warning);
}

TEST(Moments, RejectsZeroVariance) {
  QuadratureMoments m;
  EXPECT_THROW(kurtosis(m), DomainError);
  EXPECT_THROW(skewness(m), DomainError);
}

TEST(PhotonVariance, SqueezedThermalExactForm) {
  for (double r : {0.0, 0.3, 0.5}) {
    for (double nb : {0.0, 0.1, 0.4}) {
      const double v = photon_variance(make(ProbeSpec::squeezed_thermal(r, nb)));
      EXPECT_NEAR(v, sq_thermal_moments_exact(r, nb).variance, 1e-8) << r << " " << nb;
    }
  }
  EXPECT_NEAR(photon_variance(make(ProbeSpec::fock(5))), 0.0, 1e-12);
  EXPECT_NEAR(photon_variance(make(ProbeSpec::coherent(1.5))), 2.25, 1e-9);
}

TEST(PhotonVariance, TwoModeTotal) {
  // n_a = n_b exactly, so Var(n_a + n_b) = 4 nbar (nbar + 1) with nbar = sinh^2 r
  const FockSpace s(2, 40);
  const double r = 0.6, nb = std::pow(std::sinh(r), 2);
  EXPECT_NEAR(photon_variance(make(ProbeSpec::tmsv(r), s)), 4 * nb * (nb + 1), 1e-8);
}

TEST(GaussianMoments, MatchesCovarianceModel) {
  const GaussianState sv = gaussian_moments(make(ProbeSpec::squeezed_vacuum(0.5)));
  const GaussianState ref = GaussianState::squeezed_vacuum(0.5);
  EXPECT_LT((sv.cov - ref.cov).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT(sv.mean.norm(), 1e-12);
  const GaussianState co = gaussian_moments(make(ProbeSpec::coherent(1.2)));
  EXPECT_LT((co.mean - GaussianState::coherent(1.2).mean).norm(), 1e-10);
  EXPECT_LT((co.cov - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff(), 1e-10);
  const double nu = 1.0 + 2 * 0.3;
  const GaussianState th = gaussian_moments(make(ProbeSpec::thermal(0.3)));
  EXPECT_LT((th.cov - nu * Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Wigner, VacuumAndNormalization) {
  const WignerField w = wigner_gaussian(GaussianState::vacuum(), PhaseGrid{});
  EXPECT_EQ(w.values.rows(), 201);
  EXPECT_NEAR(w.x(100), 0.0, 1e-14);
  EXPECT_NEAR(w.values(100, 100), 1.0 / std::numbers::pi, 1e-12);
  const double dx = w.x(1) - w.x(0), dp = w.p(1) - w.p(0);
  EXPECT_NEAR(w.values.sum() * dx * dp, 1.0, 1e-6);
}

TEST(Wigner, SqueezedThermalShape) {
  GaussianState s;
  s.cov = Eigen::Vector2d(0.5, 3.0).asDiagonal();
  const WignerField w = wigner_gaussian(s, PhaseGrid{});
  // W(x, 0) / W(0, 0) = exp(-x^2 / sigma_xx)
  const int i = 120;
  EXPECT_NEAR(w.values(i, 100) / w.values(100, 100), std::exp(-w.x(i) * w.x(i) / 0.5), 1e-10);
  EXPECT_NEAR(w.values(100, 100), 1.0 / (std::numbers::pi * std::sqrt(1.5)), 1e-12);
}

TEST(Wigner, Refusals) {
  PhaseGrid tight;
  tight.x_min = -0.5;
  tight.x_max = 0.5;
  EXPECT_THROW(wigner_gaussian(GaussianState::vacuum(), tight), DomainError);
  PhaseGrid tiny;
  tiny.nx = 1;
  EXPECT_THROW(wigner_gaussian(GaussianState::vacuum(), tiny), DomainError);
  GaussianState bad;
  bad.cov = Eigen::Vector2d(0.5, 0.5).asDiagonal();
  EXPECT_THROW(wigner_gaussian(bad, PhaseGrid{}), DomainError);
}

TEST(Wigner, CsvLayout) {
  PhaseGrid wide;
  wide.x_min = wide.p_min = -8;
  wide.x_max = wide.p_max = 8;
  wide.nx = wide.np = 161;
  const WignerField w = wigner_gaussian(GaussianState::vacuum(), wide);
  const std::string csv = w.to_csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "x,p,W");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 161 * 161);
}

TEST(KurtosisTrajectory, GaussianStaysNormal) {
  const BathSpec bath(1.0, 0.5, 0.2);
  const std::vector<double> t = {0.0, 1.0, 5.0};
  for (const auto& p : {ProbeSpec::squeezed_vacuum(0.5), ProbeSpec::coherent(2.0)}) {
    const auto pts = kurtosis_trajectory(p, bath, t);
    ASSERT_EQ(pts.size(), 3u);
    for (const auto& k : pts) {
      EXPECT_NEAR(k.kurtosis, 3.0, 1e-6) << p.to_string() << " " << k.t;
      EXPECT_NEAR(k.skewness, 0.0, 1e-8);
    }
  }
}

TEST(KurtosisTrajectory, FockRelaxesTowardNormal) {
  const BathSpec bath(1.0, 0.5, 0.2);
  const std::vector<double> t = {0.0, 2.0, 10.0};
  KurtosisOptions o;
  o.cutoff = 40;
  const auto pts = kurtosis_trajectory(ProbeSpec::fock(6), bath, t, o);
  EXPECT_NEAR(pts[0].kurtosis, 255.0 / 169.0, 1e-9);
  EXPECT_GT(pts[1].kurtosis, pts[0].kurtosis);
  EXPECT_GT(pts[2].kurtosis, pts[1].kurtosis);
  EXPECT_LT(pts[2].kurtosis, 3.0);
  const std::string csv = kurtosis_csv(pts);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,kurtosis,skewness,cutoff_warning");
}
