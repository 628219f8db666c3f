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

#include <cmath>

#include "qthermo/gaussian.hpp"
#include "qthermo/probe.hpp"

using namespace qthermo;

namespace {
const BathSpec kBath(1.0, 0.4, 0.2);
const double kRsv = std::asinh(2.0);  // n_sv = 4
}  // namespace

TEST(Bath, NuAndDerivative) {
  const auto nu = nu_of(kBath);
  EXPECT_NEAR(nu.nu, 1.17885098, 1e-6);
  EXPECT_NEAR(nu.dnu_dT, 1.21778010, 1e-7);
  EXPECT_NEAR(nu.nu, 2 * kBath.nbar() + 1, 1e-12);
  const double h = 1e-5;
  const double fd = (nu_of(kBath.with_temperature(0.4 + h)).nu - nu_of(kBath.with_temperature(0.4 - h)).nu) / (2 * h);
  EXPECT_NEAR(nu.dnu_dT, fd, 1e-7);
  EXPECT_NEAR(nu_of(BathSpec(1.0, 0.01, 0.2)).nu, 1.0, 1e-12);
  EXPECT_NEAR(kBath.nbar(), 0.08942549, 1e-8);
  EXPECT_NEAR(kBath.dnbar_dT(), 0.60889005, 1e-8);
  EXPECT_THROW(BathSpec(1.0, 0.0, 0.2).validate(), DomainError);
  EXPECT_THROW(BathSpec(-1.0, 0.4, 0.2).validate(), DomainError);
  EXPECT_THROW(BathSpec(1.0, 0.4, -0.1).validate(), DomainError);
}

TEST(EvolveCm, EndpointsAndExample) {
  const auto s0 = GaussianState::squeezed_vacuum(1.443);
  const auto g0 = evolve_cm(s0, kBath, 0.0);
  EXPECT_EQ(g0.cov, s0.cov);
  const auto ginf = evolve_cm(GaussianState::coherent(1.0), kBath, 500.0);
  EXPECT_NEAR((ginf.cov - nu_of(kBath).nu * Eigen::Matrix2d::Identity()).norm(), 0.0, 1e-12);
  EXPECT_NEAR(ginf.mean.norm(), 0.0, 1e-12);
  // sigma_0 = diag(e^{-2r}, e^{2r}): the anti-squeezed entry
  const auto g1 = evolve_cm(s0, kBath, 1.0);
  EXPECT_NEAR(g1.cov(1, 1), std::exp(-0.2) * std::exp(2.886) + (1 - std::exp(-0.2)) * 1.17885098, 1e-6);
  EXPECT_NEAR(g1.cov(1, 1), 14.893, 0.01);
}

TEST(EvolveCm, Semigroup) {
  const auto s0 = GaussianState::squeezed_vacuum(0.9);
  GaussianState c = s0;
  c.mean << 0.3, -1.1;
  const auto a = evolve_cm(evolve_cm(c, kBath, 1.3), kBath, 2.1);
  const auto b = evolve_cm(c, kBath, 3.4);
  EXPECT_LT((a.cov - b.cov).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((a.mean - b.mean).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(GaussianQfi, ThermalState) {
  const auto nu = nu_of(kBath);
  const auto s = GaussianState::thermal(nu.nu);
  const double f = gaussian_qfi(s, nu.dnu_dT * Eigen::Matrix2d::Identity());
  EXPECT_NEAR(f, 3.80556282, 1e-7);
  EXPECT_NEAR(thermal_qfi(1.0, 0.4), 3.80556282, 1e-7);
  EXPECT_NEAR(f, thermal_qfi(1.0, 0.4), 1e-12);
}

TEST(GaussianQfi, NoDependenceAndPureRejection) {
  const auto s = GaussianState::thermal(1.5);
  EXPECT_EQ(gaussian_qfi(s, Eigen::Matrix2d::Zero(), 0.0, Eigen::Vector2d::Zero()), 0.0);
  EXPECT_THROW(gaussian_qfi(GaussianState::squeezed_vacuum(0.5), Eigen::Matrix2d::Identity()), DomainError);
}

TEST(GaussianQfi, DisplacementTermAdds) {
  const auto s = GaussianState::thermal(1.5);
  const Eigen::Vector2d dd(0.2, 0.0);
  const double base = gaussian_qfi(s, Eigen::Matrix2d::Zero(), 0.0, Eigen::Vector2d::Zero());
  const double with = gaussian_qfi(s, Eigen::Matrix2d::Zero(), 0.0, dd);
  EXPECT_NEAR(with - base, 2 * dd.dot(s.cov.inverse() * dd), 1e-14);
}

TEST(SvsQfi, ClosedFormMatchesCovariancePath) {
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      const double r = 0.05 + 0.2 * i;      // r <= 2
      const double t = (0.1 + j) / 0.2;     // gamma t <= 10
      const double a = svs_qfi_evolved(r, kBath, t);
      const double b = gaussian_qfi_evolved(GaussianState::squeezed_vacuum(r), kBath, t);
      EXPECT_NEAR(a, b, 1e-10 * std::max(1.0, std::abs(b))) << r << " " << t;
    }
  EXPECT_EQ(svs_qfi_evolved(1.0, kBath, 0.0), 0.0);
}

TEST(SvsQfi, FigureTwoValues) {
  // mpmath evaluations of the evolved-covariance QFI, r = asinh 2
  EXPECT_NEAR(svs_qfi_evolved(kRsv, kBath, 0.01), 0.0122313822, 1e-9);
  EXPECT_NEAR(svs_qfi_evolved(kRsv, kBath, 0.05), 0.0563144821, 1e-9);
  const double t1 = gaussian_qfi_evolved(GaussianState::squeezed_vacuum(kRsv), kBath, 1.0);
  EXPECT_NEAR(svs_qfi_evolved(kRsv, kBath, 1.0), t1, 1e-10);
}

TEST(SvsQfi, ShortTimeLaw) {
  EXPECT_NEAR(svs_qfi_slope(4, kBath), 1.25001377, 1e-7);
  EXPECT_NEAR(svs_qfi_slope(4, kBath), 1.25002, 1e-3);
  EXPECT_NEAR(svs_qfi_short_time(4, kBath, 0.01), 0.0125002, 1e-6);
  const auto nu = nu_of(kBath);
  EXPECT_NEAR(svs_qfi_short_time(0, kBath, 0.3), 0.5 * 0.2 * 0.3 * nu.dnu_dT * nu.dnu_dT / (nu.nu - 1), 1e-12);
  // vacuum input: the law holds to first order
  const double v = svs_qfi_evolved(0.0, kBath, 0.001);
  EXPECT_NEAR(svs_qfi_short_time(0, kBath, 0.001) / v, 1.0, 1e-2);
}

TEST(SvsQfi, ThermalLimit) {
  // gamma t = 20; at gamma t = 6 the curve is still ~0.4 below
  EXPECT_NEAR(svs_qfi_evolved(kRsv, kBath, 100.0), 3.80556282, 1e-3);
}

TEST(Gaussian, PurityMatchesFockSpace) {
  const double r = 0.5, nbar = 0.3;
  GaussianState g = GaussianState::squeezed_vacuum(r);
  g.cov *= 2 * nbar + 1;
  const auto rho = std::get<DensityMatrix>(prepare(FockSpace(1, 60), ProbeSpec::squeezed_thermal(r, nbar)));
  EXPECT_NEAR(g.purity(), rho.purity(), 1e-4);
  EXPECT_TRUE(g.is_physical());
  GaussianState bad;
  bad.cov = 0.5 * Eigen::Matrix2d::Identity();
  EXPECT_FALSE(bad.is_physical());
}
