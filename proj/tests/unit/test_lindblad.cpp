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
#include <numbers>

#include "qthermo/diagnostics.hpp"
#include "qthermo/fisher.hpp"
#include "qthermo/lindblad.hpp"
#include "qthermo/probe.hpp"

using namespace qthermo;

namespace {

const BathSpec kBath(1.0, 0.4, 0.2);

DensityMatrix rho_of(const FockSpace& s, const ProbeSpec& p) { return to_density(prepare(s, p)); }

// Quadrature moments of c = (a + b)/sqrt2 on a two-mode state.
Eigen::Matrix2d mode_c_covariance(const DensityMatrix& rho) {
  const auto la = ladder(rho.space, 0), lb = ladder(rho.space, 1);
  const CMatrix c = (la.annihilation.matrix + lb.annihilation.matrix) / std::sqrt(2.0);
  const CMatrix x = (c + c.adjoint()) / std::sqrt(2.0);
  const CMatrix p = (c - c.adjoint()) / Complex(0.0, std::sqrt(2.0));
  auto ev = [&](const CMatrix& o) { return (rho.rho * o).trace().real(); };
  const double mx = ev(x), mp = ev(p);
  Eigen::Matrix2d s;
  s(0, 0) = 2 * (ev(x * x) - mx * mx);
  s(1, 1) = 2 * (ev(p * p) - mp * mp);
  s(0, 1) = s(1, 0) = ev(x * p + p * x) - 2 * mx * mp;
  return s;
}

// d sigma/dt = A sigma + sigma A^T - 2 gamma (sigma - nu I), RK4 with small steps.
Eigen::Matrix2d cm_ode(Eigen::Matrix2d s, double omega, Complex xi, double gamma, double nu, double t) {
  const Complex k = xi / 2.0;
  Eigen::Matrix2d a;
  a << 2 * k.imag(), omega - 2 * k.real(), -(omega + 2 * k.real()), -2 * k.imag();
  auto f = [&](const Eigen::Matrix2d& m) -> Eigen::Matrix2d {
    return a * m + m * a.transpose() - 2 * gamma * (m - nu * Eigen::Matrix2d::Identity());
  };
  const int n = 20000;
  const double h = t / n;
  for (int i = 0; i < n; ++i) {
    const Eigen::Matrix2d k1 = f(s), k2 = f(s + 0.5 * h * k1), k3 = f(s + 0.5 * h * k2), k4 = f(s + h * k3);
    s += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return s;
}

}  // namespace

TEST(Generator, ZeroTemperatureHasOnlyDecay) {
  const FockSpace s(1, 10);
  const Generator g = single_mode_generator(s, BathSpec(1.0, 1e-3, 0.2));
  int active = 0;
  for (const auto& t : g.terms()) active += t.rate > 0;
  EXPECT_EQ(active, 1);
}

TEST(Generator, ParallelKernelMatchesSerialReference) {
  for (int modes : {1, 2}) {
    const FockSpace s(modes, modes == 1 ? 15 : 6);
    const Generator g = modes == 1 ? single_mode_generator(s, kBath, Frame::Lab)
                                   : two_mode_generator(s, kBath, Complex(0.1, 0.32));
    CMatrix rho = CMatrix::Random(s.dim(), s.dim());
    rho = rho * rho.adjoint();
    rho /= rho.trace();
    const CMatrix a = g.apply(rho, Kernel::Parallel), b = g.apply(rho, Kernel::SerialReference);
    EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-12);
    // trace-free and hermiticity-preserving
    EXPECT_LT(std::abs(a.trace()), 1e-12);
    EXPECT_LT((a - a.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Generator, RejectsNonDegenerateModes) {
  EXPECT_THROW(two_mode_generator(FockSpace(2, 4), kBath, 0.0, 1.3), DomainError);
  EXPECT_THROW(two_mode_generator(FockSpace(1, 4), kBath, 0.0), DimensionError);
}

TEST(SteadyState, SingleModeGibbs) {
  const FockSpace s(1, 30);
  const DensityMatrix ss = steady_state(single_mode_generator(s, kBath));
  const RVector p = ss.populations();
  EXPECT_NEAR(p(1) / p(0), std::exp(-2.5), 1e-5);
  const double q = std::exp(-2.5);
  for (int n = 0; n < 30; ++n) EXPECT_NEAR(p(n), (1 - q) * std::pow(q, n) / (1 - std::pow(q, 30)), 1e-8);
}

TEST(SteadyState, TwoModeIsDegenerate) {
  // the (a - b)/sqrt2 mode is dark under collective jumps
  EXPECT_THROW(steady_state(two_mode_generator(FockSpace(2, 5), kBath, 0.0)), ConvergenceError);
}

TEST(Evolve, VacuumOccupation) {
  const FockSpace s(1, 20);
  const std::vector<double> t = {0.5, 1, 2, 5, 10};
  const Trajectory tr = evolve(rho_of(s, ProbeSpec::fock(0)), single_mode_generator(s, kBath), t);
  for (std::size_t i = 0; i < t.size(); ++i)
    EXPECT_NEAR(mean_photon_number(tr.states[i], 0), kBath.nbar() * (1 - std::exp(-0.2 * t[i])), 1e-6);
}

TEST(Evolve, TwoModeVacuumCollectiveOccupation) {
  const FockSpace s(2, 10);
  const std::vector<double> t = {0.5, 2, 6};
  const Trajectory tr = evolve(rho_of(s, ProbeSpec::fock(0)), two_mode_generator(s, kBath, 0.0), t);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double want = 0.5 * kBath.nbar() * (1 - std::exp(-2 * 0.2 * t[i]));
    EXPECT_NEAR(mean_photon_number(tr.states[i], 0), want, 1e-6);
    EXPECT_NEAR(mean_photon_number(tr.states[i], 1), want, 1e-6);
  }
}

TEST(Evolve, TwoModeInvariantsAtPumpParameters) {
  const FockSpace s(2, 12);
  const Complex xi = pump_coupling(0.08, 4.0, std::numbers::pi / 2);
  std::vector<double> t;
  for (int i = 1; i <= 10; ++i) t.push_back(2.0 * i);
  const Trajectory tr = evolve(rho_of(s, ProbeSpec::coherent(0.5)), two_mode_generator(s, kBath, xi), t);
  for (const auto& r : tr.states) {
    EXPECT_NEAR(r.trace(), 1.0, 1e-8);
    EXPECT_LT(r.hermiticity_defect(), 1e-10);
    EXPECT_GT(r.min_eigenvalue(), -1e-8);
  }
}

TEST(Evolve, TwoModeSqueezedModeMatchesCovarianceOde) {
  // In c = (a+b)/sqrt2 the problem is a single mode damped at 2 gamma; tmsv is S_c(-r) x S_d(r).
  const double r = 0.5;
  const FockSpace s(2, 16);
  const Complex xi = pump_coupling(0.08, 4.0, std::numbers::pi / 2);
  const std::vector<double> t = {0.5, 1.5, 3.0};
  const Trajectory tr = evolve(rho_of(s, ProbeSpec::tmsv(r)), two_mode_generator(s, kBath, xi), t);
  Eigen::Matrix2d s0;
  s0 << std::exp(2 * r), 0, 0, std::exp(-2 * r);
  const double nu = nu_of(kBath).nu;
  EXPECT_LT((mode_c_covariance(rho_of(s, ProbeSpec::tmsv(r))) - s0).cwiseAbs().maxCoeff(), 1e-6);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const Eigen::Matrix2d want = cm_ode(s0, 1.0, xi, 0.2, nu, t[i]);
    EXPECT_LT((mode_c_covariance(tr.states[i]) - want).cwiseAbs().maxCoeff(), 1e-5) << t[i];
  }
}

TEST(Evolve, UnitaryConservesPurity) {
  const FockSpace s(1, 30);
  const std::vector<double> t = {1, 3, 7};
  const Trajectory tr =
      evolve(rho_of(s, ProbeSpec::coherent(1.5)), single_mode_generator(s, BathSpec(1.0, 0.4, 0.0), Frame::Lab), t);
  for (const auto& r : tr.states) EXPECT_NEAR(r.purity(), 1.0, 1e-8);
}

TEST(Evolve, FockPopulationsMatchClosedForm) {
  const FockSpace s(1, 40);
  const std::vector<double> t = {0.5, 1, 2.5, 5};
  const Trajectory tr = evolve(rho_of(s, ProbeSpec::fock(4)), single_mode_generator(s, kBath), t);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const auto p = fock_populations(4, kBath, t[i]);
    const RVector q = tr.states[i].populations();
    for (std::size_t n = 0; n < std::min<std::size_t>(p.size(), 40); ++n) EXPECT_NEAR(q(n), p[n], 1e-6);
  }
}

TEST(Evolve, GaussianClosure) {
  const FockSpace s(1, 60);
  const std::vector<double> t = {0.3, 1, 4};
  for (const auto& [probe, g0] : {std::pair{ProbeSpec::squeezed_vacuum(0.5), GaussianState::squeezed_vacuum(0.5)},
                                  std::pair{ProbeSpec::coherent(1.2), GaussianState::coherent(1.2)}}) {
    const Trajectory tr = evolve(rho_of(s, probe), single_mode_generator(s, kBath), t);
    for (std::size_t i = 0; i < t.size(); ++i) {
      const GaussianState want = evolve_cm(g0, kBath, t[i]);
      const GaussianState got = gaussian_moments(tr.states[i]);
      EXPECT_LT((got.cov - want.cov).cwiseAbs().maxCoeff(), 1e-5);
      EXPECT_LT((got.mean - want.mean).cwiseAbs().maxCoeff(), 1e-5);
    }
  }
}

TEST(Evolve, Semigroup) {
  const FockSpace s(1, 30);
  const Generator g = single_mode_generator(s, kBath);
  const DensityMatrix r0 = rho_of(s, ProbeSpec::cat(1.2, Parity::Even));
  const std::vector<double> t1 = {1.0}, t2 = {0.7}, t12 = {1.7};
  const DensityMatrix a = evolve(evolve(r0, g, t1).states[0], g, t2).states[0];
  const DensityMatrix b = evolve(r0, g, t12).states[0];
  EXPECT_LT((a.rho - b.rho).cwiseAbs().maxCoeff(), 1e-7);
}

TEST(Evolve, ApproachesSteadyState) {
  const FockSpace s(1, 30);
  const Generator g = single_mode_generator(s, kBath);
  const std::vector<double> t = {10.0 / 0.2};
  const DensityMatrix end = evolve(rho_of(s, ProbeSpec::fock(3)), g, t).states[0];
  EXPECT_GT(fidelity(end, steady_state(g)), 0.999);
}

TEST(Evolve, MonotoneThermalization) {
  const FockSpace s(1, 30);
  std::vector<double> t;
  for (int i = 1; i <= 20; ++i) t.push_back(i);
  const Trajectory tr = evolve(rho_of(s, ProbeSpec::fock(5)), single_mode_generator(s, kBath), t);
  for (std::size_t i = 1; i < t.size(); ++i)
    EXPECT_LT(mean_photon_number(tr.states[i], 0), mean_photon_number(tr.states[i - 1], 0));
}

TEST(Evolve, TailGuardRaisesCutoff) {
  const FockSpace s(1, 12);
  const std::vector<double> t = {1.0};
  // hot bath pushes population into the top levels
  EXPECT_THROW(evolve(rho_of(s, ProbeSpec::fock(0)), single_mode_generator(s, BathSpec(1.0, 10.0, 1.0)), t),
               CutoffError);
}

TEST(Evolve, ReplayReproducesNominalRun) {
  const FockSpace s(1, 25);
  const Generator g = single_mode_generator(s, kBath);
  const std::vector<double> t = {0.5, 2.0};
  const DensityMatrix r0 = rho_of(s, ProbeSpec::fock(2));
  const Trajectory a = evolve(r0, g, t);
  EvolveOptions o;
  o.replay = &a.schedule;
  const Trajectory b = evolve(r0, g, t, o);
  for (std::size_t i = 0; i < t.size(); ++i) EXPECT_LT((a.states[i].rho - b.states[i].rho).norm(), 1e-14);
  EXPECT_NE(a.to_csv().find("time,trace"), std::string::npos);
}
