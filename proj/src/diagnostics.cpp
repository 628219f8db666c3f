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

#include "qthermo/diagnostics.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

namespace qthermo {

namespace {

constexpr int kPad = 10;

void require_single_mode(const DensityMatrix& rho, const char* who) {
  if (rho.space.modes() != 1) throw DimensionError(std::string(who) + ": needs a one-mode state");
}

CMatrix quadrature(int n, bool momentum) {
  CMatrix a = CMatrix::Zero(n, n);
  for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  const double s = 1.0 / std::sqrt(2.0);
  if (!momentum) return s * (a + a.adjoint());
  return Complex(0.0, -s) * (a - a.adjoint());
}

double tr(const CMatrix& rho, const CMatrix& op) {
  return (rho.transpose().cwiseProduct(op)).sum().real();
}

}  // namespace

QuadratureMoments quadrature_moments(const DensityMatrix& rho) {
  require_single_mode(rho, "quadrature_moments");
  const int n = rho.space.cutoff();
  // Powers built with padding are the exact matrix elements on the kept block.
  const CMatrix xp = quadrature(n + kPad, false);
  const CMatrix x2p = xp * xp;
  const CMatrix x3p = x2p * xp;
  const CMatrix x4p = x2p * x2p;
  const double e1 = tr(rho.rho, xp.topLeftCorner(n, n));
  const double e2 = tr(rho.rho, x2p.topLeftCorner(n, n));
  const double e3 = tr(rho.rho, x3p.topLeftCorner(n, n));
  const double e4 = tr(rho.rho, x4p.topLeftCorner(n, n));
  const CMatrix xt = xp.topLeftCorner(n, n);
  const CMatrix xt2 = xt * xt;
  const double e4_trunc = tr(rho.rho, xt2 * xt2);

  QuadratureMoments m;
  m.mean = e1;
  m.m2 = e2 - e1 * e1;
  m.m3 = e3 - 3.0 * e1 * e2 + 2.0 * e1 * e1 * e1;
  m.m4 = e4 - 4.0 * e1 * e3 + 6.0 * e1 * e1 * e2 - 3.0 * e1 * e1 * e1 * e1;
  m.cutoff_warning = std::abs(e4 - e4_trunc) > 1e-4 * std::abs(e4);
  return m;
}

double kurtosis(const QuadratureMoments& m) {
  if (!(m.m2 > 1e-12)) throw DomainError("kurtosis: degenerate quadrature variance");
  return m.m4 / (m.m2 * m.m2);
}

double skewness(const QuadratureMoments& m) {
  if (!(m.m2 > 1e-12)) throw DomainError("skewness: degenerate quadrature variance");
  return m.m3 / std::pow(m.m2, 1.5);
}

double kurtosis(const DensityMatrix& rho) { return kurtosis(quadrature_moments(rho)); }
double skewness(const DensityMatrix& rho) { return skewness(quadrature_moments(rho)); }

std::vector<KurtosisPoint> kurtosis_trajectory(const ProbeSpec& probe, const BathSpec& bath,
                                               std::span<const double> t_grid, const KurtosisOptions& opt) {
  const FockSpace space(1, opt.cutoff);
  const DensityMatrix rho0 = to_density(prepare(space, probe, opt.prepare));
  const Trajectory tr = evolve(rho0, single_mode_generator(space, bath, opt.frame), t_grid, opt.evolve);
  std::vector<KurtosisPoint> out(tr.states.size());
  std::vector<std::exception_ptr> errs(out.size());
  const long n = static_cast<long>(out.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < n; ++i) {
    try {
      const auto m = quadrature_moments(tr.states[i]);
      out[i] = {tr.times[i], kurtosis(m), skewness(m), m.cutoff_warning};
    } catch (...) {
      errs[i] = std::current_exception();
    }
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  return out;
}

std::string kurtosis_csv(const std::vector<KurtosisPoint>& pts) {
  std::ostringstream os;
  os << "t,kurtosis,skewness,cutoff_warning\n";
  char buf[128];
  for (const auto& p : pts) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%d\n", p.t, p.kurtosis, p.skewness, p.cutoff_warning ? 1 : 0);
    os << buf;
  }
  return os.str();
}

double photon_variance(const DensityMatrix& rho) {
  const Operator n = total_number_operator(rho.space);
  const double m1 = expectation(rho, n).real();
  const double m2 = expectation(rho, Operator(rho.space, n.matrix * n.matrix)).real();
  return m2 - m1 * m1;
}

GaussianState gaussian_moments(const DensityMatrix& rho) {
  require_single_mode(rho, "gaussian_moments");
  const int n = rho.space.cutoff();
  const CMatrix xp = quadrature(n + kPad, false), pp = quadrature(n + kPad, true);
  const CMatrix xx = (xp * xp).topLeftCorner(n, n), ppp = (pp * pp).topLeftCorner(n, n);
  const CMatrix sym = (xp * pp + pp * xp).topLeftCorner(n, n);
  const double mx = tr(rho.rho, xp.topLeftCorner(n, n)), mp = tr(rho.rho, pp.topLeftCorner(n, n));
  GaussianState g;
  g.mean << mx, mp;
  g.cov(0, 0) = 2.0 * (tr(rho.rho, xx) - mx * mx);
  g.cov(1, 1) = 2.0 * (tr(rho.rho, ppp) - mp * mp);
  g.cov(0, 1) = g.cov(1, 0) = tr(rho.rho, sym) - 2.0 * mx * mp;
  return g;
}

double WignerField::x(int i) const {
  return grid.nx == 1 ? grid.x_min : grid.x_min + (grid.x_max - grid.x_min) * i / (grid.nx - 1);
}

double WignerField::p(int j) const {
  return grid.np == 1 ? grid.p_min : grid.p_min + (grid.p_max - grid.p_min) * j / (grid.np - 1);
}

std::string WignerField::to_csv() const {
  std::ostringstream os;
  os << "x,p,W\n";
  char buf[96];
  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j < grid.np; ++j) {
      std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", x(i), p(j), values(i, j));
      os << buf;
    }
  return os.str();
}

WignerField wigner_gaussian(const GaussianState& state, const PhaseGrid& grid) {
  if (grid.nx < 2 || grid.np < 2 || !(grid.x_max > grid.x_min) || !(grid.p_max > grid.p_min))
    throw DomainError("wigner_gaussian: grid needs at least 2x2 points on a nonempty box");
  if (!state.is_physical()) throw DomainError("wigner_gaussian: unphysical covariance");
  const Eigen::Matrix2d s = 0.5 * state.cov;
  const Eigen::Matrix2d inv = s.inverse();
  const double norm = 1.0 / (2.0 * std::numbers::pi * std::sqrt(s.determinant()));
  WignerField w{grid, Eigen::MatrixXd(grid.nx, grid.np)};
  for (int i = 0; i < grid.nx; ++i)
    for (int j = 0; j < grid.np; ++j) {
      const Eigen::Vector2d d(w.x(i) - state.mean(0), w.p(j) - state.mean(1));
      w.values(i, j) = norm * std::exp(-0.5 * d.dot(inv * d));
    }
  const double cell = (grid.x_max - grid.x_min) / (grid.nx - 1) * (grid.p_max - grid.p_min) / (grid.np - 1);
  const double total = w.values.sum() * cell;
  if (std::abs(total - 1.0) > 1e-3)
    throw DomainError("wigner_gaussian: grid too coarse or too small (normalization " + std::to_string(total) + ")");
  return w;
}

}  // namespace qthermo
