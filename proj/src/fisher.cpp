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

#include "qthermo/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace qthermo {

double default_dT(double temperature) { return std::max(1e-4, 1e-3 * temperature); }

namespace {

struct Spectrum {
  RVector lambda;
  CMatrix u;
  double trace;
};

Spectrum spectrum(const DensityMatrix& rho) {
  CMatrix h = rho.rho;
  hermitize(h);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  if (es.info() != Eigen::Success) throw ConvergenceError("qfi: eigendecomposition failed");
  return {es.eigenvalues(), es.eigenvectors(), rho.trace()};
}

double spectral_sum(const Spectrum& s, const CMatrix& drho, double eps) {
  const CMatrix d = s.u.adjoint() * drho * s.u;
  const double floor = eps * s.trace;
  const Eigen::Index n = s.lambda.size();
  double f = 0.0;
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index j = 0; j < n; ++j) {
      const double den = s.lambda(j) + s.lambda(k);
      if (den > floor) f += std::norm(d(j, k)) / den;
    }
  return 2.0 * f;
}

QfiResult combine(double f1, std::optional<double> f2, double tol) {
  QfiResult r;
  r.value = f1;
  if (f2) {
    r.error = std::abs(f1 - *f2);
    r.converged = r.error <= tol * std::abs(*f2) + 1e-14;
  }
  return r;
}

double checked_dT(double temperature, const QfiOptions& opt) {
  if (!(temperature > 0)) throw DomainError("qfi_numeric: temperature must be > 0");
  const double dT = opt.dT.value_or(default_dT(temperature));
  if (!(dT > 0) || dT >= temperature) throw DomainError("qfi_numeric: dT must lie in (0, T)");
  return dT;
}

}  // namespace

double qfi_spectral(const DensityMatrix& rho, const CMatrix& drho, double eps) {
  if (drho.rows() != rho.rho.rows() || drho.cols() != rho.rho.cols()) throw DimensionError("qfi_spectral: shape");
  return spectral_sum(spectrum(rho), drho, eps);
}

QfiResult qfi_numeric(const StateFamily& family, double temperature, const QfiOptions& opt) {
  const double dT = checked_dT(temperature, opt);
  const Spectrum s = spectrum(family(temperature));
  auto at = [&](double h) {
    const CMatrix d = (family(temperature + h).rho - family(temperature - h).rho) / (2.0 * h);
    return spectral_sum(s, d, opt.eps);
  };
  const double f1 = at(dT);
  std::optional<double> f2;
  if (opt.richardson) f2 = at(0.5 * dT);
  return combine(f1, f2, opt.richardson_tol);
}

std::vector<QfiResult> qfi_numeric_batch(const TrajectoryFamily& family, double temperature, const QfiOptions& opt) {
  const double dT = checked_dT(temperature, opt);
  const auto mid = family(temperature);
  const auto up = family(temperature + dT), dn = family(temperature - dT);
  std::vector<DensityMatrix> up2, dn2;
  if (opt.richardson) {
    up2 = family(temperature + 0.5 * dT);
    dn2 = family(temperature - 0.5 * dT);
  }
  const std::size_t n = mid.size();
  if (up.size() != n || dn.size() != n || (opt.richardson && (up2.size() != n || dn2.size() != n)))
    throw DimensionError("qfi_numeric_batch: family returned inconsistent sample counts");
  std::vector<QfiResult> out(n);
  std::vector<std::exception_ptr> errs(n);
  const long count = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < count; ++i) {
    try {
      const Spectrum s = spectrum(mid[i]);
      const double f1 = spectral_sum(s, (up[i].rho - dn[i].rho) / (2.0 * dT), opt.eps);
      std::optional<double> f2;
      if (opt.richardson) f2 = spectral_sum(s, (up2[i].rho - dn2[i].rho) / dT, opt.eps);
      out[i] = combine(f1, f2, opt.richardson_tol);
    } catch (...) {
      errs[i] = std::current_exception();
    }
  }
  for (auto& e : errs)
    if (e) std::rethrow_exception(e);
  return out;
}

double qfi_diagonal(std::span<const double> p, std::span<const double> dp) {
  if (p.size() != dp.size()) throw DimensionError("qfi_diagonal: length mismatch");
  double f = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (p[i] >= 1e-15) f += dp[i] * dp[i] / p[i];
  return f;
}

EFGCoefficients efg(const BathSpec& bath, double t) {
  if (!(t >= 0)) throw DomainError("efg: t must be >= 0");
  const double x = 0.5 * bath.gamma * t;
  const double nb = bath.nbar();
  const double s = std::sinh(x);
  const double f = std::cosh(x) + (2.0 * nb + 1.0) * s;
  return {2.0 * (nb + 1.0) * s / f, f, 2.0 * nb * s / f};
}

FockPopulations fock_populations_with_derivative(int n0, const BathSpec& bath, double t) {
  if (n0 < 0) throw DomainError("fock_populations: n0 must be >= 0");
  if (!(t >= 0)) throw DomainError("fock_populations: t must be >= 0");
  bath.validate();
  FockPopulations out;
  if (t == 0.0 || bath.gamma == 0.0) {
    out.p.assign(n0 + 1, 0.0);
    out.dp_dT.assign(n0 + 1, 0.0);
    out.p[n0] = 1.0;
    return out;
  }
  const double x = 0.5 * bath.gamma * t;
  const double nb = bath.nbar(), nbp = bath.dnbar_dT();
  // Scaled by e^{-x}: q = e^{-x} F, sh = e^{-x} sinh x; stable for large x.
  const double sh = -0.5 * std::expm1(-2.0 * x);
  const double q = 0.5 * (1.0 + std::exp(-2.0 * x)) + (2.0 * nb + 1.0) * sh;
  const double logF = x + std::log(q);
  const double s_over_f = sh / q;
  const double logE = std::log(2.0 * (nb + 1.0) * s_over_f);
  const double logG = nb > 0 ? std::log(2.0 * nb * s_over_f) : -std::numeric_limits<double>::infinity();
  const double dlogF = 2.0 * s_over_f * nbp;
  const double dlogE = nbp / (nb + 1.0) - dlogF;
  const double dlogG = nb > 0 ? nbp / nb - dlogF : 0.0;
  const double logpref = x - logF;

  double total = 0.0;
  std::vector<double> logs;
  for (int r = 0;; ++r) {
    const int nlo = std::max(0, r - n0);
    const int nhi = nb > 0 ? r : nlo;
    logs.clear();
    double mx = -std::numeric_limits<double>::infinity();
    for (int n = nlo; n <= nhi; ++n) {
      const int m = n0 + n - r;
      double ls = (n > 0 ? n * logG : 0.0) - std::lgamma(n + 1.0) + std::lgamma(n0 + 1.0) - std::lgamma(m + 1.0) -
                  std::lgamma(n0 - m + 1.0) + m * logE - 2.0 * (r - n) * logF + std::lgamma(r + 1.0) -
                  std::lgamma(r - n + 1.0);
      logs.push_back(ls);
      mx = std::max(mx, ls);
    }
    double sum = 0.0, theta = 0.0;
    for (int n = nlo; n <= nhi; ++n) {
      const double w = std::exp(logs[n - nlo] - mx);
      sum += w;
      const int m = n0 + n - r;
      theta += w * (n * dlogG + m * dlogE - 2.0 * (r - n) * dlogF);
    }
    theta /= sum;
    const double pr = std::exp(logpref + mx + std::log(sum));
    out.p.push_back(pr);
    out.dp_dT.push_back(pr * (theta - dlogF));
    total += pr;
    if (r > n0 + 2 && pr < 1e-12 * std::max(total, 1e-300) && pr <= out.p[r - 1]) break;
    if (r > n0 + 100000) break;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConvergenceError("fock_populations: summation window overflow");
  return out;
}

std::vector<double> fock_populations(int n0, const BathSpec& bath, double t) {
  return fock_populations_with_derivative(n0, bath, t).p;
}

double fock_qfi_exact(int n0, const BathSpec& bath, double t) {
  const auto pop = fock_populations_with_derivative(n0, bath, t);
  return qfi_diagonal(pop.p, pop.dp_dT);
}

double fock_qfi_slope(int n0, const BathSpec& bath) {
  if (n0 < 0) throw DomainError("fock_qfi_slope: n0 must be >= 0");
  const double nb = bath.nbar(), nbp = bath.dnbar_dT();
  return bath.gamma * nbp * nbp * (n0 / (nb + 1.0) + (n0 + 1.0) / nb);
}

double fock_qfi_short_time(int n0, const BathSpec& bath, double t) { return fock_qfi_slope(n0, bath) * t; }

double ratio_short_time(int n, const BathSpec& bath) {
  if (n < 0) throw DomainError("ratio_short_time: n must be >= 0");
  if (n == 0) return 1.0;
  const double nu = nu_of(bath).nu;
  const double m = 2.0 * n + 1.0;
  return (nu * nu - 1.0 / (m * m)) / (nu * nu - 1.0);
}

std::string engine_name(Engine e) {
  switch (e) {
    case Engine::NumericSld: return "numeric-SLD";
    case Engine::ClosedForm: return "closed-form";
    case Engine::ShortTime: return "short-time";
  }
  return "?";
}

std::vector<double> FisherCurve::values() const {
  std::vector<double> v;
  for (const auto& p : points) v.push_back(p.value);
  return v;
}

std::string FisherCurve::to_csv() const {
  std::ostringstream os;
  os << axis << ",value,engine,error\n";
  char buf[128];
  for (const auto& p : points) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%s,%.12g\n", p.x, p.value, engine_name(p.engine).c_str(), p.error);
    os << buf;
  }
  return os.str();
}

FisherCurve ratio_curve(int n0, const BathSpec& bath, std::span<const double> t_grid) {
  FisherCurve c;
  c.label = "R";
  const double r = std::asinh(std::sqrt(static_cast<double>(n0)));
  for (double t : t_grid) {
    if (!(t > 0)) throw DomainError("ratio_curve: grid must exclude t <= 0");
    const double fs = svs_qfi_evolved(r, bath, t);
    const double ff = fock_qfi_exact(n0, bath, t);
    const double den = std::max(fs, 1e-300);
    c.points.push_back({t, ff / den, Engine::ClosedForm, 0.0, true});
  }
  return c;
}

}  // namespace qthermo
