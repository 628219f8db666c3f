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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "qthermo/probe.hpp"

#include <unsupported/Eigen/KroneckerProduct>

namespace qthermo {

namespace {

constexpr int kMaxPadded = 6000;

SparseOp annihilation_sparse(int n) {
  SparseOp a(n, n);
  std::vector<Eigen::Triplet<Complex>> t;
  for (int k = 1; k < n; ++k) t.emplace_back(k - 1, k, std::sqrt(static_cast<double>(k)));
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

// Levels needed before D(alpha)S(r)|0> has negligible amplitude.
int support_hint(double alpha_abs, double r) {
  const double a2 = alpha_abs * alpha_abs;
  const double s2 = std::sinh(r) * std::sinh(r);
  const double var = a2 * std::exp(2 * r) + 2 * s2 * (s2 + 1) + 1.0;
  double hi = a2 + s2 + 12.0 * std::sqrt(var) + 40.0;
  if (r > 0) hi = std::max(hi, 2.0 * 30.0 / -std::log(std::tanh(r)) + 20.0);
  return static_cast<int>(std::ceil(hi));
}

int padded_cutoff(int cutoff, int hint, const PrepareOptions& opt) {
  int np = std::max(cutoff + (opt.pad >= 0 ? opt.pad : 10), hint);
  if (opt.pad >= 0) np = cutoff + opt.pad;
  if (np > kMaxPadded) throw CutoffError("prepare: state support exceeds padded workspace");
  return np;
}

CVector vacuum(Eigen::Index n) {
  CVector v = CVector::Zero(n);
  v(0) = 1.0;
  return v;
}

// exp[(r/2)(a^2 - a^dag^2)] v, squeezing x for r > 0.
CVector apply_squeeze(const SparseOp& a, double r, const CVector& v) {
  if (r == 0.0) return v;
  SparseOp a2 = a * a;
  SparseOp g = (0.5 * r) * (a2 - SparseOp(a2.adjoint()));
  return expm_action(g, v);
}

// exp(alpha a^dag - conj(alpha) a) v.
CVector apply_displacement(const SparseOp& a, Complex alpha, const CVector& v) {
  if (alpha == 0.0) return v;
  SparseOp g = alpha * SparseOp(a.adjoint()) - std::conj(alpha) * a;
  return expm_action(g, v);
}

CVector parity_flip(const CVector& v) {
  CVector w = v;
  for (Eigen::Index n = 1; n < w.size(); n += 2) w(n) = -w(n);
  return w;
}

struct Truncated {
  CVector v;  // normalized on the target cutoff
  double tail;
};

Truncated truncate(const CVector& padded, int cutoff) {
  const double full = padded.squaredNorm();
  if (!(full > 0)) throw DomainError("prepare: state vanishes (zero norm)");
  CVector head = padded.head(cutoff);
  const double kept = head.squaredNorm();
  const double tail = std::max(0.0, 1.0 - kept / full);
  if (!(kept > 0)) throw CutoffError("prepare: no weight inside cutoff");
  return {head / std::sqrt(kept), tail};
}

CVector coherent_padded(double alpha, int np) {
  return apply_displacement(annihilation_sparse(np), alpha, vacuum(np));
}

CVector cat_padded(double alpha, Parity p, int np) {
  CVector c = coherent_padded(alpha, np);
  CVector m = parity_flip(c);
  return p == Parity::Even ? CVector(c + m) : CVector(c - m);
}

std::vector<double> gkp_weights(double delta, int kmax) {
  std::vector<double> w;
  for (int k = -kmax; k <= kmax; ++k) w.push_back(std::exp(-2.0 * std::numbers::pi * delta * k * k));
  return w;
}

// D(2k sqrt(pi)) S(r)|0> for k = -kmax..kmax in a shared padded space.
std::vector<CVector> gkp_components(double r, int kmax, int cutoff, const PrepareOptions& opt) {
  const double amax = 2.0 * kmax * std::sqrt(std::numbers::pi);
  const int np = padded_cutoff(cutoff, support_hint(amax, r), opt);
  SparseOp a = annihilation_sparse(np);
  CVector sq = apply_squeeze(a, r, vacuum(np));
  std::vector<CVector> out;
  for (int k = -kmax; k <= kmax; ++k)
    out.push_back(apply_displacement(a, 2.0 * k * std::sqrt(std::numbers::pi), sq));
  return out;
}

CVector gkp_combine(const std::vector<CVector>& comps, double delta, int kmax) {
  auto w = gkp_weights(delta, kmax);
  CVector v = CVector::Zero(comps.front().size());
  for (std::size_t i = 0; i < comps.size(); ++i) v += w[i] * comps[i];
  return v;
}

struct SingleModeBuild {
  State state;
  double tail;
};

SingleModeBuild build_single(int cutoff, const ProbeSpec& p, const PrepareOptions& opt) {
  const FockSpace one(1, cutoff);
  auto pure = [&](const CVector& padded) {
    Truncated t = truncate(padded, cutoff);
    return SingleModeBuild{StateVector(one, std::move(t.v)), t.tail};
  };
  switch (p.family) {
    case Family::Fock: {
      if (p.n0 >= cutoff) throw CutoffError("prepare: Fock level n0 outside cutoff");
      CVector v = CVector::Zero(cutoff);
      v(p.n0) = 1.0;
      return {StateVector(one, std::move(v)), 0.0};
    }
    case Family::Coherent:
      return pure(coherent_padded(p.alpha, padded_cutoff(cutoff, support_hint(p.alpha, 0), opt)));
    case Family::SqueezedVacuum: {
      const int np = padded_cutoff(cutoff, support_hint(0, p.r), opt);
      return pure(apply_squeeze(annihilation_sparse(np), p.r, vacuum(np)));
    }
    case Family::Cat:
      return pure(cat_padded(p.alpha, p.parity, padded_cutoff(cutoff, support_hint(p.alpha, 0), opt)));
    case Family::Gkp:
      return pure(gkp_combine(gkp_components(p.r, p.kmax, cutoff, opt), p.delta, p.kmax));
    case Family::Thermal:
    case Family::SqueezedThermal: {
      // p_n = nbar^n / (nbar+1)^(n+1); columns S|n> for every n with p_n above 1e-18.
      const double nb = p.nbar;
      const double q = nb / (nb + 1.0);
      int nmax = 0;
      if (nb > 0) nmax = static_cast<int>(std::ceil(std::log(1e-18) / std::log(q)));
      const double r = p.family == Family::Thermal ? 0.0 : p.r;
      const int np = padded_cutoff(cutoff, std::max(nmax + 40, support_hint(0, r) + nmax), opt);
      SparseOp a = annihilation_sparse(np);
      CMatrix rho = CMatrix::Zero(np, np);
      for (int n = 0; n <= nmax && n < np; ++n) {
        const double pn = std::pow(q, n) / (nb + 1.0);
        CVector e = CVector::Zero(np);
        e(n) = 1.0;
        CVector s = apply_squeeze(a, r, e);
        rho.noalias() += pn * s * s.adjoint();
      }
      const double full = rho.trace().real();
      CMatrix head = rho.topLeftCorner(cutoff, cutoff);
      const double kept = head.trace().real();
      head /= kept;
      return {DensityMatrix(one, std::move(head)), std::max(0.0, 1.0 - kept / full)};
    }
    default:
      throw DomainError("prepare: family " + family_name(p.family) + " is not single-mode");
  }
}

}  // namespace

std::string family_name(Family f) {
  switch (f) {
    case Family::Fock: return "fock";
    case Family::Coherent: return "coherent";
    case Family::SqueezedVacuum: return "svs";
    case Family::Cat: return "cat";
    case Family::Gkp: return "gkp";
    case Family::Tmsv: return "tmsv";
    case Family::Noon: return "noon";
    case Family::EntangledCat: return "entangled-cat";
    case Family::Thermal: return "thermal";
    case Family::SqueezedThermal: return "squeezed-thermal";
  }
  return "?";
}

Family parse_family(std::string_view name) {
  static const std::map<std::string, Family, std::less<>> names = {
      {"fock", Family::Fock},
      {"coherent", Family::Coherent},
      {"svs", Family::SqueezedVacuum},
      {"squeezed-vacuum", Family::SqueezedVacuum},
      {"cat", Family::Cat},
      {"gkp", Family::Gkp},
      {"tmsv", Family::Tmsv},
      {"noon", Family::Noon},
      {"entangled-cat", Family::EntangledCat},
      {"thermal", Family::Thermal},
      {"squeezed-thermal", Family::SqueezedThermal},
  };
  auto it = names.find(name);
  if (it == names.end()) throw ConfigError("unknown probe family '" + std::string(name) + "'");
  return it->second;
}

void ProbeSpec::validate() const {
  auto bad = [&](const char* what) {
    throw DomainError("probe " + family_name(family) + ": " + what);
  };
  switch (family) {
    case Family::Fock: if (n0 < 0) bad("n0 must be >= 0"); break;
    case Family::Coherent: if (!(alpha >= 0)) bad("alpha must be >= 0"); break;
    case Family::SqueezedVacuum:
    case Family::Tmsv: if (!(r >= 0)) bad("r must be >= 0"); break;
    case Family::Cat:
    case Family::EntangledCat:
      if (!(alpha >= 0)) bad("alpha must be >= 0");
      if (parity == Parity::Odd && alpha == 0) bad("odd cat needs alpha > 0");
      break;
    case Family::Gkp:
      if (!(delta > 0)) bad("delta must be > 0");
      if (!(r >= 0)) bad("r must be >= 0");
      if (kmax < 0) bad("kmax must be >= 0");
      break;
    case Family::Noon: if (N < 1) bad("N must be >= 1"); break;
    case Family::Thermal: if (!(nbar >= 0)) bad("nbar must be >= 0"); break;
    case Family::SqueezedThermal:
      if (!(nbar >= 0)) bad("nbar must be >= 0");
      if (!(r >= 0)) bad("r must be >= 0");
      break;
  }
}

bool ProbeSpec::two_mode_only() const {
  return family == Family::Tmsv || family == Family::Noon || family == Family::EntangledCat;
}

int natural_modes(const ProbeSpec& probe) { return probe.two_mode_only() ? 2 : 1; }

std::string ProbeSpec::to_string() const {
  std::ostringstream os;
  char buf[64];
  auto num = [&](const char* key, double v) {
    std::snprintf(buf, sizeof buf, " %s=%.17g", key, v);
    os << buf;
  };
  os << "family=" << family_name(family);
  switch (family) {
    case Family::Fock: os << " n0=" << n0; break;
    case Family::Coherent: num("alpha", alpha); break;
    case Family::SqueezedVacuum:
    case Family::Tmsv: num("r", r); break;
    case Family::Cat:
    case Family::EntangledCat:
      num("alpha", alpha);
      os << " parity=" << (parity == Parity::Even ? "even" : "odd");
      break;
    case Family::Gkp:
      num("delta", delta);
      num("r", r);
      os << " kmax=" << kmax;
      break;
    case Family::Noon: os << " N=" << N; break;
    case Family::Thermal: num("nbar", nbar); break;
    case Family::SqueezedThermal:
      num("r", r);
      num("nbar", nbar);
      break;
  }
  if (target_energy) num("energy", *target_energy);
  return os.str();
}

ProbeSpec ProbeSpec::parse(std::string_view text) {
  std::istringstream is{std::string(text)};
  std::string tok;
  std::map<std::string, std::string> kv;
  while (is >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("probe: expected key=value, got '" + tok + "'");
    kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  if (!kv.count("family")) throw ConfigError("probe: missing family");
  ProbeSpec p;
  p.family = parse_family(kv["family"]);
  auto get_d = [&](const std::string& v, const std::string& k) {
    std::size_t used = 0;
    double x = 0;
    try {
      x = std::stod(v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != v.size()) throw ConfigError("probe: bad number for " + k + ": '" + v + "'");
    return x;
  };
  auto get_i = [&](const std::string& v, const std::string& k) {
    double x = get_d(v, k);
    if (x != std::floor(x)) throw ConfigError("probe: " + k + " must be an integer");
    return static_cast<int>(x);
  };
  for (const auto& [k, v] : kv) {
    if (k == "family") continue;
    if (k == "n0") p.n0 = get_i(v, k);
    else if (k == "alpha") p.alpha = get_d(v, k);
    else if (k == "r") p.r = get_d(v, k);
    else if (k == "delta") p.delta = get_d(v, k);
    else if (k == "kmax") p.kmax = get_i(v, k);
    else if (k == "N") p.N = get_i(v, k);
    else if (k == "nbar") p.nbar = get_d(v, k);
    else if (k == "energy") p.target_energy = get_d(v, k);
    else if (k == "parity") {
      if (v == "even" || v == "+") p.parity = Parity::Even;
      else if (v == "odd" || v == "-") p.parity = Parity::Odd;
      else throw ConfigError("probe: parity must be even or odd");
    } else {
      throw ConfigError("probe: unknown key '" + k + "'");
    }
  }
  p.validate();
  return p;
}

ProbeSpec ProbeSpec::fock(int n0) { ProbeSpec p; p.family = Family::Fock; p.n0 = n0; return p; }
ProbeSpec ProbeSpec::coherent(double alpha) { ProbeSpec p; p.family = Family::Coherent; p.alpha = alpha; return p; }
ProbeSpec ProbeSpec::squeezed_vacuum(double r) { ProbeSpec p; p.family = Family::SqueezedVacuum; p.r = r; return p; }
ProbeSpec ProbeSpec::cat(double alpha, Parity par) {
  ProbeSpec p; p.family = Family::Cat; p.alpha = alpha; p.parity = par; return p;
}
ProbeSpec ProbeSpec::gkp(double delta, double r, int kmax) {
  ProbeSpec p; p.family = Family::Gkp; p.delta = delta; p.r = r; p.kmax = kmax; return p;
}
ProbeSpec ProbeSpec::tmsv(double r) { ProbeSpec p; p.family = Family::Tmsv; p.r = r; return p; }
ProbeSpec ProbeSpec::noon(int N) { ProbeSpec p; p.family = Family::Noon; p.N = N; return p; }
ProbeSpec ProbeSpec::entangled_cat(double alpha, Parity par) {
  ProbeSpec p; p.family = Family::EntangledCat; p.alpha = alpha; p.parity = par; return p;
}
ProbeSpec ProbeSpec::thermal(double nbar) { ProbeSpec p; p.family = Family::Thermal; p.nbar = nbar; return p; }
ProbeSpec ProbeSpec::squeezed_thermal(double r, double nbar) {
  ProbeSpec p; p.family = Family::SqueezedThermal; p.r = r; p.nbar = nbar; return p;
}

Prepared prepare_checked(const FockSpace& space, const ProbeSpec& probe, const PrepareOptions& opt) {
  probe.validate();
  const int n = space.cutoff();
  Prepared out{StateVector(space, CVector::Zero(space.dim())), 0.0};
  if (space.modes() == 1) {
    if (probe.two_mode_only())
      throw DomainError("prepare: " + family_name(probe.family) + " needs a two-mode space");
    auto b = build_single(n, probe, opt);
    out = Prepared{std::move(b.state), b.tail};
  } else {
    switch (probe.family) {
      case Family::Tmsv: {
        // exp[r(a^dag b^dag - a b)] |0,0> in a padded two-mode space.
        const double t = std::tanh(probe.r);
        int np = n + 10;
        if (t > 0) np = std::max(np, static_cast<int>(std::ceil(30.0 / -std::log(t))) + 10);
        if (opt.pad >= 0) np = n + opt.pad;
        if (static_cast<long>(np) * np > 40'000'000L) throw CutoffError("prepare: tmsv padded workspace too large");
        const FockSpace big(2, np);
        SparseOp a1 = annihilation_sparse(np);
        SparseOp id(np, np);
        id.setIdentity();
        SparseOp a = Eigen::kroneckerProduct(a1, id);
        SparseOp b = Eigen::kroneckerProduct(id, a1);
        SparseOp ab = a * b;
        SparseOp g = probe.r * (SparseOp(ab.adjoint()) - ab);
        CVector v = expm_action(g, vacuum(big.dim()));
        CVector head(space.dim());
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) head(space.index(i, j)) = v(big.index(i, j));
        const double kept = head.squaredNorm();
        out = Prepared{StateVector(space, head / std::sqrt(kept)), std::max(0.0, 1.0 - kept / v.squaredNorm())};
        break;
      }
      case Family::Noon: {
        if (probe.N >= n) throw CutoffError("prepare: NOON photon number outside cutoff");
        CVector v = CVector::Zero(space.dim());
        v(space.index(probe.N, 0)) += 1.0 / std::sqrt(2.0);
        v(space.index(0, probe.N)) += 1.0 / std::sqrt(2.0);
        out = Prepared{StateVector(space, std::move(v)), 0.0};
        break;
      }
      case Family::EntangledCat: {
        const int np = padded_cutoff(n, support_hint(probe.alpha, 0), opt);
        CVector u = coherent_padded(probe.alpha, np);
        CVector w = parity_flip(u);
        const double sgn = probe.parity == Parity::Even ? 1.0 : -1.0;
        // ||u x u + s w x w||^2 on the padded and the kept blocks.
        auto norm2 = [&](const CVector& x, const CVector& y) {
          const double nx = x.squaredNorm(), ny = y.squaredNorm();
          return nx * nx + ny * ny + 2.0 * sgn * std::real(std::pow(x.dot(y), 2));
        };
        const double full = norm2(u, w);
        CVector uh = u.head(n), wh = w.head(n);
        const double kept = norm2(uh, wh);
        if (!(full > 0) || !(kept > 0)) throw DomainError("prepare: entangled cat vanishes");
        StateVector su(FockSpace(1, n), uh), sw(FockSpace(1, n), wh);
        CVector v = kron(su, su).amplitudes + sgn * kron(sw, sw).amplitudes;
        v /= std::sqrt(kept);
        out = Prepared{StateVector(space, std::move(v)), std::max(0.0, 1.0 - kept / full)};
        break;
      }
      default: {
        auto b = build_single(n, probe, opt);
        const double tail = 1.0 - (1.0 - b.tail) * (1.0 - b.tail);
        if (auto* psi = std::get_if<StateVector>(&b.state))
          out = Prepared{kron(*psi, *psi), tail};
        else {
          const auto& r = std::get<DensityMatrix>(b.state);
          out = Prepared{kron(r, r), tail};
        }
      }
    }
  }
  if (out.tail > opt.tail_tol) {
    char buf[200];
    std::snprintf(buf, sizeof buf, "prepare: truncation tail %.3g exceeds %.3g for %s at cutoff %d; raise cutoff",
                  out.tail, opt.tail_tol, probe.to_string().c_str(), n);
    throw CutoffError(buf);
  }
  return out;
}

State prepare(const FockSpace& space, const ProbeSpec& probe, const PrepareOptions& opt) {
  return prepare_checked(space, probe, opt).state;
}

ProbeSpec match_energy(const ProbeSpec& base, double energy, double omega, const MatchOptions& opt) {
  if (!(omega > 0)) throw DomainError("match_energy: omega must be > 0");
  const int modes = base.two_mode_only() ? 2 : opt.modes;
  if (modes != 1 && modes != 2) throw DomainError("match_energy: modes must be 1 or 2");
  ProbeSpec out = base;
  out.target_energy = energy;
  // Per-mode photon number for product states.
  const double nper = modes == 1 ? energy / omega - 0.5 : energy / (2.0 * omega);
  auto unreachable = [&](const std::string& why) {
    throw DomainError("match_energy: target " + std::to_string(energy) + " unreachable for " +
                      family_name(base.family) + ": " + why);
  };
  auto integer_rule = [&](double x, const char* what) {
    const double k = std::round(x);
    if (std::abs(x - k) > 1e-9) unreachable(std::string(what) + " would be non-integer");
    if (k < 0) unreachable("below minimum energy");
    return static_cast<int>(k);
  };
  switch (base.family) {
    case Family::Fock: out.n0 = integer_rule(nper, "n0"); return out;
    case Family::Coherent:
      if (nper < 0) unreachable("below minimum energy");
      out.alpha = std::sqrt(nper);
      return out;
    case Family::SqueezedVacuum:
      if (nper < 0) unreachable("below minimum energy");
      out.r = std::asinh(std::sqrt(nper));
      return out;
    case Family::Thermal:
      if (nper < 0) unreachable("below minimum energy");
      out.nbar = nper;
      return out;
    case Family::Tmsv:
      if (energy < 0) unreachable("below minimum energy");
      out.r = std::asinh(std::sqrt(energy / (2.0 * omega)));
      return out;
    case Family::Noon: {
      out.N = integer_rule(energy / omega, "N");
      if (out.N < 1) unreachable("N must be >= 1");
      return out;
    }
    case Family::SqueezedThermal:
      unreachable("no single matching parameter");
      break;
    default:
      break;
  }

  // Bisection on the prepared state's energy, monotone in the searched parameter.
  // The tail guard is applied once, at the solution.
  const FockSpace space(modes, opt.cutoff);
  PrepareOptions loose = opt.prepare;
  loose.tail_tol = 1.0;
  std::function<double(double)> energy_at;
  double lo = 0, hi = 0;
  std::vector<CVector> gkp_cache;
  if (base.family == Family::Cat || base.family == Family::EntangledCat) {
    energy_at = [&](double a) {
      ProbeSpec p = base;
      p.alpha = a;
      return mean_energy(prepare(space, p, loose), omega);
    };
    lo = 1e-4;
    hi = std::sqrt(std::max(energy / omega, 1.0)) + 3.0;
  } else if (base.family == Family::Gkp) {
    if (modes != 1) unreachable("gkp matching is single-mode");
    gkp_cache = gkp_components(base.r, base.kmax, opt.cutoff, opt.prepare);
    // Energy decreases in delta; search on u = -log(delta) so the map is increasing.
    energy_at = [&](double u) {
      const double d = std::exp(-u);
      Truncated t = truncate(gkp_combine(gkp_cache, d, base.kmax), opt.cutoff);
      return mean_energy(StateVector(space, t.v), omega);
    };
    lo = -std::log(20.0);
    hi = -std::log(1e-3);
  } else {
    unreachable("no matching rule");
  }
  const double elo = energy_at(lo), ehi = energy_at(hi);
  if (energy < elo - 1e-12 || energy > ehi + 1e-12) unreachable("outside the bracketed range");
  double a = lo, b = hi;
  for (int it = 0; it < 200 && b - a > opt.tol * std::max(1.0, std::abs(b)); ++it) {
    const double m = 0.5 * (a + b);
    (energy_at(m) < energy ? a : b) = m;
  }
  const double x = 0.5 * (a + b);
  if (base.family == Family::Gkp) out.delta = std::exp(-x);
  else out.alpha = x;
  prepare_checked(space, out, opt.prepare);
  return out;
}

}  // namespace qthermo
