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

#include "qthermo/fockspace.hpp"

#include <cmath>
#include <string>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace qthermo {

FockSpace::FockSpace(int modes, int cutoff) : modes_(modes), cutoff_(cutoff) {
  if (modes != 1 && modes != 2) throw DomainError("FockSpace: modes must be 1 or 2");
  if (cutoff < 2) throw DomainError("FockSpace: cutoff must be >= 2");
  dim_ = modes == 1 ? cutoff : static_cast<Eigen::Index>(cutoff) * cutoff;
}

Eigen::Index FockSpace::index(int na, int nb) const {
  if (na < 0 || na >= cutoff_ || nb < 0 || nb >= cutoff_ || (modes_ == 1 && nb != 0))
    throw DimensionError("FockSpace::index out of range");
  return modes_ == 1 ? na : static_cast<Eigen::Index>(na) * cutoff_ + nb;
}

Operator::Operator(FockSpace s, CMatrix m) : space(s), matrix(std::move(m)) {
  if (matrix.rows() != space.dim() || matrix.cols() != space.dim())
    throw DimensionError("Operator: matrix dimension does not match space");
}

StateVector::StateVector(FockSpace s, CVector v) : space(s), amplitudes(std::move(v)) {
  if (amplitudes.size() != space.dim())
    throw DimensionError("StateVector: vector dimension does not match space");
}

DensityMatrix::DensityMatrix(FockSpace s, CMatrix m) : space(s), rho(std::move(m)) {
  if (rho.rows() != space.dim() || rho.cols() != space.dim())
    throw DimensionError("DensityMatrix: matrix dimension does not match space");
}

DensityMatrix DensityMatrix::from_pure(const StateVector& psi) {
  return DensityMatrix(psi.space, psi.amplitudes * psi.amplitudes.adjoint());
}

double DensityMatrix::purity() const {
  // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
  return rho.cwiseAbs2().sum();
}

double DensityMatrix::hermiticity_defect() const {
  return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
  CMatrix h = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

const FockSpace& space_of(const State& s) {
  return std::visit([](const auto& x) -> const FockSpace& { return x.space; }, s);
}

DensityMatrix to_density(const State& s) {
  if (const auto* psi = std::get_if<StateVector>(&s)) return DensityMatrix::from_pure(*psi);
  return std::get<DensityMatrix>(s);
}

namespace {

CMatrix single_annihilation(int n) {
  CMatrix a = CMatrix::Zero(n, n);
  for (int k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  return a;
}

void check_mode(const FockSpace& space, int mode) {
  if (mode < 0 || mode >= space.modes())
    throw DimensionError("mode index " + std::to_string(mode) + " out of range");
}

}  // namespace

Ladder ladder(const FockSpace& space, int mode) {
  check_mode(space, mode);
  const int n = space.cutoff();
  CMatrix a1 = single_annihilation(n);
  CMatrix a;
  if (space.modes() == 1) {
    a = a1;
  } else {
    CMatrix id = CMatrix::Identity(n, n);
    a = mode == 0 ? CMatrix(Eigen::kroneckerProduct(a1, id)) : CMatrix(Eigen::kroneckerProduct(id, a1));
  }
  CMatrix ad = a.adjoint();
  return Ladder{Operator(space, std::move(a)), Operator(space, std::move(ad))};
}

Operator number_operator(const FockSpace& space, int mode) {
  check_mode(space, mode);
  CMatrix m = CMatrix::Zero(space.dim(), space.dim());
  const int n = space.cutoff();
  if (space.modes() == 1) {
    for (int k = 0; k < n; ++k) m(k, k) = k;
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(space.index(i, j), space.index(i, j)) = mode == 0 ? i : j;
  }
  return Operator(space, std::move(m));
}

Operator total_number_operator(const FockSpace& space) {
  CMatrix m = number_operator(space, 0).matrix;
  if (space.modes() == 2) m += number_operator(space, 1).matrix;
  return Operator(space, std::move(m));
}

Operator identity(const FockSpace& space) {
  return Operator(space, CMatrix::Identity(space.dim(), space.dim()));
}

Operator build_hamiltonian(const FockSpace& space, double omega, Complex xi) {
  CMatrix h = omega * total_number_operator(space).matrix;
  if (space.modes() == 2 && xi != 0.0) {
    const CMatrix a = ladder(space, 0).annihilation.matrix;
    const CMatrix b = ladder(space, 1).annihilation.matrix;
    CMatrix ab = a * b;
    h += std::conj(xi) * ab + xi * ab.adjoint();
  }
  return Operator(space, std::move(h));
}

Complex pump_coupling(double g, double alpha_p, double phi) {
  return g * std::abs(alpha_p) * std::polar(1.0, phi);
}

Complex expectation(const StateVector& psi, const Operator& op) {
  if (psi.space != op.space) throw DimensionError("expectation: space mismatch");
  return psi.amplitudes.dot(op.matrix * psi.amplitudes);
}

Complex expectation(const DensityMatrix& rho, const Operator& op) {
  if (rho.space != op.space) throw DimensionError("expectation: space mismatch");
  // Tr(rho O) without forming the product.
  return (rho.rho.transpose().cwiseProduct(op.matrix)).sum();
}

Complex expectation(const State& s, const Operator& op) {
  return std::visit([&](const auto& x) { return expectation(x, op); }, s);
}

DensityMatrix partial_trace(const DensityMatrix& rho, int traced_mode) {
  if (rho.space.modes() != 2) throw DimensionError("partial_trace: needs a two-mode state");
  check_mode(rho.space, traced_mode);
  const int n = rho.space.cutoff();
  CMatrix red = CMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Complex s = 0.0;
      for (int k = 0; k < n; ++k)
        s += traced_mode == 1 ? rho.rho(rho.space.index(i, k), rho.space.index(j, k))
                              : rho.rho(rho.space.index(k, i), rho.space.index(k, j));
      red(i, j) = s;
    }
  return DensityMatrix(FockSpace(1, n), std::move(red));
}

Operator matrix_exponential(const Operator& a) {
  return Operator(a.space, a.matrix.exp());
}

CVector expm_action(const SparseOp& g, const CVector& v) {
  if (g.rows() != g.cols() || g.cols() != v.size()) throw DimensionError("expm_action: shape");
  RVector colsum = RVector::Zero(g.cols());
  for (Eigen::Index k = 0; k < g.outerSize(); ++k)
    for (SparseOp::InnerIterator it(g, k); it; ++it) colsum(it.col()) += std::abs(it.value());
  const double norm1 = colsum.size() ? colsum.maxCoeff() : 0.0;
  const int steps = std::max(1, static_cast<int>(std::ceil(norm1)));
  const double h = 1.0 / steps;
  CVector w = v;
  for (int s = 0; s < steps; ++s) {
    CVector term = w;
    CVector acc = w;
    int small = 0;
    for (int k = 1; k < 100 && small < 2; ++k) {
      term = (g * term) * (h / k);
      acc += term;
      small = term.lpNorm<Eigen::Infinity>() <= 1e-17 * acc.lpNorm<Eigen::Infinity>() ? small + 1 : 0;
    }
    w = std::move(acc);
  }
  return w;
}

StateVector kron(const StateVector& a, const StateVector& b) {
  if (a.space.modes() != 1 || b.space != a.space) throw DimensionError("kron: needs equal one-mode spaces");
  CVector v(a.space.dim() * b.space.dim());
  for (Eigen::Index i = 0; i < a.amplitudes.size(); ++i)
    v.segment(i * b.amplitudes.size(), b.amplitudes.size()) = a.amplitudes(i) * b.amplitudes;
  return StateVector(FockSpace(2, a.space.cutoff()), std::move(v));
}

DensityMatrix kron(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.space.modes() != 1 || b.space != a.space) throw DimensionError("kron: needs equal one-mode spaces");
  return DensityMatrix(FockSpace(2, a.space.cutoff()), Eigen::kroneckerProduct(a.rho, b.rho));
}

double mean_photon_number(const State& s, int mode) {
  return expectation(s, number_operator(space_of(s), mode)).real();
}

double mean_total_photon_number(const State& s) {
  return expectation(s, total_number_operator(space_of(s))).real();
}

double mean_energy(const State& s, double omega) {
  const double n = mean_total_photon_number(s);
  return space_of(s).modes() == 1 ? omega * (n + 0.5) : omega * n;
}

}  // namespace qthermo
