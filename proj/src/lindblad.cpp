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

#include "qthermo/lindblad.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <Eigen/SparseLU>
#include <unsupported/Eigen/KroneckerProduct>

namespace qthermo {

Generator::Generator(Operator hamiltonian, std::vector<DissipatorTerm> terms)
    : h_(std::move(hamiltonian)), terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    if (!(t.rate >= 0)) throw DomainError("Generator: dissipator rates must be >= 0");
    if (t.left.space != h_.space || t.right.space != h_.space)
      throw DimensionError("Generator: dissipator operators on a different space");
    dense_.push_back({t.rate, t.left.matrix, t.right.matrix});
  }
  compiled_ = std::make_shared<const kernels::Compiled>(kernels::Compiled::build(h_.matrix, dense_));
}

void Generator::apply(const CMatrix& rho, CMatrix& out, kernels::Workspace& ws, Kernel k) const {
  if (rho.rows() != space().dim() || rho.cols() != space().dim())
    throw DimensionError("Generator::apply: rho has wrong dimension");
  if (k == Kernel::Parallel)
    kernels::rhs_parallel(*compiled_, rho, out, ws);
  else
    kernels::rhs_serial_reference(h_.matrix, dense_, rho, out);
}

CMatrix Generator::apply(const CMatrix& rho, Kernel k) const {
  kernels::Workspace ws;
  CMatrix out;
  apply(rho, out, ws, k);
  return out;
}

Generator single_mode_generator(const FockSpace& space, const BathSpec& bath, Frame frame) {
  if (space.modes() != 1) throw DimensionError("single_mode_generator: needs a one-mode space");
  bath.validate();
  const auto l = ladder(space, 0);
  const double nb = bath.nbar();
  Operator h = frame == Frame::Lab ? build_hamiltonian(space, bath.omega)
                                   : Operator(space, CMatrix::Zero(space.dim(), space.dim()));
  std::vector<DissipatorTerm> terms;
  terms.push_back({bath.gamma * (nb + 1.0), l.annihilation, l.annihilation});
  if (bath.gamma * nb > 0) terms.push_back({bath.gamma * nb, l.creation, l.creation});
  return Generator(std::move(h), std::move(terms));
}

Generator two_mode_generator(const FockSpace& space, const BathSpec& bath, Complex xi, std::optional<double> omega_b) {
  if (space.modes() != 2) throw DimensionError("two_mode_generator: needs a two-mode space");
  bath.validate();
  if (omega_b && std::abs(*omega_b - bath.omega) > 1e-12 * bath.omega)
    throw DomainError("two_mode_generator: only degenerate modes (omega_a == omega_b) are supported");
  const auto la = ladder(space, 0), lb = ladder(space, 1);
  const double nb = bath.nbar();
  Operator sum(space, la.annihilation.matrix + lb.annihilation.matrix);
  Operator sum_dag(space, sum.matrix.adjoint());
  std::vector<DissipatorTerm> terms;
  terms.push_back({bath.gamma * (nb + 1.0), sum, sum});
  if (bath.gamma * nb > 0) terms.push_back({bath.gamma * nb, sum_dag, sum_dag});
  return Generator(build_hamiltonian(space, bath.omega, xi), std::move(terms));
}

double top_level_population(const FockSpace& space, const CMatrix& rho) {
  const int n = space.cutoff();
  auto p = [&](Eigen::Index i) { return rho(i, i).real(); };
  if (space.modes() == 1) return p(n - 1) + p(n - 2);
  double pa = 0, pb = 0;
  for (int k = 0; k < n; ++k)
    for (int top = n - 2; top < n; ++top) {
      pa += p(space.index(top, k));
      pb += p(space.index(k, top));
    }
  return std::max(pa, pb);
}

double top_level_population(const DensityMatrix& rho) { return top_level_population(rho.space, rho.rho); }

void hermitize(CMatrix& m) {
  const Eigen::Index n = m.rows();
  for (Eigen::Index j = 0; j < n; ++j) {
    m(j, j) = m(j, j).real();
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const Complex a = 0.5 * (m(i, j) + std::conj(m(j, i)));
      m(i, j) = a;
      m(j, i) = std::conj(a);
    }
  }
}

std::string Trajectory::to_csv() const {
  std::ostringstream os;
  const bool two = !states.empty() && states.front().space.modes() == 2;
  os << (two ? "time,trace,n_a,n_b,purity,tail\n" : "time,trace,n,purity,tail\n");
  char buf[96];
  for (std::size_t i = 0; i < states.size(); ++i) {
    const State s = states[i];
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g", times[i], states[i].trace(), mean_photon_number(s, 0));
    os << buf;
    if (two) {
      std::snprintf(buf, sizeof buf, ",%.12g", mean_photon_number(s, 1));
      os << buf;
    }
    std::snprintf(buf, sizeof buf, ",%.12g,%.12g\n", states[i].purity(), tail[i]);
    os << buf;
  }
  return os.str();
}

DensityMatrix steady_state(const Generator& gen) {
  const auto& terms = gen.terms();
  bool damped = false;
  for (const auto& t : terms) damped = damped || t.rate > 0;
  if (!damped) throw DomainError("steady_state: needs gamma > 0");
  const Eigen::Index d = gen.space().dim();
  using SpC = Eigen::SparseMatrix<Complex>;
  SpC id(d, d);
  id.setIdentity();
  const Complex I(0.0, 1.0);
  CMatrix k = CMatrix::Zero(d, d);
  for (const auto& t : terms) k += t.rate * t.right.matrix.adjoint() * t.left.matrix;
  SpC ml = (CMatrix(-I * gen.hamiltonian().matrix - 0.5 * k)).sparseView();
  SpC mr = (CMatrix(I * gen.hamiltonian().matrix - 0.5 * k)).sparseView();
  // Column-major vec: vec(A X B) = (B^T kron A) vec(X).
  SpC l = Eigen::kroneckerProduct(id, ml);
  l += SpC(Eigen::kroneckerProduct(SpC(mr.transpose()), id));
  for (const auto& t : terms) {
    SpC a = t.left.matrix.sparseView();
    SpC bc = CMatrix(t.right.matrix.conjugate()).sparseView();
    l += t.rate * SpC(Eigen::kroneckerProduct(bc, a));
  }
  // Replace one diagonal equation with the trace constraint. A unique steady
  // state does not care which one; a degenerate null space usually does.
  auto solve = [&](Eigen::Index row) {
    std::vector<Eigen::Triplet<Complex>> trips;
    for (int c = 0; c < l.outerSize(); ++c)
      for (SpC::InnerIterator it(l, c); it; ++it)
        if (it.row() != row) trips.emplace_back(it.row(), it.col(), it.value());
    for (Eigen::Index i = 0; i < d; ++i) trips.emplace_back(row, i + i * d, 1.0);
    SpC sys(d * d, d * d);
    sys.setFromTriplets(trips.begin(), trips.end());
    sys.makeCompressed();
    Eigen::SparseLU<SpC> lu;
    lu.compute(sys);
    if (lu.info() != Eigen::Success)
      throw ConvergenceError("steady_state: degenerate null space (singular Liouvillian system)");
    CVector rhs = CVector::Zero(d * d);
    rhs(row) = 1.0;
    CVector x = lu.solve(rhs);
    const double res = (l * x).norm();
    if (lu.info() != Eigen::Success || !x.allFinite() || res > 1e-8 * std::max(1.0, x.norm()))
      throw ConvergenceError("steady_state: degenerate null space (residual too large)");
    return x;
  };
  const CVector x = solve(0);
  if (d > 1 && (solve((d - 1) * (d + 1)) - x).norm() > 1e-8 * std::max(1.0, x.norm()))
    throw ConvergenceError("steady_state: degenerate null space (solution depends on the constraint row)");
  CMatrix rho = Eigen::Map<const CMatrix>(x.data(), d, d);
  hermitize(rho);
  rho /= rho.trace().real();
  return DensityMatrix(gen.space(), std::move(rho));
}

namespace {

CMatrix psd_sqrt(const CMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (a + a.adjoint()));
  RVector s = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * s.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

double fidelity(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.space != b.space) throw DimensionError("fidelity: space mismatch");
  const CMatrix sa = psd_sqrt(a.rho);
  const CMatrix m = sa * b.rho * sa;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  const double tr = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return tr * tr;
}

}  // namespace qthermo
