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

#include "qthermo/kernels.hpp"

namespace qthermo::kernels {

Csr Csr::from_dense(const CMatrix& m) {
  Csr c;
  c.n = m.rows();
  c.ptr.reserve(c.n + 1);
  c.ptr.push_back(0);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (m(i, j) != 0.0) {
        c.col.push_back(j);
        c.val.push_back(m(i, j));
      }
    }
    c.ptr.push_back(static_cast<Eigen::Index>(c.val.size()));
  }
  return c;
}

Compiled Compiled::build(const CMatrix& h, const std::vector<DenseTerm>& terms) {
  const Complex I(0.0, 1.0);
  CMatrix k = CMatrix::Zero(h.rows(), h.cols());
  for (const auto& t : terms) k += t.rate * t.right.adjoint() * t.left;
  Compiled c;
  c.dim = h.rows();
  c.left = Csr::from_dense(-I * h - 0.5 * k);
  c.right_t = Csr::from_dense((I * h - 0.5 * k).transpose());
  for (const auto& t : terms) c.terms.push_back({t.rate, Csr::from_dense(t.left), Csr::from_dense(t.right.conjugate())});
  return c;
}

namespace {

// Plain complex product; std::complex operator* carries an Annex G inf/nan slow path.
inline Complex mul(Complex a, Complex b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

// y[i] = (S x)[i] for i <= last
inline void spmv_col(const Csr& s, const Complex* x, Complex* y, Eigen::Index last) {
  for (Eigen::Index i = 0; i <= last; ++i) {
    Complex acc = 0.0;
    for (Eigen::Index p = s.ptr[i]; p < s.ptr[i + 1]; ++p) acc += mul(s.val[p], x[s.col[p]]);
    y[i] = acc;
  }
}

// y[i] += scale * sum_m s(j, m) x(i, m) for i <= last
inline void axpy_row(const Csr& s, Eigen::Index j, const CMatrix& x, Complex scale, Complex* y, Eigen::Index last) {
  const Eigen::Index n = x.rows();
  for (Eigen::Index p = s.ptr[j]; p < s.ptr[j + 1]; ++p) {
    const Complex w = mul(scale, s.val[p]);
    const Complex* xc = x.data() + s.col[p] * n;
    for (Eigen::Index i = 0; i <= last; ++i) y[i] += mul(w, xc[i]);
  }
}

}  // namespace

// rho is taken to be Hermitian: only the upper triangle is computed, then mirrored.
void rhs_parallel(const Compiled& c, const CMatrix& rho, CMatrix& out, Workspace& ws) {
  const Eigen::Index n = c.dim;
  out.resize(n, n);
  ws.x.resize(c.terms.size());
  for (auto& x : ws.x) x.resize(n, n);
  const long cols = static_cast<long>(n);

#pragma omp parallel
  {
    for (std::size_t k = 0; k < c.terms.size(); ++k) {
#pragma omp for schedule(static)
      for (long j = 0; j < cols; ++j) spmv_col(c.terms[k].a, rho.data() + j * n, ws.x[k].data() + j * n, n - 1);
    }
#pragma omp for schedule(dynamic, 8)
    for (long j = 0; j < cols; ++j) {
      Complex* y = out.data() + j * n;
      spmv_col(c.left, rho.data() + j * n, y, j);
      axpy_row(c.right_t, j, rho, 1.0, y, j);
      for (std::size_t k = 0; k < c.terms.size(); ++k) axpy_row(c.terms[k].b_conj, j, ws.x[k], c.terms[k].rate, y, j);
      y[j] = y[j].real();
    }
#pragma omp for schedule(dynamic, 8)
    for (long j = 0; j < cols; ++j)
      for (Eigen::Index i = j + 1; i < n; ++i) out(i, j) = std::conj(out(j, i));
  }
}

void rhs_serial_reference(const CMatrix& h, const std::vector<DenseTerm>& terms, const CMatrix& rho, CMatrix& out) {
  const Complex I(0.0, 1.0);
  out = -I * (h * rho - rho * h);
  for (const auto& t : terms) {
    const CMatrix bda = t.right.adjoint() * t.left;
    out += t.rate * (t.left * rho * t.right.adjoint() - 0.5 * (bda * rho + rho * bda));
  }
}

}  // namespace qthermo::kernels
