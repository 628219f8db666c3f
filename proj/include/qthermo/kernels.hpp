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

#include <vector>

#include "qthermo/types.hpp"

// Right-hand-side kernels for rho' = L(rho). The parallel kernel works on CSR
// operators column by column and assumes a Hermitian rho; the serial reference evaluates the dissipator
// definition with dense products and exists for testing and benchmarking.
namespace qthermo::kernels {

struct Csr {
  Eigen::Index n = 0;
  std::vector<Eigen::Index> ptr;
  std::vector<Eigen::Index> col;
  std::vector<Complex> val;

  static Csr from_dense(const CMatrix& m);
  Eigen::Index nnz() const { return static_cast<Eigen::Index>(val.size()); }
};

// rate * (A rho B^dag - 1/2 {B^dag A, rho})
struct DenseTerm {
  double rate;
  CMatrix left;
  CMatrix right;
};

// L(rho) = Ml rho + rho Mr + sum_k rate_k A_k rho B_k^dag with
// Ml = -iH - K/2, Mr = iH - K/2, K = sum_k rate_k B_k^dag A_k.
struct Compiled {
  Csr left;        // Ml
  Csr right_t;     // Mr^T
  struct Term {
    double rate;
    Csr a;         // A_k
    Csr b_conj;    // conj(B_k)
  };
  std::vector<Term> terms;
  Eigen::Index dim = 0;

  static Compiled build(const CMatrix& h, const std::vector<DenseTerm>& terms);
};

// Scratch space reused across calls; one per concurrent caller.
struct Workspace {
  std::vector<CMatrix> x;
};

void rhs_parallel(const Compiled& c, const CMatrix& rho, CMatrix& out, Workspace& ws);
void rhs_serial_reference(const CMatrix& h, const std::vector<DenseTerm>& terms, const CMatrix& rho,
                          CMatrix& out);

}  // namespace qthermo::kernels
