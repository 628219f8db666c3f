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

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace qthermo {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using SparseOp = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;

// All library failures derive from Error so callers can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parameter outside an operation's domain (negative squeezing, r >= omega, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Operand shapes or spaces do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Truncated Fock space too small for the requested state or trajectory.
class CutoffError : public Error {
 public:
  using Error::Error;
};

// Gibbs state undefined: the normal-mode spectrum is not bounded below.
class InstabilityError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Step-size underflow, failed root bracket, singular steady-state system.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// Malformed configuration or command line.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace qthermo
