// Copyright 2026 The qmetro Authors
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

// Independent reference computations for tests. Nothing here calls the
// library's eigensolver, propagators or enumerators: exponentials come from
// Eigen's Padé-based MatrixFunctions, protocols are enumerated on density
// matrices, and derivatives are central finite differences.

#pragma once

#include "qmetro/protocol.hpp"

#include <map>
#include <string>
#include <vector>

namespace qmetro::testing {

/// e^{−iHt} by scaling and squaring.
Matrix expm_oracle(const Matrix& h, double t);

/// Λ − λ from a fresh ComplexEigenSolver run (no Hermitian structure used).
double spread_oracle(const Matrix& h);

std::vector<double> probabilities_oracle(const Matrix& rho, const std::vector<Matrix>& elements);

/// Outcome probabilities of state → e^{−ibHτ} → POVM.
std::vector<double> measurement_oracle(const Matrix& rho, const Matrix& h, const std::vector<Matrix>& elements,
                                       double tau, double b);

/// Fisher information Σ dP²/P0 (P0 > cutoff) with dP from central differences.
double fisher_oracle(const Matrix& rho, const Matrix& h, const std::vector<Matrix>& elements, double tau,
                     double cutoff = 1e-9);

/// History label → probability at field b, by density-matrix enumeration.
std::map<std::string, double> protocol_oracle(const ProtocolSpec& spec, double b);

/// Fisher information of a protocol from central differences of protocol_oracle.
double protocol_fisher_oracle(const ProtocolSpec& spec, double cutoff = 1e-9);

}  // namespace qmetro::testing
