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

#include "qmetro/subspace.hpp"

#include "qmetro/error.hpp"

namespace qmetro {

ReducedProblem reduce_to_subspace(const QuantumState& state, const HermitianOperator& h,
                                  const Povm& povm) {
    if (!state.is_pure()) {
        throw Error(ErrorCode::InvalidArgument, "subspace reduction needs a pure state");
    }
    if (state.dim() != h.dim() || povm.dim() != h.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "state, Hamiltonian and POVM dimensions differ");
    }
    const Vector& psi = state.vector();
    Vector omega = h.matrix() * psi;
    for (int pass = 0; pass < 2; ++pass) {
        omega -= psi.dot(omega) * psi;
    }
    const double residual = omega.norm();
    if (residual < 1e-10) {
        throw Error(ErrorCode::EigenstateInput,
                    "input is an eigenstate of H; it carries no information about b");
    }
    Matrix q(psi.size(), 2);
    q.col(0) = psi;
    q.col(1) = omega / residual;

    std::vector<Matrix> reduced;
    reduced.reserve(povm.size());
    for (const Matrix& e : povm.elements()) {
        reduced.push_back(q.adjoint() * e * q);
    }
    const Matrix hr = q.adjoint() * h.matrix() * q;
    return ReducedProblem{
        q,
        QuantumState::pure_normalized(q.adjoint() * psi),
        HermitianOperator(0.5 * (hr + hr.adjoint())),
        Povm::from_elements(std::move(reduced)),
    };
}

}  // namespace qmetro
