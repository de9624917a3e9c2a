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

// Reduction of a pure-state problem to the two-dimensional subspace spanned
// by |Ψ⟩ and H|Ψ⟩, where all first-order information lives.

#pragma once

#include "qmetro/model.hpp"

namespace qmetro {

struct ReducedProblem {
    Matrix basis;  // d × 2 isometry; column 0 is |Ψ⟩
    QuantumState state;
    HermitianOperator h;
    Povm povm;
};

/// Throws EigenstateInput when ‖(I − |Ψ⟩⟨Ψ|)H|Ψ⟩‖ < 1e-10 (no information,
/// no 2D reduction) and InvalidArgument for mixed input.
ReducedProblem reduce_to_subspace(const QuantumState& state, const HermitianOperator& h,
                                  const Povm& povm);

}  // namespace qmetro
