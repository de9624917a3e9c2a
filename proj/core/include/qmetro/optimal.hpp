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

// Optimal probe state and observable, and the observable-based sensitivity
// δb = ΔO / (τ√N |⟨[H,O]⟩|).

#pragma once

#include "qmetro/model.hpp"

#include <numbers>

namespace qmetro {

struct OptimalConfiguration {
    QuantumState state;    // (|Λ⟩ + |λ⟩)/√2
    Observable observable; // i|Λ⟩⟨λ| − i|λ⟩⟨Λ|
    Vector top;            // |Λ⟩
    Vector bottom;         // |λ⟩
    double lambda_max;
    double lambda_min;
};

/// Throws ZeroSpread when Λ = λ. Degenerate extremal eigenspaces resolve to
/// a deterministic eigenvector: the normalized projection of the basis vector
/// e_j with the largest projected norm (lowest j on ties), phased so its
/// largest-magnitude entry is real and positive.
OptimalConfiguration optimal_configuration(const HermitianOperator& h);

/// |⟨[H,O]⟩| / ΔO; equals Λ − λ for the optimal configuration.
double saturation_ratio(const QuantumState& state, const HermitianOperator& h,
                        const Observable& obs);

/// ΔO / (τ√n |⟨[H,O]⟩|); throws InsensitiveObservable when the commutator
/// expectation is below 1e-12.
double sensitivity_from_observable(const QuantumState& state, const HermitianOperator& h,
                                   const Observable& obs, double tau, long long n);

struct ScanOptions {
    int grid = 721;  // points per angle over [0, π]
    double phi = std::numbers::pi;
    double tau = 1.0;
    long long n = 1;
};

struct ScanResult {
    double alpha;
    double theta;
    double delta_b;
};

/// Grid search over O = cos α σ_z + sin α σ_x and
/// |Ψ⟩ = cos(θ/2)|Λ⟩ + e^{iφ/2} sin(θ/2)|λ⟩, in the eigenbasis of a 2×2 H.
/// Returns the smallest δb; ties go to the smallest (α, θ).
ScanResult two_level_optimum_scan(const HermitianOperator& h, ScanOptions options = {});

}  // namespace qmetro
