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

// Linearized maximum-likelihood estimation and its single-observable
// equivalent.

#pragma once

#include "qmetro/fisher.hpp"

#include <vector>

namespace qmetro {

/// Õ = (1/F) Σ_α (dP_α/P0_α) E_α over the outcomes with P0 ≥ ε.
///
/// Reading out the POVM and reporting value w_α for outcome α measures Õ.
/// Its mean over any frequency table equals mle_estimate on that table, and
/// its per-shot variance at b = 0 is 1/F.
struct DerivedOperator {
    Observable observable;
    std::vector<double> weights;          // w_α; 0 for excluded outcomes
    std::vector<std::size_t> excluded;    // P0 < ε
    double fisher_per_shot;
};

/// Readout values w_α = dP_α/(P0_α F) (0 where P0 < ε or F = 0).
std::vector<double> derived_weights(const LinearizedDistribution& dist);

/// Throws AllOutcomesRare when every P0 is below ε. A distribution with no
/// information yields the zero operator with zero weights.
DerivedOperator derived_operator(const Povm& povm, const LinearizedDistribution& dist);

/// Fisher information of a weighted readout: (Σ w dP)² / Var_P0(w).
double observable_fisher(const std::vector<double>& weights, const LinearizedDistribution& dist);

/// Observable-mean estimate (⟨w⟩_F − ⟨w⟩_P0) / Σ dP_α w_α: the sample mean of
/// the readout values, inverted through the linear response. Throws
/// InsensitiveObservable when the response vanishes.
double observable_estimate(const std::vector<double>& weights,
                           const std::vector<double>& frequencies,
                           const LinearizedDistribution& dist);

/// b̂ = Σ dP_α Δ_α / P0_α ÷ Σ dP_α² / P0_α with Δ_α = F_α − P0_α.
/// Throws ZeroInformation when the Fisher information is zero and
/// InvalidArgument when the frequencies do not sum to one.
double mle_estimate(const std::vector<double>& frequencies, const LinearizedDistribution& dist);

/// 1/√(k·F) for k trials; throws ZeroInformation when F = 0.
double finite_trial_bound(const LinearizedDistribution& dist, long long k);

}  // namespace qmetro
