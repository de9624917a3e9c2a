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

// Classical Fisher information of linearized outcome distributions and the
// quantum Cramér-Rao bound δb ≥ 1/(τ√N(Λ−λ)).

#pragma once

#include "qmetro/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qmetro {

namespace tol {
inline constexpr double rare_outcome = 1e-12;      // ε: P0 below this is excluded
inline constexpr double rare_derivative = 1e-6;    // |dP| above this at P0 < ε is non-regular
inline constexpr double fd_cross_check = 1e-4;     // analytic vs finite-difference dP
inline constexpr double fd_step = 1e-6;            // in units where τ(Λ−λ) ≈ 1
}  // namespace tol

/// P(α) ≅ P0(α) + b·dP(α) around b = 0.
class LinearizedDistribution {
public:
    LinearizedDistribution(std::vector<std::string> labels, std::vector<double> p0,
                           std::vector<double> dp);
    LinearizedDistribution(std::vector<double> p0, std::vector<double> dp);

    std::size_t size() const noexcept { return p0_.size(); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    const std::vector<double>& p0() const noexcept { return p0_; }
    const std::vector<double>& dp() const noexcept { return dp_; }

    /// P0 + b·dP; the first-order prediction at field b.
    std::vector<double> at(double b) const;

    /// Largest relative deviation between analytic and finite-difference dP,
    /// when the producer ran the cross-check.
    std::optional<double> cross_check_residual;

private:
    std::vector<std::string> labels_;
    std::vector<double> p0_;
    std::vector<double> dp_;
};

struct FisherReport {
    double fisher_per_shot = 0.0;
    long long n_shots = 1;
    /// 1/√(N·F); +∞ when the distribution carries no information.
    double delta_b_min = 0.0;
    std::optional<double> quantum_bound;
    bool regular = true;
    std::vector<std::size_t> excluded_outcomes;  // P0 < ε

    bool informative() const noexcept { return fisher_per_shot > 0.0; }
};

struct FisherOptions {
    bool strict = false;  // raise NonRegular instead of flagging
};

/// F = Σ_{P0 ≥ ε} dP²/P0 and δb_min = 1/√(N·F).
FisherReport classical_fisher(const LinearizedDistribution& dist, long long n,
                              FisherOptions options = {});

/// 1/(τ·√n·(Λ−λ)); throws ZeroSpread when Λ = λ.
double quantum_crb(const HermitianOperator& h, double tau, long long n);

/// Same bound from a precomputed spread.
double quantum_crb(double spread, double tau, long long n);

struct LinearizeOptions {
    bool cross_check = true;
};

/// P0 from the POVM at b = 0 and dP_α = iτ⟨[H, E_α]⟩, cross-checked against a
/// central finite difference of the exact outcome probabilities.
LinearizedDistribution linearize_povm(const QuantumState& state, const HermitianOperator& h,
                                      const Povm& povm, double tau, LinearizeOptions options = {});

/// Exact probabilities after evolving under b·H for tau.
std::vector<double> exact_probabilities(const QuantumState& state, const HermitianOperator& h,
                                        const Povm& povm, double tau, double b);

}  // namespace qmetro
