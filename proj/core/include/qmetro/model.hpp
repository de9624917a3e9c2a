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

#pragma once

#include "qmetro/linalg.hpp"

#include <optional>
#include <vector>

namespace qmetro {

namespace tol {
inline constexpr double norm = 1e-10;         // ‖ψ‖ and tr ρ
inline constexpr double positivity = 1e-10;   // min eigenvalue of ρ and E_α
inline constexpr double completeness = 1e-9;  // Σ E_α = I, M†M = E
inline constexpr double clamp = 1e-12;        // probabilities in [−clamp, 0) become 0
}  // namespace tol

/// One pure component P_i |Ψ_i⟩⟨Ψ_i| of a mixed state.
struct PureComponent {
    double weight;
    Vector vector;
};

/// Pure state vector or density matrix on a d-dimensional Hilbert space.
///
/// Mixed states keep the decomposition they were built from; otherwise the
/// eigendecomposition of ρ serves as the canonical one.
class QuantumState {
public:
    static QuantumState pure(const Vector& psi);
    /// Normalizes psi first; throws ZeroVector on a null vector.
    static QuantumState pure_normalized(const Vector& psi);
    static QuantumState mixed(const Matrix& rho);
    static QuantumState mixture(std::vector<PureComponent> components);
    static QuantumState maximally_mixed(Index d);

    bool is_pure() const noexcept { return pure_; }
    Index dim() const noexcept { return pure_ ? psi_.size() : rho_.rows(); }

    /// Only valid for pure states.
    const Vector& vector() const;
    Matrix density() const;
    bool has_stored_decomposition() const noexcept { return !components_.empty(); }
    /// Stored decomposition, {(1, ψ)} for pure states, or the eigen-ensemble.
    std::vector<PureComponent> decomposition() const;
    double purity() const;

    /// Empty placeholder (dim() == 0) so aggregates holding a state can be
    /// default-constructed; not a valid state for any operation.
    QuantumState() = default;

private:
    bool pure_ = true;
    Vector psi_;
    Matrix rho_;
    std::vector<PureComponent> components_;
};

/// Finite set {E_α} of positive operators summing to the identity, with
/// optional measurement operators M_α (E_α = M_α† M_α).
class Povm {
public:
    static Povm from_elements(std::vector<Matrix> elements);
    static Povm from_measurement_operators(std::vector<Matrix> operators);
    /// Rank-one projectors onto the columns of an orthonormal basis.
    static Povm projective(const Matrix& basis);
    /// Eigenprojectors of an observable, one element per distinct eigenvalue
    /// (eigenvalues closer than 1e-9 are merged); ordered by descending value.
    static Povm eigenbasis_of(const HermitianOperator& observable);

    std::size_t size() const noexcept { return elements_.size(); }
    Index dim() const noexcept { return elements_.empty() ? 0 : elements_.front().rows(); }
    const std::vector<Matrix>& elements() const noexcept { return elements_; }
    const Matrix& element(std::size_t k) const { return elements_.at(k); }
    bool has_measurement_operators() const noexcept { return !operators_.empty(); }
    const std::vector<Matrix>& measurement_operators() const noexcept { return operators_; }
    /// Measurement operators, falling back to E_α^{1/2} when none are stored.
    std::vector<Matrix> kraus_operators() const;

private:
    Povm() = default;
    void validate() const;

    std::vector<Matrix> elements_;
    std::vector<Matrix> operators_;
};

class Observable {
public:
    explicit Observable(HermitianOperator op) : op_(std::move(op)) {}
    explicit Observable(const Matrix& m) : op_(m) {}

    const HermitianOperator& op() const noexcept { return op_; }
    const Matrix& matrix() const noexcept { return op_.matrix(); }

private:
    HermitianOperator op_;
};

struct Moments {
    double mean;
    double deviation;
};

/// Evolution under b·H for time tau: ψ → Uψ or ρ → UρU†, U = e^{−ibHτ}.
QuantumState evolve(const QuantumState& state, const HermitianOperator& h, double b, double tau);
QuantumState apply_unitary(const QuantumState& state, const Matrix& u);

/// P(α) = ⟨ψ|E_α|ψ⟩ or tr(ρE_α). Entries in [−1e-12, 0) are clamped to 0;
/// anything more negative raises NegativeProbability.
std::vector<double> outcome_probabilities(const QuantumState& state, const Povm& povm);

/// ⟨O⟩ and ΔO = √(⟨O²⟩ − ⟨O⟩²).
Moments expectation_and_variance(const QuantumState& state, const Observable& obs);

/// tr(ρA) for an arbitrary (not necessarily Hermitian) A.
Complex expectation(const QuantumState& state, const Matrix& a);

QuantumState tensor(const QuantumState& a, const QuantumState& b);
Matrix tensor(const Matrix& a, const Matrix& b);
/// {E_α ⊗ B_β}; with B = {I} this is the ancilla extension E_α ⊗ 1.
Povm tensor(const Povm& a, const Povm& b);
Povm extend_with_identity(const Povm& povm, Index ancilla_dim);

/// {ΠE_αΠ} restricted to range(Π).
struct ProjectedPovm {
    Matrix basis;               // d × r isometry onto range(Π)
    std::vector<Matrix> full;   // ΠE_αΠ in the original d dimensions
    Povm povm;                  // Q†E_αQ, a POVM on the r-dim subspace
};

/// Throws NotProjector unless Π² = Π and Π† = Π to 1e-9.
ProjectedPovm project_povm(const Povm& povm, const Matrix& pi);

}  // namespace qmetro
