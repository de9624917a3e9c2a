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

#include "qmetro/ancilla.hpp"

#include "qmetro/error.hpp"
#include "qmetro/optimal.hpp"

#include <cmath>
#include <functional>
#include <numbers>

namespace qmetro {
namespace {

void check_count(int k) {
    if (k < 0) {
        throw Error(ErrorCode::InvalidArgument, "ancilla count must be >= 0");
    }
    if (k > kMaxAncillas) {
        throw Error(ErrorCode::CapExceeded, "ancilla count " + std::to_string(k) +
                                                " exceeds the desk-scale cap of " +
                                                std::to_string(kMaxAncillas));
    }
}

Index dark_dim(int k) { return Index{1} << k; }

// Σ_i I_z^i on dark configuration x: +½ per |↓⟩ (bit 0), −½ per |↑⟩ (bit 1).
double sum_iz(Index x, int k) {
    double s = 0.0;
    for (int i = 0; i < k; ++i) s += ((x >> i) & 1) ? -0.5 : 0.5;
    return s;
}

Index all_up(int k) { return dark_dim(k) - 1; }

Matrix permutation(Index dim, const std::function<Index(Index)>& image) {
    Matrix p = Matrix::Zero(dim, dim);
    for (Index j = 0; j < dim; ++j) p(image(j), j) = 1.0;
    return p;
}

}  // namespace

HermitianOperator ancilla_meas_hamiltonian(int k) {
    check_count(k);
    const Index dk = dark_dim(k);
    std::vector<double> diag(static_cast<std::size_t>(2 * dk));
    for (Index s = 0; s < 2; ++s) {
        for (Index x = 0; x < dk; ++x) {
            diag[static_cast<std::size_t>(s * dk + x)] = static_cast<double>(s) + sum_iz(x, k);
        }
    }
    return HermitianOperator::diagonal(diag);
}

HermitianOperator ancilla_effective_hamiltonian(int k) {
    check_count(k);
    const Index dk = dark_dim(k);
    std::vector<double> diag(static_cast<std::size_t>(2 * dk), 0.0);
    for (Index x = 0; x < dk; ++x) {
        // I + Σ n_i with n_i = I_z + ½
        diag[static_cast<std::size_t>(dk + x)] = 1.0 + sum_iz(x, k) + 0.5 * k;
    }
    return HermitianOperator::diagonal(diag);
}

HermitianOperator ancilla_interaction(int k) {
    check_count(k);
    const Index dk = dark_dim(k);
    Matrix sum_ix = Matrix::Zero(dk, dk);
    for (int i = 0; i < k; ++i) {
        Matrix term = Matrix::Identity(1, 1);
        for (int j = k - 1; j >= 0; --j) {
            term = kron(term, j == i ? Matrix(0.5 * pauli::x()) : Matrix(pauli::identity()));
        }
        sum_ix += term;
    }
    Matrix one = Matrix::Zero(2, 2);
    one(1, 1) = 1.0;
    return HermitianOperator(kron(one, sum_ix));
}

Matrix cnot_layer(int k) {
    check_count(k);
    const Index dk = dark_dim(k);
    return permutation(2 * dk, [dk](Index j) { return j >= dk ? dk + ((j - dk) ^ (dk - 1)) : j; });
}

Matrix sensor_flip(int k) {
    check_count(k);
    const Index dk = dark_dim(k);
    return permutation(2 * dk, [dk](Index j) { return j >= dk ? j - dk : j + dk; });
}

HermitianOperator ancilla_readout(int k) {
    check_count(k);
    Matrix o = Matrix::Zero(2, 2);
    o(0, 1) = Complex(0.0, 1.0);
    o(1, 0) = Complex(0.0, -1.0);
    return HermitianOperator(kron(o, Matrix(Matrix::Identity(dark_dim(k), dark_dim(k)))));
}

QuantumState ancilla_initial_state(int k) {
    check_count(k);
    const Index dk = dark_dim(k);
    Vector psi = Vector::Zero(2 * dk);
    psi(all_up(k)) = 1.0 / std::sqrt(2.0);
    psi(dk + all_up(k)) = 1.0 / std::sqrt(2.0);
    return QuantumState::pure(psi);
}

ProtocolSpec build_ancilla_protocol(int k, double tau, double lambda_coupling) {
    check_count(k);
    if (!(tau > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "tau must be positive");
    }
    if (!(lambda_coupling > 0.0) || !std::isfinite(lambda_coupling)) {
        throw Error(ErrorCode::InvalidArgument, "coupling must be positive and finite");
    }
    const Matrix cnot = cnot_layer(k);
    const Matrix disentangle = cnot * sensor_flip(k);

    ProtocolSpec spec;
    spec.variant = ProtocolVariant::feedback;
    spec.h = ancilla_meas_hamiltonian(k);
    spec.tau = tau;
    spec.round.initial = ancilla_initial_state(k);

    // Entangling gates act instantaneously; H_int dominates all other terms.
    FeedbackStep entangle;
    entangle.duration = 0.0;
    entangle.policy[History{}] = PolicyEntry{{cnot}, {}, std::nullopt};

    FeedbackStep sense;
    sense.duration = tau;
    std::vector<Matrix> kraus;
    const Povm readout = Povm::eigenbasis_of(ancilla_readout(k));
    for (const Matrix& pi : readout.elements()) {
        kraus.push_back(pi * disentangle);
    }
    sense.policy[History{0}] = PolicyEntry{std::move(kraus), {}, std::nullopt};

    spec.round.steps = {std::move(entangle), std::move(sense)};
    validate_spec(spec);
    return spec;
}

double pulse_duration(double lambda_coupling) {
    if (!(lambda_coupling > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "coupling must be positive");
    }
    return std::numbers::pi / lambda_coupling;
}

double cnot_pulse_residual(int k, double lambda_coupling) {
    const Matrix v = propagator(ancilla_interaction(k) * lambda_coupling,
                                pulse_duration(lambda_coupling));
    const Index dk = dark_dim(k);
    // Phase picked up by the |1⟩ branch: ⟨1,↓..↓|V|1,↑..↑⟩.
    const Complex phase = v(dk, dk + all_up(k));
    Matrix expected = cnot_layer(k);
    expected.bottomRows(dk) *= phase;
    return max_abs(v - expected);
}

EffectiveHamiltonianCheck effective_hamiltonian_check(int k) {
    check_count(k);
    const HermitianOperator meas = ancilla_meas_hamiltonian(k);
    const HermitianOperator eff = ancilla_effective_hamiltonian(k);
    const Index dk = dark_dim(k);
    const Index d = 2 * dk;

    auto compress = [](const Matrix& h, const Matrix& q) {
        Matrix c = q.adjoint() * h * q;
        c -= (c.trace() / 2.0) * Matrix::Identity(2, 2);
        return c;
    };
    Matrix prepared(d, 2);
    prepared.col(0) = basis_vector(d, all_up(k));
    prepared.col(1) = basis_vector(d, dk + all_up(k));
    Matrix optimal(d, 2);
    optimal.col(0) = basis_vector(d, 0);
    optimal.col(1) = basis_vector(d, dk);

    const Matrix c = cnot_layer(k);
    const Matrix frame = c.adjoint() * meas.matrix() * c;
    const double conj = max_abs(compress(frame, prepared) - compress(eff.matrix(), optimal));

    const OptimalConfiguration cfg = optimal_configuration(eff);
    const Vector target = (optimal.col(0) + optimal.col(1)) / std::sqrt(2.0);
    const double state_res = (cfg.state.vector() - target).cwiseAbs().maxCoeff();
    const Matrix readout_o = ancilla_readout(k).matrix();
    const Matrix opt_o = optimal.adjoint() * cfg.observable.matrix() * optimal;
    const Matrix ref_o = optimal.adjoint() * readout_o * optimal;
    const double obs_res = std::min(max_abs(opt_o - ref_o), max_abs(opt_o + ref_o));

    return EffectiveHamiltonianCheck{spectral_spread(meas), spectral_spread(eff), conj,
                                     std::max(state_res, obs_res)};
}

}  // namespace qmetro
