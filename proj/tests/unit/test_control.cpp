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

#include "qmetro/control.hpp"
#include "qmetro/error.hpp"

#include "corpus.hpp"
#include "oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

namespace qmetro {
namespace {

using testing::Rng;

// (1/τ) ∫ U₀†HU₀ dt by stepping the control propagator on a uniform grid of
// `steps` midpoints per segment.
Matrix average_oracle(const Matrix& h, const ControlSchedule& s, double tau, int steps) {
    const Index d = h.rows();
    Matrix u = Matrix::Identity(d, d);
    Matrix acc = Matrix::Zero(d, d);
    for (const auto& seg : s) {
        const double dt = seg.duration / steps;
        const Matrix half = testing::expm_oracle(seg.h0.matrix(), dt / 2.0);
        for (int k = 0; k < steps; ++k) {
            const Matrix mid = half * u;
            acc += dt * mid.adjoint() * h * mid;
            u = half * mid;
        }
    }
    return acc / tau;
}

ControlSchedule spin_echo(double tau, double pulse) {
    const double free = (tau - pulse) / 2.0;
    const double omega = std::numbers::pi / pulse;  // π rotation about x
    const Matrix zero = Matrix::Zero(2, 2);
    return {{HermitianOperator(zero), free},
            {HermitianOperator(0.5 * omega * pauli::x()), pulse},
            {HermitianOperator(zero), free}};
}

TEST(AverageHamiltonian, NoControlGivesH) {
    Rng rng(31);
    const HermitianOperator h = testing::random_hermitian(rng, 4);
    const ControlSchedule zero{{HermitianOperator(Matrix::Zero(4, 4)), 2.0}};
    EXPECT_LT(max_abs(average_hamiltonian(h, zero, 2.0).matrix() - h.matrix()), 1e-13);
    EXPECT_LT(max_abs(average_hamiltonian(h, {}, 2.0).matrix() - h.matrix()), 1e-15);
}

TEST(AverageHamiltonian, CommutingControlIsInvisible) {
    const HermitianOperator h(0.5 * pauli::z());
    const ControlSchedule s{{HermitianOperator(3.7 * pauli::z()), 1.5}};
    EXPECT_LT(max_abs(average_hamiltonian(h, s, 1.5).matrix() - h.matrix()), 1e-14);
}

TEST(AverageHamiltonian, SpinEchoRefocuses) {
    const HermitianOperator h(0.5 * pauli::z());
    const double tau = 1.0;
    const ControlSchedule echo = spin_echo(tau, 0.01);
    const HermitianOperator coarse = average_hamiltonian(h, echo, tau);
    const HermitianOperator fine = average_hamiltonian(h, echo, tau, 4096);
    const Matrix oracle = average_oracle(h.matrix(), echo, tau, 10000);
    EXPECT_LT(max_abs(fine.matrix() - oracle), 1e-7);
    EXPECT_LT(max_abs(coarse.matrix() - oracle), 1e-4);
    EXPECT_LT(spectral_spread(coarse), 0.05);
    // Shorter pulses refocus better.
    const double wide = spectral_spread(average_hamiltonian(h, spin_echo(tau, 0.2), tau));
    const double narrow = spectral_spread(average_hamiltonian(h, spin_echo(tau, 0.002), tau));
    EXPECT_LT(narrow, wide);
    EXPECT_LT(narrow, 0.005);
}

TEST(AverageHamiltonian, ContractsTheSpectrum) {
    Rng rng(32);
    for (int trial = 0; trial < 500; ++trial) {
        const Index d = testing::uniform_int(rng, 2, 8);
        const double tau = testing::uniform(rng, 0.1, 3.0);
        const HermitianOperator h = testing::random_hermitian(rng, d);
        const ControlSchedule s = testing::random_schedule(rng, d, tau, testing::uniform_int(rng, 1, 4));
        const HermitianOperator avg = average_hamiltonian(h, s, tau);
        ASSERT_LE(spectral_spread(avg), spectral_spread(h) + 1e-8);
        const EigenSystem eig = eig_hermitian(h);
        const double norm = std::max(std::abs(eig.min()), std::abs(eig.max()));
        const Vector psi = testing::random_vector(rng, d);
        ASSERT_LE(std::abs(psi.dot(avg.matrix() * psi)), norm + 1e-10);
    }
}

TEST(AverageHamiltonian, MatchesFineOracle) {
    Rng rng(33);
    for (int trial = 0; trial < 20; ++trial) {
        const Index d = testing::uniform_int(rng, 2, 4);
        const HermitianOperator h = testing::random_hermitian(rng, d);
        const ControlSchedule s = testing::random_schedule(rng, d, 1.0, 2);
        const Matrix lib = average_hamiltonian(h, s, 1.0, 2000).matrix();
        ASSERT_LT(max_abs(lib - average_oracle(h.matrix(), s, 1.0, 2000)), 1e-9);
    }
}

TEST(AverageHamiltonian, ScheduleMismatch) {
    const HermitianOperator h(pauli::z());
    const ControlSchedule s{{HermitianOperator(pauli::x()), 0.5}};
    try {
        average_hamiltonian(h, s, 1.0);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ScheduleMismatch);
    }
    EXPECT_THROW(average_hamiltonian(h, s, 0.5, 0), Error);
}

TEST(ControlPropagator, ComposesSegmentsInTimeOrder) {
    Rng rng(34);
    const ControlSchedule s = testing::random_schedule(rng, 3, 2.0, 3);
    Matrix expected = Matrix::Identity(3, 3);
    for (const auto& seg : s) expected = testing::expm_oracle(seg.h0.matrix(), seg.duration) * expected;
    EXPECT_LT(max_abs(control_propagator(s, 3) - expected), 1e-10);
    EXPECT_NEAR(total_duration(s), 2.0, 1e-12);
}

}  // namespace
}  // namespace qmetro
