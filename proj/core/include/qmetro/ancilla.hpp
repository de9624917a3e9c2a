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

// Sensor spin plus K dark spins: the CNOT/echo circuit that turns the
// collective Hamiltonian |1⟩⟨1| + Σ I_z into Heisenberg-limited sensing.
//
// Conventions: the sensor is the most significant tensor factor; dark-spin
// index 0 is |↓⟩ and index 1 is |↑⟩; I_z = σ_z/2 in that index order, so
// I_z|↓⟩ = +½. Dark spins start in |↑...↑⟩.

#pragma once

#include "qmetro/protocol.hpp"

namespace qmetro {

inline constexpr int kMaxAncillas = 10;

/// H_meas = |1⟩⟨1| ⊗ I + Σ_i I_z^i; spread 1 + K.
HermitianOperator ancilla_meas_hamiltonian(int k);

/// H̃ = |1⟩⟨1| ⊗ (I + Σ_i n_i) with n_i = I_z^i + ½; spread 1 + K.
HermitianOperator ancilla_effective_hamiltonian(int k);

/// H_int / λ = |1⟩⟨1| ⊗ Σ_i I_x^i.
HermitianOperator ancilla_interaction(int k);

/// CNOT from the sensor onto every dark spin.
Matrix cnot_layer(int k);

/// π pulse on the sensor (|0⟩ ↔ |1⟩).
Matrix sensor_flip(int k);

/// The sensor readout O = i(|0⟩⟨1| − |1⟩⟨0|) ⊗ I.
HermitianOperator ancilla_readout(int k);

/// (|0⟩ + |1⟩)/√2 ⊗ |↑...↑⟩.
QuantumState ancilla_initial_state(int k);

/// Entangle (CNOT layer), sense under H_meas for tau, flip the sensor,
/// disentangle, and read out O. Throws CapExceeded for k > 10.
ProtocolSpec build_ancilla_protocol(int k, double tau, double lambda_coupling);

/// Time for e^{−iλ|1⟩⟨1|ΣI_x t} to act as the CNOT layer (up to a sensor
/// phase) with spin-½ operators: π/λ.
double pulse_duration(double lambda_coupling);

/// max |e^{−iH_int t_pulse} − (phase ⊕ 1)·CNOT|, the phase fitted from one
/// entry.
double cnot_pulse_residual(int k, double lambda_coupling);

struct EffectiveHamiltonianCheck {
    double original_spread;
    double effective_spread;
    /// CNOT-frame H_meas on span{|0↑..↑⟩, |1↑..↑⟩} against H̃ on
    /// span{|0↓..↓⟩, |1↓..↓⟩}, each with its trace removed.
    double conjugation_residual;
    /// optimal_configuration(H̃) against (|0⟩+|1⟩)/√2 ⊗ |↓..↓⟩ and ±O.
    double configuration_residual;
};

EffectiveHamiltonianCheck effective_hamiltonian_check(int k);

}  // namespace qmetro
