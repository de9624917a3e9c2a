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

#include <vector>

namespace qmetro {

/// H₀ held constant for `duration`.
struct ControlSegment {
    HermitianOperator h0;
    double duration;
};

/// Piecewise-constant control H₀(t). An empty schedule means H₀ = 0.
using ControlSchedule = std::vector<ControlSegment>;

inline constexpr int kDefaultStepsPerSegment = 64;

double total_duration(const ControlSchedule& schedule);

/// Throws ScheduleMismatch unless the durations sum to tau within 1e-9
/// (empty schedules are accepted for any tau).
void check_schedule(const ControlSchedule& schedule, double tau);

/// U₀(τ) for the whole schedule, latest segment applied last.
Matrix control_propagator(const ControlSchedule& schedule, Index dim);

/// H̄ = (1/τ) Σ_k Δt_k U₀†(t_k) H U₀(t_k), where each segment is split into
/// `steps_per_segment` equal pieces and t_k are their midpoints.
HermitianOperator average_hamiltonian(const HermitianOperator& h, const ControlSchedule& schedule,
                                      double tau, int steps_per_segment = kDefaultStepsPerSegment);

}  // namespace qmetro
