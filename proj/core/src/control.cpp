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

#include <cmath>
#include <string>

namespace qmetro {

double total_duration(const ControlSchedule& schedule) {
    double total = 0.0;
    for (const auto& seg : schedule) {
        total += seg.duration;
    }
    return total;
}

void check_schedule(const ControlSchedule& schedule, double tau) {
    for (const auto& seg : schedule) {
        if (!(seg.duration >= 0.0) || !std::isfinite(seg.duration)) {
            throw Error(ErrorCode::ScheduleMismatch, "segment durations must be finite and >= 0");
        }
    }
    if (!schedule.empty() && std::abs(total_duration(schedule) - tau) > 1e-9) {
        throw Error(ErrorCode::ScheduleMismatch,
                    "segment durations sum to " + std::to_string(total_duration(schedule)) +
                        ", expected " + std::to_string(tau));
    }
}

Matrix control_propagator(const ControlSchedule& schedule, Index dim) {
    Matrix u = Matrix::Identity(dim, dim);
    for (const auto& seg : schedule) {
        if (seg.h0.dim() != dim) {
            throw Error(ErrorCode::DimensionMismatch, "control Hamiltonian has wrong dimension");
        }
        u = propagator(seg.h0, seg.duration) * u;
    }
    return u;
}

HermitianOperator average_hamiltonian(const HermitianOperator& h, const ControlSchedule& schedule,
                                      double tau, int steps_per_segment) {
    if (steps_per_segment < 1) {
        throw Error(ErrorCode::InvalidArgument, "steps_per_segment must be >= 1");
    }
    if (!(tau > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "tau must be positive");
    }
    check_schedule(schedule, tau);
    if (schedule.empty()) {
        return h;
    }
    const Index d = h.dim();
    Matrix sum = Matrix::Zero(d, d);
    Matrix start = Matrix::Identity(d, d);  // U₀ at the start of the segment
    for (const auto& seg : schedule) {
        if (seg.h0.dim() != d) {
            throw Error(ErrorCode::DimensionMismatch, "control Hamiltonian has wrong dimension");
        }
        if (seg.duration == 0.0) {
            continue;
        }
        const EigenSystem eig = eig_hermitian(seg.h0);
        const double dt = seg.duration / steps_per_segment;
        for (int k = 0; k < steps_per_segment; ++k) {
            const Matrix u0 = propagator(eig, (k + 0.5) * dt) * start;
            sum += dt * (u0.adjoint() * h.matrix() * u0);
        }
        start = propagator(eig, seg.duration) * start;
    }
    const Matrix avg = sum / tau;
    return HermitianOperator(0.5 * (avg + avg.adjoint()));
}

}  // namespace qmetro
