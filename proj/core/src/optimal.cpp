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

#include "qmetro/optimal.hpp"

#include "qmetro/error.hpp"
#include "qmetro/parallel.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace qmetro {
namespace {

constexpr double kDegenerate = 1e-9;
constexpr double kInsensitive = 1e-12;

// Canonical unit vector of the eigenspace spanned by the given columns.
Vector canonical_vector(const Matrix& space) {
    const Index d = space.rows();
    Index best = 0;
    double best_norm = -1.0;
    for (Index j = 0; j < d; ++j) {
        // ‖P e_j‖ where P = QQ†, i.e. the norm of row j of Q.
        const double norm = space.row(j).norm();
        if (norm > best_norm + 1e-12) {
            best = j;
            best_norm = norm;
        }
    }
    Vector v = space * space.row(best).adjoint();
    v /= v.norm();
    Index peak = 0;
    for (Index j = 1; j < d; ++j) {
        if (std::abs(v(j)) > std::abs(v(peak)) + 1e-12) peak = j;
    }
    v *= std::conj(v(peak)) / std::abs(v(peak));
    return v;
}

Matrix extremal_space(const EigenSystem& eig, bool top, double scale) {
    const Index d = eig.eigenvalues.size();
    const double edge = top ? eig.max() : eig.min();
    std::vector<Index> cols;
    for (Index j = 0; j < d; ++j) {
        if (std::abs(eig.eigenvalues(j) - edge) <= kDegenerate * scale) cols.push_back(j);
    }
    Matrix space(d, static_cast<Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) {
        space.col(static_cast<Index>(c)) = eig.eigenvectors.col(cols[c]);
    }
    return space;
}

}  // namespace

OptimalConfiguration optimal_configuration(const HermitianOperator& h) {
    const EigenSystem eig = eig_hermitian(h);
    const double spread = eig.max() - eig.min();
    if (!(spread > 1e-12)) {
        throw Error(ErrorCode::ZeroSpread, "zero eigenvalue spread; no optimal configuration");
    }
    const double scale = std::max(1.0, spread);
    const Vector top = canonical_vector(extremal_space(eig, true, scale));
    const Vector bottom = canonical_vector(extremal_space(eig, false, scale));
    const Complex i(0.0, 1.0);
    const Matrix o = i * top * bottom.adjoint() - i * bottom * top.adjoint();
    return OptimalConfiguration{
        QuantumState::pure_normalized((top + bottom) / std::sqrt(2.0)),
        Observable(HermitianOperator(o)),
        top,
        bottom,
        eig.max(),
        eig.min(),
    };
}

double saturation_ratio(const QuantumState& state, const HermitianOperator& h,
                        const Observable& obs) {
    const Moments m = expectation_and_variance(state, obs);
    const double slope = std::abs(expectation(state, commutator(h.matrix(), obs.matrix())));
    return m.deviation > 0.0 ? slope / m.deviation : std::numeric_limits<double>::infinity();
}

double sensitivity_from_observable(const QuantumState& state, const HermitianOperator& h,
                                   const Observable& obs, double tau, long long n) {
    if (!(tau > 0.0) || n < 1) {
        throw Error(ErrorCode::InvalidArgument, "need tau > 0 and n >= 1");
    }
    if (state.dim() != h.dim() || obs.op().dim() != h.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "state, Hamiltonian and observable differ");
    }
    const double slope = std::abs(expectation(state, commutator(h.matrix(), obs.matrix())));
    if (slope < kInsensitive) {
        throw Error(ErrorCode::InsensitiveObservable,
                    "commutator expectation vanishes; the observable is blind to b");
    }
    const Moments m = expectation_and_variance(state, obs);
    return m.deviation / (tau * std::sqrt(static_cast<double>(n)) * slope);
}

ScanResult two_level_optimum_scan(const HermitianOperator& h, ScanOptions options) {
    if (h.dim() != 2) {
        throw Error(ErrorCode::DimensionMismatch, "the two-level scan needs a 2x2 Hamiltonian");
    }
    if (options.grid < 2 || !(options.tau > 0.0) || options.n < 1) {
        throw Error(ErrorCode::InvalidArgument, "need grid >= 2, tau > 0 and n >= 1");
    }
    // In the eigenbasis (|Λ⟩, |λ⟩), H = μI + (s/2)σ_z; O² = I.
    const double spread = spectral_spread(h);
    const int g = options.grid;
    const double step = std::numbers::pi / (g - 1);
    const double norm = options.tau * std::sqrt(static_cast<double>(options.n));
    const double cphi = std::cos(options.phi / 2.0);
    const double sphi = std::sin(options.phi / 2.0);

    std::vector<ScanResult> rows(static_cast<std::size_t>(g));
    parallel_for(rows.size(), [&](std::size_t ia) {
        const double alpha = step * static_cast<double>(ia);
        const double ca = std::cos(alpha);
        const double sa = std::sin(alpha);
        ScanResult best{alpha, 0.0, std::numeric_limits<double>::infinity()};
        for (int it = 0; it < g; ++it) {
            const double theta = step * it;
            const double ct = std::cos(theta);
            const double st = std::sin(theta);
            // Bloch vectors o = (sinα, 0, cosα) and s = (sinθ cos(φ/2),
            // sinθ sin(φ/2), cosθ). ΔO² = 1 − (o·s)² = |o × s|², which stays
            // accurate where O is nearly diagonal in the state.
            const double cx = -ca * st * sphi;
            const double cy = ca * st * cphi - sa * ct;
            const double cz = sa * st * sphi;
            const double dev = std::sqrt(cx * cx + cy * cy + cz * cz);
            // ⟨[H,O]⟩ = i s sinα ⟨σ_y⟩
            const double slope = std::abs(spread * sa * st * sphi);
            const double db = slope > 0.0 ? dev / (norm * slope)
                                          : std::numeric_limits<double>::infinity();
            if (db < best.delta_b) best = {alpha, theta, db};
        }
        rows[ia] = best;
    });
    ScanResult best = rows.front();
    for (const ScanResult& r : rows) {
        if (r.delta_b < best.delta_b) best = r;
    }
    return best;
}

}  // namespace qmetro
