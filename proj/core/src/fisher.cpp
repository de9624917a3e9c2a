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

#include "qmetro/fisher.hpp"

#include "qmetro/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace qmetro {
namespace {

std::vector<std::string> index_labels(std::size_t n) {
    std::vector<std::string> labels;
    for (std::size_t k = 0; k < n; ++k) labels.push_back(std::to_string(k));
    return labels;
}

}  // namespace

LinearizedDistribution::LinearizedDistribution(std::vector<std::string> labels,
                                               std::vector<double> p0, std::vector<double> dp)
    : labels_(std::move(labels)), p0_(std::move(p0)), dp_(std::move(dp)) {
    if (p0_.empty() || p0_.size() != dp_.size() || labels_.size() != p0_.size()) {
        throw Error(ErrorCode::InvalidArgument, "P0, dP and labels must have equal, non-zero size");
    }
    double sum_p = 0.0;
    double sum_dp = 0.0;
    for (std::size_t k = 0; k < p0_.size(); ++k) {
        if (!std::isfinite(p0_[k]) || !std::isfinite(dp_[k])) {
            throw Error(ErrorCode::InvalidArgument, "non-finite probability or derivative");
        }
        if (p0_[k] < 0.0) {
            throw Error(ErrorCode::NegativeProbability, "P0 entries must be non-negative");
        }
        sum_p += p0_[k];
        sum_dp += dp_[k];
    }
    if (std::abs(sum_p - 1.0) > 1e-9) {
        throw Error(ErrorCode::InvalidArgument, "P0 does not sum to 1");
    }
    const double scale = std::max(1.0, std::accumulate(dp_.begin(), dp_.end(), 0.0,
                                                       [](double acc, double v) {
                                                           return std::max(acc, std::abs(v));
                                                       }));
    if (std::abs(sum_dp) > 1e-9 * scale) {
        throw Error(ErrorCode::InvalidArgument, "dP does not sum to 0 (probability not conserved)");
    }
}

LinearizedDistribution::LinearizedDistribution(std::vector<double> p0, std::vector<double> dp)
    : LinearizedDistribution(index_labels(p0.size()), p0, dp) {}

std::vector<double> LinearizedDistribution::at(double b) const {
    std::vector<double> out(p0_.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = p0_[k] + b * dp_[k];
    }
    return out;
}

FisherReport classical_fisher(const LinearizedDistribution& dist, long long n,
                              FisherOptions options) {
    if (n < 1) {
        throw Error(ErrorCode::InvalidArgument, "shot count must be >= 1");
    }
    FisherReport report;
    report.n_shots = n;
    for (std::size_t k = 0; k < dist.size(); ++k) {
        const double p = dist.p0()[k];
        const double d = dist.dp()[k];
        if (p < tol::rare_outcome) {
            report.excluded_outcomes.push_back(k);
            if (std::abs(d) > tol::rare_derivative) {
                report.regular = false;
            }
            continue;
        }
        report.fisher_per_shot += d * d / p;
    }
    if (!report.regular && options.strict) {
        throw Error(ErrorCode::NonRegular,
                    "an outcome with P0 < 1e-12 has a non-negligible derivative; the "
                    "linearized Fisher information is not valid here");
    }
    report.delta_b_min = report.fisher_per_shot > 0.0
                             ? 1.0 / std::sqrt(static_cast<double>(n) * report.fisher_per_shot)
                             : std::numeric_limits<double>::infinity();
    return report;
}

double quantum_crb(double spread, double tau, long long n) {
    if (!(tau > 0.0) || n < 1) {
        throw Error(ErrorCode::InvalidArgument, "need tau > 0 and n >= 1");
    }
    if (!(spread > 1e-12)) {
        throw Error(ErrorCode::ZeroSpread, "zero eigenvalue spread; no sensitivity possible");
    }
    return 1.0 / (tau * std::sqrt(static_cast<double>(n)) * spread);
}

double quantum_crb(const HermitianOperator& h, double tau, long long n) {
    return quantum_crb(spectral_spread(h), tau, n);
}

std::vector<double> exact_probabilities(const QuantumState& state, const HermitianOperator& h,
                                        const Povm& povm, double tau, double b) {
    return outcome_probabilities(evolve(state, h, b, tau), povm);
}

LinearizedDistribution linearize_povm(const QuantumState& state, const HermitianOperator& h,
                                      const Povm& povm, double tau, LinearizeOptions options) {
    if (state.dim() != h.dim() || povm.dim() != h.dim()) {
        throw Error(ErrorCode::DimensionMismatch, "state, Hamiltonian and POVM dimensions differ");
    }
    if (tau < 0.0) {
        throw Error(ErrorCode::InvalidArgument, "tau must be non-negative");
    }
    std::vector<double> p0 = outcome_probabilities(state, povm);
    std::vector<double> dp;
    dp.reserve(povm.size());
    for (const Matrix& e : povm.elements()) {
        // ⟨[H,E]⟩ is purely imaginary for Hermitian H and E.
        const Complex c = expectation(state, commutator(h.matrix(), e));
        dp.push_back((Complex(0.0, tau) * c).real());
    }
    // Remove the O(1e-16) drift so Σ dP = 0 holds exactly.
    const double drift = std::accumulate(dp.begin(), dp.end(), 0.0) / static_cast<double>(dp.size());
    for (double& v : dp) v -= drift;

    LinearizedDistribution dist(std::move(p0), std::move(dp));
    if (!options.cross_check) {
        return dist;
    }
    const double spread = spectral_spread(h);
    const double scale = tau * spread;
    if (scale <= 0.0) {
        dist.cross_check_residual = 0.0;
        return dist;
    }
    const double step = tol::fd_step / scale;
    const std::vector<double> plus = exact_probabilities(state, h, povm, tau, step);
    const std::vector<double> minus = exact_probabilities(state, h, povm, tau, -step);
    double worst = 0.0;
    double largest = 0.0;
    for (std::size_t k = 0; k < dist.size(); ++k) {
        const double fd = (plus[k] - minus[k]) / (2.0 * step);
        worst = std::max(worst, std::abs(fd - dist.dp()[k]));
        largest = std::max(largest, std::abs(dist.dp()[k]));
    }
    // Round-off in the difference quotient is ~1e-10·τ(Λ−λ); the floor keeps
    // zero-derivative cases from reporting spurious relative error.
    const double residual = worst / std::max(largest, tol::fd_cross_check * scale);
    dist.cross_check_residual = residual;
    if (residual > tol::fd_cross_check) {
        throw Error(ErrorCode::CrossCheckFailure,
                    "analytic and finite-difference derivatives differ by relative " +
                        std::to_string(residual));
    }
    return dist;
}

}  // namespace qmetro
