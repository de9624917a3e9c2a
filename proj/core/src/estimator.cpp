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

#include "qmetro/estimator.hpp"

#include "qmetro/error.hpp"

#include <algorithm>
#include <cmath>

namespace qmetro {

std::vector<double> derived_weights(const LinearizedDistribution& dist) {
    const double f = classical_fisher(dist, 1).fisher_per_shot;
    std::vector<double> weights(dist.size(), 0.0);
    if (!(f > 0.0)) return weights;
    for (std::size_t k = 0; k < dist.size(); ++k) {
        if (dist.p0()[k] < tol::rare_outcome) continue;
        weights[k] = dist.dp()[k] / (dist.p0()[k] * f);
    }
    return weights;
}

DerivedOperator derived_operator(const Povm& povm, const LinearizedDistribution& dist) {
    if (povm.size() != dist.size()) {
        throw Error(ErrorCode::DimensionMismatch, "POVM and distribution sizes differ");
    }
    const FisherReport report = classical_fisher(dist, 1);
    if (report.excluded_outcomes.size() == dist.size()) {
        throw Error(ErrorCode::AllOutcomesRare, "every outcome has P0 below 1e-12");
    }
    std::vector<double> weights = derived_weights(dist);
    Matrix o = Matrix::Zero(povm.dim(), povm.dim());
    double largest = 1.0;
    for (std::size_t k = 0; k < dist.size(); ++k) {
        o += weights[k] * povm.element(k);
        largest = std::max(largest, std::abs(weights[k]));
    }
    return DerivedOperator{Observable(HermitianOperator(o, tol::hermitian * largest)), std::move(weights),
                           report.excluded_outcomes, report.fisher_per_shot};
}

double observable_fisher(const std::vector<double>& weights, const LinearizedDistribution& dist) {
    if (weights.size() != dist.size()) {
        throw Error(ErrorCode::DimensionMismatch, "weights and distribution sizes differ");
    }
    double mean = 0.0;
    double second = 0.0;
    double slope = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        mean += dist.p0()[k] * weights[k];
        second += dist.p0()[k] * weights[k] * weights[k];
        slope += dist.dp()[k] * weights[k];
    }
    const double var = second - mean * mean;
    return var > 0.0 ? slope * slope / var : 0.0;
}

double observable_estimate(const std::vector<double>& weights,
                           const std::vector<double>& frequencies,
                           const LinearizedDistribution& dist) {
    if (weights.size() != frequencies.size() || weights.size() != dist.size()) {
        throw Error(ErrorCode::DimensionMismatch, "weights, frequencies and distribution differ");
    }
    double shift = 0.0;
    double slope = 0.0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
        shift += weights[k] * (frequencies[k] - dist.p0()[k]);
        slope += weights[k] * dist.dp()[k];
    }
    if (std::abs(slope) < 1e-12) {
        throw Error(ErrorCode::InsensitiveObservable, "readout mean does not respond to b");
    }
    return shift / slope;
}

double mle_estimate(const std::vector<double>& frequencies, const LinearizedDistribution& dist) {
    if (frequencies.size() != dist.size()) {
        throw Error(ErrorCode::DimensionMismatch, "frequencies and distribution sizes differ");
    }
    double total = 0.0;
    for (double f : frequencies) total += f;
    if (std::abs(total - 1.0) > 1e-9) {
        throw Error(ErrorCode::InvalidArgument, "frequencies must sum to 1");
    }
    double num = 0.0;
    double fisher = 0.0;
    for (std::size_t k = 0; k < dist.size(); ++k) {
        const double p = dist.p0()[k];
        if (p < tol::rare_outcome) continue;
        const double d = dist.dp()[k];
        num += d * (frequencies[k] - p) / p;
        fisher += d * d / p;
    }
    if (!(fisher > 0.0)) {
        throw Error(ErrorCode::ZeroInformation, "the distribution carries no information about b");
    }
    return num / fisher;
}

double finite_trial_bound(const LinearizedDistribution& dist, long long k) {
    if (k < 1) {
        throw Error(ErrorCode::InvalidArgument, "trial count must be >= 1");
    }
    const FisherReport report = classical_fisher(dist, k);
    if (!report.informative()) {
        throw Error(ErrorCode::ZeroInformation, "the distribution carries no information about b");
    }
    return report.delta_b_min;
}

}  // namespace qmetro
