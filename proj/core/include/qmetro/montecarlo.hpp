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

// Seeded multinomial sampling of protocol outcomes, repeated estimation of b,
// and audits of the empirical spread against the Fisher and Cramér-Rao
// bounds.

#pragma once

#include "qmetro/protocol.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qmetro {

struct SampleTable {
    std::vector<long long> counts;
    std::vector<double> frequencies;
};

/// Multinomial draw of n shots (sequential binomials). The generator is
/// std::mt19937_64 seeded with seed_seq{seed, trial}, so each (seed, trial)
/// pair is an independent, order-free stream.
SampleTable sample_outcomes(const std::vector<double>& probabilities, long long n,
                            std::uint64_t seed, std::uint64_t trial = 0);

enum class EstimatorKind { mle, observable_mean };

std::string to_string(EstimatorKind e);
EstimatorKind parse_estimator(const std::string& name);

struct ExperimentOptions {
    double b_true = 0.0;
    long long n_shots = 1;
    std::uint64_t seed = 0;
    EstimatorKind estimator = EstimatorKind::mle;
    int repeats = 1;
    /// Warn when |b·τ·(Λ−λ)| exceeds this.
    double linearization_guard = 0.1;
    /// Raise NonRegular instead of warning.
    bool strict = false;
};

struct ExperimentRun {
    std::uint64_t seed = 0;
    double b_true = 0.0;
    long long n_shots = 1;
    int repeats = 1;
    EstimatorKind estimator = EstimatorKind::mle;

    std::vector<std::string> labels;
    std::vector<long long> first_counts;  // counts from trial 0
    std::vector<double> estimates;        // one per trial
    double mean_estimate = 0.0;
    double sd = 0.0;              // sample standard deviation of b̂ (M − 1)
    double standard_error = 0.0;  // sd/√M

    double fisher_per_shot = 0.0;
    /// 1/√(n·F); +∞ when the protocol carries no information.
    double fisher_bound = 0.0;
    std::optional<double> quantum_bound;
    double z_score = 0.0;  // (sd/fisher_bound − 1)·√(2(M − 1))
    bool regular = true;
    std::vector<std::string> warnings;
};

/// Samples the protocol's exact distribution at b_true `repeats` times and
/// estimates b each time from the linearization at b = 0.
ExperimentRun run_experiment(const ProtocolSpec& spec, const ExperimentOptions& options);

/// Same, reusing a distribution already enumerated at options.b_true.
ExperimentRun run_experiment(const ProtocolSpec& spec, const OutcomeDistribution& dist,
                             const ExperimentOptions& options);

struct BoundCheck {
    std::string name;
    double bound;
    double z_score;
    bool pass;
};

struct AuditVerdict {
    bool pass = true;
    bool informative = true;  // false: infinite bound, nothing to test
    bool applicable = true;   // false: fewer than two trials
    std::vector<BoundCheck> checks;
};

struct AuditOptions {
    /// One-sided threshold: pass when sd/bound − 1 ≥ −z_critical/√(2M).
    /// The default reproduces the slack 4/√(2M).
    double z_critical = 4.0;
};

AuditVerdict bound_audit(const ExperimentRun& run, AuditOptions options = {});

/// Bonferroni threshold Φ⁻¹(1 − alpha/m) for m simultaneous one-sided tests.
double bonferroni_z(double alpha, std::size_t m);

}  // namespace qmetro
