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

#include "qmetro/error.hpp"
#include "qmetro/montecarlo.hpp"
#include "qmetro/optimal.hpp"
#include "qmetro/parallel.hpp"

#include "corpus.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

namespace qmetro {
namespace {

ProtocolSpec optimal_two_level(double tau) {
    const HermitianOperator h((Matrix(2, 2) << 0.5, 0, 0, -0.5).finished());
    const OptimalConfiguration cfg = optimal_configuration(h);
    return make_simple_protocol(cfg.state, h, Povm::eigenbasis_of(cfg.observable.op()), tau);
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return ErrorCode::ParseError;
}

TEST(Sampling, CountsSumToShots) {
    testing::Rng rng(101);
    for (int trial = 0; trial < 200; ++trial) {
        const int k = testing::uniform_int(rng, 1, 8);
        const std::vector<double> p = testing::random_simplex(rng, k);
        const long long n = testing::uniform_int(rng, 1, 100000);
        const SampleTable t = sample_outcomes(p, n, 7, trial);
        EXPECT_EQ(std::accumulate(t.counts.begin(), t.counts.end(), 0LL), n);
        EXPECT_NEAR(std::accumulate(t.frequencies.begin(), t.frequencies.end(), 0.0), 1.0, 1e-12);
    }
}

TEST(Sampling, CertainOutcome) {
    const SampleTable t = sample_outcomes({1.0, 0.0}, 1000, 3);
    EXPECT_EQ(t.counts, (std::vector<long long>{1000, 0}));
    const SampleTable u = sample_outcomes({0.0, 1.0}, 1000, 3);
    EXPECT_EQ(u.counts, (std::vector<long long>{0, 1000}));
}

TEST(Sampling, FairCoinConcentrates) {
    const SampleTable t = sample_outcomes({0.5, 0.5}, 1'000'000, 11);
    EXPECT_NEAR(t.frequencies[0], 0.5, 0.002);
}

TEST(Sampling, SameSeedSameStream) {
    const std::vector<double> p{0.2, 0.3, 0.5};
    EXPECT_EQ(sample_outcomes(p, 1000, 5, 9).counts, sample_outcomes(p, 1000, 5, 9).counts);
    EXPECT_NE(sample_outcomes(p, 1000, 5, 9).counts, sample_outcomes(p, 1000, 5, 10).counts);
    EXPECT_NE(sample_outcomes(p, 1000, 5, 9).counts, sample_outcomes(p, 1000, 6, 9).counts);
}

TEST(Sampling, ChiSquareGoodnessOfFit) {
    // Per-seed chi-square p-values should rarely fall below 1e-3.
    const std::vector<double> p{0.1, 0.25, 0.4, 0.05, 0.2};
    const long long n = 20000;
    const boost::math::chi_squared dist(static_cast<double>(p.size() - 1));
    int rejected = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const SampleTable t = sample_outcomes(p, n, seed);
        double chi2 = 0.0;
        for (std::size_t k = 0; k < p.size(); ++k) {
            const double expected = p[k] * static_cast<double>(n);
            chi2 += (t.counts[k] - expected) * (t.counts[k] - expected) / expected;
        }
        if (boost::math::cdf(boost::math::complement(dist, chi2)) < 1e-3) ++rejected;
    }
    EXPECT_LE(rejected, 1);
}

TEST(Sampling, Errors) {
    EXPECT_EQ(code_of([] { sample_outcomes({0.5, 0.5}, 0, 1); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { sample_outcomes({0.5, 0.6}, 10, 1); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { sample_outcomes({1.5, -0.5}, 10, 1); }), ErrorCode::NegativeProbability);
    EXPECT_EQ(code_of([] { sample_outcomes({}, 10, 1); }), ErrorCode::InvalidArgument);
}

TEST(Experiment, ReproducibleAcrossThreadCounts) {
    const ProtocolSpec spec = optimal_two_level(1.0);
    ExperimentOptions o;
    o.n_shots = 5000;
    o.repeats = 64;
    o.seed = 1234;
    o.b_true = 0.01;
    set_max_threads(1);
    const ExperimentRun a = run_experiment(spec, o);
    set_max_threads(4);
    const ExperimentRun b = run_experiment(spec, o);
    set_max_threads(0);
    EXPECT_EQ(a.estimates, b.estimates);
    EXPECT_EQ(a.first_counts, b.first_counts);
    EXPECT_EQ(a.sd, b.sd);
}

TEST(Experiment, OptimalTwoLevelSpreadMatchesTheBound) {
    const ProtocolSpec spec = optimal_two_level(1.0);
    ExperimentOptions o;
    o.n_shots = 10000;
    o.repeats = 400;
    o.seed = 42;
    const ExperimentRun run = run_experiment(spec, o);
    EXPECT_NEAR(run.fisher_bound, 0.01, 1e-12);
    ASSERT_TRUE(run.quantum_bound.has_value());
    EXPECT_NEAR(*run.quantum_bound, 0.01, 1e-12);
    EXPECT_NEAR(run.sd, 0.01, 0.0015);
    EXPECT_NEAR(run.mean_estimate, 0.0, 5.0 * run.standard_error);
    EXPECT_TRUE(bound_audit(run).pass);
}

TEST(Experiment, EstimatorIsConsistent) {
    const ProtocolSpec spec = optimal_two_level(1.0);
    const double b = 0.02;
    for (long long n : {1000LL, 10000LL, 100000LL}) {
        ExperimentOptions o;
        o.b_true = b;
        o.n_shots = n;
        o.repeats = 200;
        o.seed = 5;
        const ExperimentRun run = run_experiment(spec, o);
        // The linearized estimator sees sin(bτ) ≈ b to well within 10%.
        EXPECT_NEAR(run.mean_estimate, b, 0.1 * b + 4.0 * run.standard_error) << n;
        EXPECT_NEAR(run.sd * std::sqrt(static_cast<double>(n)), 1.0, 0.15) << n;
    }
}

TEST(Experiment, ObservableMeanAgreesWithMle) {
    testing::Rng rng(102);
    const Index d = 3;
    const HermitianOperator h = testing::random_hermitian(rng, d);
    const ProtocolSpec spec =
        make_simple_protocol(testing::random_pure(rng, d), h, testing::random_povm(rng, d, 4), 1.0);
    ExperimentOptions o;
    o.n_shots = 2000;
    o.repeats = 50;
    o.seed = 8;
    const ExperimentRun mle = run_experiment(spec, o);
    o.estimator = EstimatorKind::observable_mean;
    const ExperimentRun obs = run_experiment(spec, o);
    for (std::size_t t = 0; t < mle.estimates.size(); ++t) {
        EXPECT_NEAR(mle.estimates[t], obs.estimates[t], 1e-10);
    }
}

TEST(Experiment, SingleShotRuns) {
    const ProtocolSpec spec = optimal_two_level(1.0);
    ExperimentOptions o;
    o.n_shots = 1;
    o.repeats = 1000;
    o.seed = 3;
    const ExperimentRun run = run_experiment(spec, o);
    // Each single-shot estimate is ±1 for the optimal readout.
    for (double e : run.estimates) EXPECT_NEAR(std::abs(e), 1.0, 1e-12);
    EXPECT_TRUE(bound_audit(run).pass);
}

TEST(Audit, SaturatingRunPasses) {
    const ProtocolSpec spec = optimal_two_level(2.0);
    ExperimentOptions o;
    o.n_shots = 1000;
    o.repeats = 300;
    o.seed = 77;
    const AuditVerdict v = bound_audit(run_experiment(spec, o));
    EXPECT_TRUE(v.pass);
    EXPECT_TRUE(v.informative);
    ASSERT_EQ(v.checks.size(), 2u);
    EXPECT_EQ(v.checks[0].name, "fisher");
    EXPECT_EQ(v.checks[1].name, "quantum");
}

TEST(Audit, OverstatedBoundFails) {
    // Pretending the spread were half as large doubles the bound; the sampled
    // spread then sits far below it.
    const ProtocolSpec spec = optimal_two_level(1.0);
    ExperimentOptions o;
    o.n_shots = 1000;
    o.repeats = 300;
    o.seed = 78;
    ExperimentRun run = run_experiment(spec, o);
    run.quantum_bound = *run.quantum_bound * 2.0;
    const AuditVerdict v = bound_audit(run);
    EXPECT_FALSE(v.pass);
    EXPECT_TRUE(v.checks[0].pass);
    EXPECT_FALSE(v.checks[1].pass);
    EXPECT_LT(v.checks[1].z_score, -4.0);
}

TEST(Audit, UninformativeAndSingleTrial) {
    const HermitianOperator h((Matrix(2, 2) << 0.5, 0, 0, -0.5).finished());
    const ProtocolSpec blind = make_simple_protocol(QuantumState::pure(basis_vector(2, 0)), h,
                                                    Povm::projective(Matrix::Identity(2, 2)), 1.0);
    ExperimentOptions o;
    o.n_shots = 100;
    o.repeats = 10;
    const ExperimentRun run = run_experiment(blind, o);
    EXPECT_FALSE(std::isfinite(run.fisher_bound));
    EXPECT_FALSE(run.warnings.empty());
    const AuditVerdict v = bound_audit(run);
    EXPECT_TRUE(v.pass);
    EXPECT_FALSE(v.informative);

    o.repeats = 1;
    const AuditVerdict single = bound_audit(run_experiment(optimal_two_level(1.0), o));
    EXPECT_FALSE(single.applicable);
}

TEST(Audit, BonferroniThreshold) {
    EXPECT_NEAR(bonferroni_z(0.05, 1), 1.6448536269514722, 1e-9);
    EXPECT_NEAR(bonferroni_z(0.05, 10), 2.5758293035489004, 1e-9);
    EXPECT_GT(bonferroni_z(1e-3, 100), bonferroni_z(1e-3, 10));
    EXPECT_EQ(code_of([] { bonferroni_z(0.0, 3); }), ErrorCode::InvalidArgument);
    EXPECT_EQ(code_of([] { bonferroni_z(0.05, 0); }), ErrorCode::InvalidArgument);
}

TEST(Experiment, LinearizationGuardWarns) {
    const ProtocolSpec spec = optimal_two_level(1.0);
    ExperimentOptions o;
    o.n_shots = 100;
    o.repeats = 2;
    o.b_true = 0.5;
    const ExperimentRun run = run_experiment(spec, o);
    ASSERT_FALSE(run.warnings.empty());
    EXPECT_NE(run.warnings.front().find("exceeds"), std::string::npos);
}

TEST(Experiment, StrictModeRejectsNonRegularDistributions) {
    // Plant an outcome with P0 = 0 and a first-order slope.
    const ProtocolSpec spec = optimal_two_level(1.0);
    OutcomeDistribution dist = run_distribution(spec, 0.0);
    dist.entries.push_back(OutcomeEntry{{{2}}, "2", 0.0, 0.0, 1e-3});
    dist.entries[0].dp -= 1e-3;
    dist.regular = false;
    ExperimentOptions o;
    o.n_shots = 100;
    o.repeats = 2;
    o.strict = true;
    EXPECT_EQ(code_of([&] { run_experiment(spec, dist, o); }), ErrorCode::NonRegular);
    o.strict = false;
    const ExperimentRun run = run_experiment(spec, dist, o);
    EXPECT_FALSE(run.regular);
    EXPECT_FALSE(run.warnings.empty());
}

TEST(Experiment, QuantumBoundCoversAllRounds) {
    ProtocolSpec spec = optimal_two_level(1.0);
    spec.rounds = 4;
    ExperimentOptions o;
    o.n_shots = 100;
    o.repeats = 20;
    const ExperimentRun run = run_experiment(spec, o);
    EXPECT_NEAR(*run.quantum_bound, 0.1 / 2.0, 1e-12);
    EXPECT_NEAR(run.fisher_bound, 0.1 / 2.0, 1e-12);
}

}  // namespace
}  // namespace qmetro
