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

#include "qmetro/montecarlo.hpp"

#include "qmetro/error.hpp"
#include "qmetro/estimator.hpp"
#include "qmetro/parallel.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace qmetro {

SampleTable sample_outcomes(const std::vector<double>& probabilities, long long n,
                            std::uint64_t seed, std::uint64_t trial) {
    if (n < 1) {
        throw Error(ErrorCode::InvalidArgument, "shot count must be >= 1");
    }
    if (probabilities.empty()) {
        throw Error(ErrorCode::InvalidArgument, "empty distribution");
    }
    double total = 0.0;
    for (double p : probabilities) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw Error(ErrorCode::NegativeProbability, "probabilities must be finite and >= 0");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw Error(ErrorCode::InvalidArgument, "probabilities must sum to 1");
    }
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
    std::mt19937_64 rng(seq);

    SampleTable table;
    table.counts.assign(probabilities.size(), 0);
    long long left = n;
    double mass = total;
    for (std::size_t k = 0; k + 1 < probabilities.size() && left > 0; ++k) {
        const double p = mass > 0.0 ? std::clamp(probabilities[k] / mass, 0.0, 1.0) : 0.0;
        std::binomial_distribution<long long> draw(left, p);
        const long long c = draw(rng);
        table.counts[k] = c;
        left -= c;
        mass -= probabilities[k];
    }
    table.counts.back() += left;
    table.frequencies.reserve(table.counts.size());
    for (long long c : table.counts) {
        table.frequencies.push_back(static_cast<double>(c) / static_cast<double>(n));
    }
    return table;
}

std::string to_string(EstimatorKind e) {
    return e == EstimatorKind::mle ? "mle" : "observable_mean";
}

EstimatorKind parse_estimator(const std::string& name) {
    if (name == "mle") return EstimatorKind::mle;
    if (name == "observable_mean") return EstimatorKind::observable_mean;
    throw Error(ErrorCode::ParseError, "unknown estimator '" + name + "'");
}

ExperimentRun run_experiment(const ProtocolSpec& spec, const ExperimentOptions& options) {
    return run_experiment(spec, run_distribution(spec, options.b_true), options);
}

ExperimentRun run_experiment(const ProtocolSpec& spec, const OutcomeDistribution& dist,
                             const ExperimentOptions& options) {
    if (options.n_shots < 1 || options.repeats < 1) {
        throw Error(ErrorCode::InvalidArgument, "need n_shots >= 1 and repeats >= 1");
    }
    ExperimentRun run;
    run.seed = options.seed;
    run.b_true = options.b_true;
    run.n_shots = options.n_shots;
    run.repeats = options.repeats;
    run.estimator = options.estimator;

    const LinearizedDistribution lin = dist.linearized();
    const FisherReport report = classical_fisher(lin, options.n_shots);
    run.regular = dist.regular && report.regular;
    if (!run.regular) {
        if (options.strict) {
            throw Error(ErrorCode::NonRegular,
                        "a history with P0 < 1e-12 has a non-negligible derivative");
        }
        run.warnings.push_back("non-regular distribution: linearized Fisher information is not valid");
    }
    run.fisher_per_shot = report.fisher_per_shot;
    run.fisher_bound = report.delta_b_min;

    const double spread = spectral_spread(spec.h);
    const double rounds = static_cast<double>(spec.rounds);
    if (spread > 1e-12 && spec.tau > 0.0) {
        run.quantum_bound =
            quantum_crb(spread, spec.tau, options.n_shots) / std::sqrt(rounds);
    }
    const double phase = std::abs(options.b_true * spec.tau * spread);
    if (phase > options.linearization_guard) {
        std::ostringstream msg;
        msg << "|b·τ·(Λ−λ)| = " << phase << " exceeds " << options.linearization_guard
            << "; the linearized estimator is biased here";
        run.warnings.push_back(msg.str());
    }
    for (const auto& e : dist.entries) run.labels.push_back(e.label);

    if (!report.informative()) {
        run.warnings.push_back("protocol carries no information about b");
        run.estimates.assign(static_cast<std::size_t>(options.repeats),
                             std::numeric_limits<double>::quiet_NaN());
        run.first_counts = sample_outcomes(dist.probabilities(), options.n_shots, options.seed).counts;
        run.mean_estimate = std::numeric_limits<double>::quiet_NaN();
        run.sd = std::numeric_limits<double>::infinity();
        run.standard_error = std::numeric_limits<double>::infinity();
        return run;
    }

    const std::vector<double> probs = dist.probabilities();
    const std::vector<double> weights = derived_weights(lin);
    run.estimates.assign(static_cast<std::size_t>(options.repeats), 0.0);
    std::vector<long long> first;
    parallel_for(run.estimates.size(), [&](std::size_t t) {
        const SampleTable table = sample_outcomes(probs, options.n_shots, options.seed, t);
        run.estimates[t] = options.estimator == EstimatorKind::mle
                               ? mle_estimate(table.frequencies, lin)
                               : observable_estimate(weights, table.frequencies, lin);
        if (t == 0) first = table.counts;
    });
    run.first_counts = std::move(first);

    const double m = static_cast<double>(options.repeats);
    double sum = 0.0;
    for (double e : run.estimates) sum += e;
    run.mean_estimate = sum / m;
    if (options.repeats > 1) {
        double ss = 0.0;
        for (double e : run.estimates) ss += (e - run.mean_estimate) * (e - run.mean_estimate);
        run.sd = std::sqrt(ss / (m - 1.0));
        run.standard_error = run.sd / std::sqrt(m);
        run.z_score = (run.sd / run.fisher_bound - 1.0) * std::sqrt(2.0 * (m - 1.0));
    }
    return run;
}

AuditVerdict bound_audit(const ExperimentRun& run, AuditOptions options) {
    AuditVerdict verdict;
    if (!std::isfinite(run.fisher_bound)) {
        verdict.informative = false;
        return verdict;
    }
    if (run.repeats < 2) {
        verdict.applicable = false;
        return verdict;
    }
    const double m = static_cast<double>(run.repeats);
    auto check = [&](const std::string& name, double bound) {
        const double rel = run.sd / bound - 1.0;
        BoundCheck c{name, bound, rel * std::sqrt(2.0 * (m - 1.0)),
                     rel >= -options.z_critical / std::sqrt(2.0 * m)};
        verdict.pass = verdict.pass && c.pass;
        verdict.checks.push_back(std::move(c));
    };
    check("fisher", run.fisher_bound);
    if (run.quantum_bound) check("quantum", *run.quantum_bound);
    return verdict;
}

double bonferroni_z(double alpha, std::size_t m) {
    if (!(alpha > 0.0 && alpha < 1.0) || m < 1) {
        throw Error(ErrorCode::InvalidArgument, "need 0 < alpha < 1 and m >= 1");
    }
    const double tail = alpha / static_cast<double>(m);
    return boost::math::quantile(boost::math::complement(boost::math::normal(), tail));
}

}  // namespace qmetro
