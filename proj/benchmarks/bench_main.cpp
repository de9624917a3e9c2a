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

#include "qmetro/ancilla.hpp"
#include "qmetro/fisher.hpp"
#include "qmetro/linalg.hpp"
#include "qmetro/montecarlo.hpp"
#include "qmetro/optimal.hpp"
#include "qmetro/protocol.hpp"

#include <benchmark/benchmark.h>

#include <numbers>
#include <random>

namespace {

using namespace qmetro;

HermitianOperator random_hermitian(Index d, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    Matrix a(d, d);
    for (Index i = 0; i < d; ++i) {
        for (Index j = 0; j < d; ++j) a(i, j) = Complex(g(rng), g(rng));
    }
    return HermitianOperator(Matrix(0.5 * (a + a.adjoint())));
}

void BM_EigHermitian(benchmark::State& state) {
    const HermitianOperator h = random_hermitian(state.range(0), 1);
    for (auto _ : state) benchmark::DoNotOptimize(eig_hermitian(h));
}
BENCHMARK(BM_EigHermitian)->RangeMultiplier(2)->Range(2, 128);

void BM_PropagatorWithDerivative(benchmark::State& state) {
    const Index d = state.range(0);
    const HermitianOperator h0 = random_hermitian(d, 2);
    const HermitianOperator h = random_hermitian(d, 3);
    for (auto _ : state) benchmark::DoNotOptimize(propagator_with_derivative(h0, h.matrix(), 0.7));
}
BENCHMARK(BM_PropagatorWithDerivative)->RangeMultiplier(2)->Range(2, 64);

void BM_TwoLevelScan(benchmark::State& state) {
    const HermitianOperator h((Matrix(2, 2) << 0.5, 0, 0, -0.5).finished());
    ScanOptions o;
    o.grid = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(two_level_optimum_scan(h, o));
}
BENCHMARK(BM_TwoLevelScan)->Arg(181)->Arg(721)->Unit(benchmark::kMillisecond);

// Full binary tree of projective measurements: 2^steps histories.
void BM_FeedbackEnumeration(benchmark::State& state) {
    const int steps = static_cast<int>(state.range(0));
    const Index d = 2;
    ProtocolSpec spec;
    spec.variant = ProtocolVariant::feedback;
    spec.h = random_hermitian(d, 4);
    spec.tau = 1.0;
    spec.round.initial = QuantumState::pure_normalized(Vector::Ones(d));
    // A quarter turn about z between σ_x readouts keeps every branch at
    // 50/50, so nothing is pruned.
    const Matrix p0 = (Matrix(2, 2) << 0.5, 0.5, 0.5, 0.5).finished();
    const Matrix p1 = (Matrix(2, 2) << 0.5, -0.5, -0.5, 0.5).finished();
    for (int s = 0; s < steps; ++s) {
        FeedbackStep step;
        step.duration = 1.0 / steps;
        step.control = {{HermitianOperator(Matrix(0.25 * std::numbers::pi * steps * pauli::z())), step.duration}};
        step.fallback = PolicyEntry{{p0, p1}, {}, std::nullopt};
        spec.round.steps.push_back(step);
    }
    for (auto _ : state) benchmark::DoNotOptimize(run_distribution(spec, 0.0));
    state.SetComplexityN(Index{1} << steps);
}
BENCHMARK(BM_FeedbackEnumeration)->DenseRange(2, 12, 2)->Unit(benchmark::kMicrosecond)->Complexity(benchmark::oN);

void BM_AncillaDistribution(benchmark::State& state) {
    const ProtocolSpec spec = build_ancilla_protocol(static_cast<int>(state.range(0)), 1.0, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(run_distribution(spec, 0.0));
}
BENCHMARK(BM_AncillaDistribution)->DenseRange(0, 6, 2)->Unit(benchmark::kMicrosecond);

void BM_MonteCarloExperiment(benchmark::State& state) {
    const ProtocolSpec spec = build_ancilla_protocol(3, 1.0, 1.0);
    const OutcomeDistribution dist = run_distribution(spec, 0.0);
    ExperimentOptions o;
    o.n_shots = 10000;
    o.repeats = static_cast<int>(state.range(0));
    o.seed = 5;
    for (auto _ : state) benchmark::DoNotOptimize(run_experiment(spec, dist, o));
}
BENCHMARK(BM_MonteCarloExperiment)->Arg(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
