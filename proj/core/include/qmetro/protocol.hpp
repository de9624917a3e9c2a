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

// Declarative metrology protocols and exact enumeration of their outcome
// histories.
//
// A round runs K steps. Step k evolves the state under b·H + H₀(t) for its
// duration, then measures with the Kraus operators selected by the outcomes
// seen so far in the round, and optionally applies a unitary that depends on
// the new outcome. Multi-round protocols pick each round from the outcomes of
// all earlier rounds.

#pragma once

#include "qmetro/control.hpp"
#include "qmetro/fisher.hpp"
#include "qmetro/model.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qmetro {

/// Outcome indices observed so far within a round.
using History = std::vector<int>;

/// "0.2.1"; the empty history is "".
std::string history_label(const History& h);
History parse_history(const std::string& label);

struct PolicyEntry {
    std::vector<Matrix> kraus;      // M_β, Σ M_β†M_β = I
    std::vector<Matrix> unitaries;  // U_β applied after outcome β; empty means identity
    std::optional<ControlSchedule> control;  // replaces the step's schedule when set
};

struct FeedbackStep {
    double duration = 0.0;
    ControlSchedule control;  // H₀ during the step; empty means H₀ = 0
    std::map<History, PolicyEntry> policy;
    /// Used for any reachable prefix missing from `policy`.
    std::optional<PolicyEntry> fallback;
};

struct RoundProtocol {
    QuantumState initial;
    std::vector<FeedbackStep> steps;
};

enum class ProtocolVariant { simple, controlled, feedback, multi_round };

std::string to_string(ProtocolVariant v);
ProtocolVariant parse_variant(const std::string& name);

/// Earlier rounds' histories, oldest first; keys the multi-round policy.
using RoundKey = std::vector<History>;

std::string round_key_label(const RoundKey& key);
RoundKey parse_round_key(const std::string& label);

struct ProtocolSpec {
    ProtocolVariant variant = ProtocolVariant::simple;
    HermitianOperator h;
    double tau = 0.0;  // per round
    int rounds = 1;
    RoundProtocol round;  // single-round variants
    std::map<RoundKey, RoundProtocol> round_policy;  // multi_round
    std::optional<RoundProtocol> default_round;      // multi_round fallback
};

/// Single measurement with a POVM at the end of a window of length tau.
ProtocolSpec make_simple_protocol(const QuantumState& state, const HermitianOperator& h,
                                  const Povm& povm, double tau);

/// Same with a control schedule H₀(t) over the window.
ProtocolSpec make_controlled_protocol(const QuantumState& state, const HermitianOperator& h,
                                      const Povm& povm, double tau, ControlSchedule control);

/// Checks dimensions, Kraus completeness, unitarity and durations.
/// Single-round variants need Σ durations = τ; each multi-round round may
/// last at most τ (idle time allowed). Throws InvalidArgument,
/// DimensionMismatch or ScheduleMismatch.
void validate_spec(const ProtocolSpec& spec);

struct OutcomeEntry {
    RoundKey rounds;   // one history per round
    std::string label; // round labels joined by '|'
    double p_b;        // probability at the requested b
    double p0;
    double dp;         // d/db at b = 0
};

struct OutcomeDistribution {
    std::vector<OutcomeEntry> entries;  // ordered by history
    bool regular = true;
    /// Relative deviation of the finite-difference derivative from the
    /// tangent-propagated one (largest over rounds).
    double cross_check_residual = 0.0;
    /// |Σ_prefixes P0 − 1| at each step depth (single-round only).
    std::vector<double> prefix_residuals;
    std::size_t pruned = 0;

    std::vector<double> probabilities() const;
    LinearizedDistribution linearized() const;
};

struct EnumerationOptions {
    bool cross_check = true;
    std::size_t history_cap = 1'000'000;
    /// Steps during which the field couples; empty means all steps.
    std::vector<bool> coupled;
};

/// Exact enumeration of a single-round protocol (simple, controlled or
/// feedback). Throws PolicyGap, Blowup or CrossCheckFailure.
OutcomeDistribution run_feedback_distribution(const ProtocolSpec& spec, double b,
                                              EnumerationOptions options = {});

/// Joint distribution over all rounds of a multi_round protocol (single-round
/// variants are treated as `rounds` independent repetitions).
OutcomeDistribution run_multiround_distribution(const ProtocolSpec& spec, double b,
                                                EnumerationOptions options = {});

/// Dispatches on the variant.
OutcomeDistribution run_distribution(const ProtocolSpec& spec, double b,
                                     EnumerationOptions options = {});

/// Folds every conditional unitary into the measurement operators
/// (M_β → U_β M_β); the outcome distribution is unchanged.
ProtocolSpec strip_feedback(const ProtocolSpec& spec);

/// S_L: Fisher information per shot with the field coupled only during step L.
std::vector<double> step_fisher_contributions(const ProtocolSpec& spec);

/// Total sensing time of one round of the protocol.
double sensing_time(const RoundProtocol& round);

}  // namespace qmetro
