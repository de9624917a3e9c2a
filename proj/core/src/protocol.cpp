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

#include "qmetro/protocol.hpp"

#include "qmetro/error.hpp"

#include <cmath>
#include <sstream>

namespace qmetro {
namespace {

constexpr double kDurationTol = 1e-9;

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    return parts;
}

void validate_entry(const PolicyEntry& entry, Index d, double duration, const std::string& where) {
    if (entry.kraus.empty()) {
        throw Error(ErrorCode::InvalidArgument, where + ": policy entry has no Kraus operators");
    }
    Matrix sum = Matrix::Zero(d, d);
    for (const Matrix& m : entry.kraus) {
        if (m.rows() != d || m.cols() != d) {
            throw Error(ErrorCode::DimensionMismatch, where + ": Kraus operator has wrong dimension");
        }
        sum += m.adjoint() * m;
    }
    if (max_abs(sum - Matrix::Identity(d, d)) > tol::completeness) {
        throw Error(ErrorCode::InvalidArgument, where + ": Kraus operators are not complete");
    }
    if (!entry.unitaries.empty()) {
        if (entry.unitaries.size() != entry.kraus.size()) {
            throw Error(ErrorCode::InvalidArgument,
                        where + ": need one conditional unitary per outcome");
        }
        for (const Matrix& u : entry.unitaries) {
            if (u.rows() != d || u.cols() != d) {
                throw Error(ErrorCode::DimensionMismatch, where + ": unitary has wrong dimension");
            }
            if (max_abs(u.adjoint() * u - Matrix::Identity(d, d)) > tol::completeness) {
                throw Error(ErrorCode::InvalidArgument, where + ": conditional map is not unitary");
            }
        }
    }
    if (entry.control) {
        check_schedule(*entry.control, duration);
        for (const auto& seg : *entry.control) {
            if (seg.h0.dim() != d) {
                throw Error(ErrorCode::DimensionMismatch, where + ": control has wrong dimension");
            }
        }
    }
}

void validate_round(const RoundProtocol& round, Index d, const std::string& where) {
    if (round.initial.dim() != d) {
        throw Error(ErrorCode::DimensionMismatch, where + ": initial state dimension differs from H");
    }
    if (round.steps.empty()) {
        throw Error(ErrorCode::InvalidArgument, where + ": a round needs at least one step");
    }
    for (std::size_t k = 0; k < round.steps.size(); ++k) {
        const FeedbackStep& step = round.steps[k];
        const std::string at = where + " step " + std::to_string(k);
        if (!(step.duration >= 0.0) || !std::isfinite(step.duration)) {
            throw Error(ErrorCode::ScheduleMismatch, at + ": duration must be finite and >= 0");
        }
        check_schedule(step.control, step.duration);
        for (const auto& seg : step.control) {
            if (seg.h0.dim() != d) {
                throw Error(ErrorCode::DimensionMismatch, at + ": control has wrong dimension");
            }
        }
        if (step.policy.empty() && !step.fallback) {
            throw Error(ErrorCode::InvalidArgument, at + ": step has no policy");
        }
        for (const auto& [prefix, entry] : step.policy) {
            if (prefix.size() != k) {
                throw Error(ErrorCode::InvalidArgument,
                            at + ": policy key '" + history_label(prefix) + "' has wrong depth");
            }
            validate_entry(entry, d, step.duration, at);
        }
        if (step.fallback) validate_entry(*step.fallback, d, step.duration, at);
    }
}

}  // namespace

std::string history_label(const History& h) {
    std::ostringstream out;
    for (std::size_t k = 0; k < h.size(); ++k) {
        if (k > 0) out << '.';
        out << h[k];
    }
    return out.str();
}

History parse_history(const std::string& label) {
    History h;
    if (label.empty()) return h;
    for (const std::string& part : split(label, '.')) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(part, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != part.size() || part.empty() || v < 0) {
            throw Error(ErrorCode::ParseError, "bad history label '" + label + "'");
        }
        h.push_back(v);
    }
    return h;
}

std::string round_key_label(const RoundKey& key) {
    std::string out;
    for (std::size_t r = 0; r < key.size(); ++r) {
        if (r > 0) out += '|';
        out += history_label(key[r]);
    }
    return out;
}

RoundKey parse_round_key(const std::string& label) {
    RoundKey key;
    if (label.empty()) return key;
    for (const std::string& part : split(label, '|')) key.push_back(parse_history(part));
    return key;
}

std::string to_string(ProtocolVariant v) {
    switch (v) {
        case ProtocolVariant::simple: return "simple";
        case ProtocolVariant::controlled: return "controlled";
        case ProtocolVariant::feedback: return "feedback";
        case ProtocolVariant::multi_round: return "multi_round";
    }
    return "simple";
}

ProtocolVariant parse_variant(const std::string& name) {
    if (name == "simple") return ProtocolVariant::simple;
    if (name == "controlled") return ProtocolVariant::controlled;
    if (name == "feedback") return ProtocolVariant::feedback;
    if (name == "multi_round") return ProtocolVariant::multi_round;
    throw Error(ErrorCode::ParseError, "unknown protocol variant '" + name + "'");
}

ProtocolSpec make_simple_protocol(const QuantumState& state, const HermitianOperator& h,
                                  const Povm& povm, double tau) {
    ProtocolSpec spec;
    spec.variant = ProtocolVariant::simple;
    spec.h = h;
    spec.tau = tau;
    spec.round.initial = state;
    FeedbackStep step;
    step.duration = tau;
    step.policy[History{}] = PolicyEntry{povm.kraus_operators(), {}, std::nullopt};
    spec.round.steps.push_back(std::move(step));
    validate_spec(spec);
    return spec;
}

ProtocolSpec make_controlled_protocol(const QuantumState& state, const HermitianOperator& h,
                                      const Povm& povm, double tau, ControlSchedule control) {
    ProtocolSpec spec = make_simple_protocol(state, h, povm, tau);
    spec.variant = ProtocolVariant::controlled;
    spec.round.steps.front().control = std::move(control);
    validate_spec(spec);
    return spec;
}

double sensing_time(const RoundProtocol& round) {
    double t = 0.0;
    for (const auto& step : round.steps) t += step.duration;
    return t;
}

void validate_spec(const ProtocolSpec& spec) {
    const Index d = spec.h.dim();
    if (d < 1) {
        throw Error(ErrorCode::InvalidArgument, "protocol has no sensing Hamiltonian");
    }
    if (!(spec.tau >= 0.0) || !std::isfinite(spec.tau)) {
        throw Error(ErrorCode::InvalidArgument, "tau must be finite and >= 0");
    }
    if (spec.rounds < 1) {
        throw Error(ErrorCode::InvalidArgument, "rounds must be >= 1");
    }
    if (spec.variant != ProtocolVariant::multi_round) {
        validate_round(spec.round, d, "round");
        if (std::abs(sensing_time(spec.round) - spec.tau) > kDurationTol) {
            throw Error(ErrorCode::ScheduleMismatch, "step durations do not sum to tau");
        }
        return;
    }
    if (spec.round_policy.empty() && !spec.default_round) {
        throw Error(ErrorCode::InvalidArgument, "multi-round protocol has no round policy");
    }
    auto check = [&](const RoundProtocol& r, const std::string& where) {
        validate_round(r, d, where);
        if (sensing_time(r) > spec.tau + kDurationTol) {
            throw Error(ErrorCode::ScheduleMismatch, where + ": round lasts longer than tau");
        }
    };
    for (const auto& [key, r] : spec.round_policy) {
        if (key.size() >= static_cast<std::size_t>(spec.rounds)) {
            throw Error(ErrorCode::InvalidArgument,
                        "round key '" + round_key_label(key) + "' is deeper than the round count");
        }
        check(r, "round '" + round_key_label(key) + "'");
    }
    if (spec.default_round) check(*spec.default_round, "default round");
}

ProtocolSpec strip_feedback(const ProtocolSpec& spec) {
    ProtocolSpec out = spec;
    auto strip_entry = [](PolicyEntry& e) {
        if (e.unitaries.empty()) return;
        for (std::size_t b = 0; b < e.kraus.size(); ++b) e.kraus[b] = e.unitaries[b] * e.kraus[b];
        e.unitaries.clear();
    };
    auto strip_round = [&](RoundProtocol& r) {
        for (auto& step : r.steps) {
            for (auto& [prefix, entry] : step.policy) strip_entry(entry);
            if (step.fallback) strip_entry(*step.fallback);
        }
    };
    strip_round(out.round);
    for (auto& [key, r] : out.round_policy) strip_round(r);
    if (out.default_round) strip_round(*out.default_round);
    return out;
}

std::vector<double> OutcomeDistribution::probabilities() const {
    std::vector<double> p;
    p.reserve(entries.size());
    for (const auto& e : entries) p.push_back(e.p_b);
    return p;
}

LinearizedDistribution OutcomeDistribution::linearized() const {
    std::vector<std::string> labels;
    std::vector<double> p0;
    std::vector<double> dp;
    labels.reserve(entries.size());
    for (const auto& e : entries) {
        labels.push_back(e.label);
        p0.push_back(e.p0);
        dp.push_back(e.dp);
    }
    LinearizedDistribution dist(std::move(labels), std::move(p0), std::move(dp));
    dist.cross_check_residual = cross_check_residual;
    return dist;
}

OutcomeDistribution run_distribution(const ProtocolSpec& spec, double b,
                                     EnumerationOptions options) {
    if (spec.variant == ProtocolVariant::multi_round || spec.rounds > 1) {
        return run_multiround_distribution(spec, b, std::move(options));
    }
    return run_feedback_distribution(spec, b, std::move(options));
}

}  // namespace qmetro
