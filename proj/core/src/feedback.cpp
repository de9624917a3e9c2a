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

// History enumeration for single-round protocols.
//
// Each branch carries unnormalized vectors, so a history's probability is the
// squared norm of its branch vector and conditional probabilities multiply
// automatically. Alongside the state at b we propagate the state at b = 0 and
// its exact tangent d/db, giving dP = 2 Re⟨ψ₀|ψ'⟩ without differencing. States
// at ±h feed the finite-difference cross-check.

#include "qmetro/protocol.hpp"

#include "qmetro/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace qmetro {
namespace {

// Branches with P0 and P(b) below ε and a negligible derivative carry no
// first-order weight and are dropped. Anything with a visible derivative stays
// so that Σ dP = 0 survives pruning; classical_fisher then excludes or flags it.
constexpr double kPruneDerivative = 1e-13;

struct StepMaps {
    Matrix u_b;   // U at the requested b
    Matrix u_0;   // U at b = 0
    Matrix du_0;  // dU/db at b = 0
    Matrix u_p;   // U at +h
    Matrix u_m;   // U at −h
};

struct Branch {
    Vector at_b;
    Vector at_0;
    Vector tangent;
    Vector plus;
    Vector minus;
};

struct Accumulator {
    double p_b = 0.0;
    double p0 = 0.0;
    double dp = 0.0;
    double p_plus = 0.0;
    double p_minus = 0.0;
};

class Enumerator {
public:
    Enumerator(const ProtocolSpec& spec, double b, const EnumerationOptions& options)
        : spec_(spec), b_(b), options_(options), d_(spec.h.dim()) {
        const std::size_t k = spec.round.steps.size();
        coupled_ = options.coupled.empty() ? std::vector<bool>(k, true) : options.coupled;
        if (coupled_.size() != k) {
            throw Error(ErrorCode::InvalidArgument, "coupling mask must have one flag per step");
        }
        spread_ = spectral_spread(spec.h);
        double coupled_time = 0.0;
        for (std::size_t s = 0; s < k; ++s) {
            if (coupled_[s]) coupled_time += spec.round.steps[s].duration;
        }
        scale_ = coupled_time * spread_;
        fd_ = options.cross_check && scale_ > 0.0;
        h_fd_ = fd_ ? tol::fd_step / scale_ : 0.0;
        depth_mass_.assign(k, 0.0);
        depth_count_.assign(k, 0);
    }

    OutcomeDistribution run() {
        for (const PureComponent& c : spec_.round.initial.decomposition()) {
            if (c.weight <= 0.0) continue;
            weight_ = c.weight;
            Branch root{c.vector, c.vector, Vector::Zero(d_), Vector(), Vector()};
            if (fd_) {
                root.plus = c.vector;
                root.minus = c.vector;
            }
            History hist;
            descend(0, hist, root);
        }
        return finish();
    }

private:
    const StepMaps& maps_for(std::size_t step, const ControlSchedule& schedule) {
        auto key = std::make_pair(step, static_cast<const void*>(&schedule));
        auto it = maps_.find(key);
        if (it != maps_.end()) return it->second;

        const FeedbackStep& st = spec_.round.steps[step];
        const bool coupled = coupled_[step];
        const Matrix id = Matrix::Identity(d_, d_);
        StepMaps m{id, id, Matrix::Zero(d_, d_), id, id};

        std::vector<ControlSegment> segments = schedule;
        if (segments.empty()) {
            segments.push_back({HermitianOperator(Matrix::Zero(d_, d_)), st.duration});
        }
        for (const ControlSegment& seg : segments) {
            if (seg.duration == 0.0) continue;
            Matrix u0;
            Matrix du0 = Matrix::Zero(d_, d_);
            if (coupled) {
                std::tie(u0, du0) = propagator_with_derivative(seg.h0, spec_.h.matrix(), seg.duration);
            } else {
                u0 = propagator(seg.h0, seg.duration);
            }
            auto at = [&](double x) {
                if (!coupled || x == 0.0) return u0;
                return propagator(seg.h0 + spec_.h * x, seg.duration);
            };
            const Matrix ub = at(b_);
            m.du_0 = du0 * m.u_0 + u0 * m.du_0;
            m.u_0 = u0 * m.u_0;
            m.u_b = ub * m.u_b;
            if (fd_) {
                m.u_p = at(h_fd_) * m.u_p;
                m.u_m = at(-h_fd_) * m.u_m;
            }
        }
        return maps_.emplace(key, std::move(m)).first->second;
    }

    const std::vector<Matrix>& operators_for(const PolicyEntry& entry) {
        auto it = ops_.find(&entry);
        if (it != ops_.end()) return it->second;
        std::vector<Matrix> ops = entry.kraus;
        if (!entry.unitaries.empty()) {
            for (std::size_t b = 0; b < ops.size(); ++b) ops[b] = entry.unitaries[b] * ops[b];
        }
        return ops_.emplace(&entry, std::move(ops)).first->second;
    }

    const PolicyEntry& entry_for(std::size_t step, const History& hist) const {
        const FeedbackStep& st = spec_.round.steps[step];
        auto it = st.policy.find(hist);
        if (it != st.policy.end()) return it->second;
        if (st.fallback) return *st.fallback;
        throw Error(ErrorCode::PolicyGap, "no policy for reachable prefix '" + history_label(hist) +
                                              "' at step " + std::to_string(step));
    }

    void descend(std::size_t step, History& hist, const Branch& in) {
        if (step == spec_.round.steps.size()) {
            Accumulator& acc = leaves_[hist];
            acc.p_b += weight_ * in.at_b.squaredNorm();
            acc.p0 += weight_ * in.at_0.squaredNorm();
            acc.dp += weight_ * 2.0 * in.at_0.dot(in.tangent).real();
            if (fd_) {
                acc.p_plus += weight_ * in.plus.squaredNorm();
                acc.p_minus += weight_ * in.minus.squaredNorm();
            }
            return;
        }
        const PolicyEntry& entry = entry_for(step, hist);
        const ControlSchedule& schedule =
            entry.control ? *entry.control : spec_.round.steps[step].control;
        const StepMaps& m = maps_for(step, schedule);

        Branch evolved;
        evolved.at_0 = m.u_0 * in.at_0;
        evolved.tangent = m.u_0 * in.tangent + m.du_0 * in.at_0;
        evolved.at_b = m.u_b * in.at_b;
        if (fd_) {
            evolved.plus = m.u_p * in.plus;
            evolved.minus = m.u_m * in.minus;
        }

        const std::vector<Matrix>& ops = operators_for(entry);
        for (std::size_t beta = 0; beta < ops.size(); ++beta) {
            const Matrix& k = ops[beta];
            Branch out;
            out.at_0 = k * evolved.at_0;
            out.tangent = k * evolved.tangent;
            out.at_b = k * evolved.at_b;
            const double p0 = out.at_0.squaredNorm();
            const double pb = out.at_b.squaredNorm();
            const double dp = 2.0 * out.at_0.dot(out.tangent).real();
            depth_mass_[step] += weight_ * p0;
            if (p0 < tol::rare_outcome && pb < tol::rare_outcome &&
                std::abs(dp) < kPruneDerivative) {
                ++pruned_;
                continue;
            }
            if (++depth_count_[step] > options_.history_cap) {
                throw Error(ErrorCode::Blowup, "outcome-history count exceeds the cap of " +
                                                   std::to_string(options_.history_cap));
            }
            if (fd_) {
                out.plus = k * evolved.plus;
                out.minus = k * evolved.minus;
            }
            hist.push_back(static_cast<int>(beta));
            descend(step + 1, hist, out);
            hist.pop_back();
        }
    }

    OutcomeDistribution finish() {
        OutcomeDistribution dist;
        dist.pruned = pruned_;
        double worst = 0.0;
        double largest = 0.0;
        for (auto& [hist, acc] : leaves_) {
            OutcomeEntry e;
            e.rounds = RoundKey{hist};
            e.label = history_label(hist);
            e.p_b = acc.p_b;
            e.p0 = acc.p0;
            e.dp = acc.dp;
            if (e.p0 < tol::rare_outcome && std::abs(e.dp) > tol::rare_derivative) {
                dist.regular = false;
            }
            if (fd_) {
                const double fd = (acc.p_plus - acc.p_minus) / (2.0 * h_fd_);
                worst = std::max(worst, std::abs(fd - e.dp));
            }
            largest = std::max(largest, std::abs(e.dp));
            dist.entries.push_back(std::move(e));
        }
        if (dist.entries.empty()) {
            throw Error(ErrorCode::InvalidArgument, "protocol has no reachable outcome");
        }
        // Σ dP vanishes analytically; remove round-off drift.
        double drift = 0.0;
        for (const auto& e : dist.entries) drift += e.dp;
        drift /= static_cast<double>(dist.entries.size());
        for (auto& e : dist.entries) e.dp -= drift;

        for (double mass : depth_mass_) dist.prefix_residuals.push_back(std::abs(mass - 1.0));
        if (fd_) {
            dist.cross_check_residual = worst / std::max(largest, tol::fd_cross_check * scale_);
            if (dist.cross_check_residual > tol::fd_cross_check) {
                throw Error(ErrorCode::CrossCheckFailure,
                            "tangent and finite-difference history derivatives differ by relative " +
                                std::to_string(dist.cross_check_residual));
            }
        }
        return dist;
    }

    const ProtocolSpec& spec_;
    double b_;
    EnumerationOptions options_;
    Index d_;
    std::vector<bool> coupled_;
    double spread_ = 0.0;
    double scale_ = 0.0;
    bool fd_ = false;
    double h_fd_ = 0.0;
    double weight_ = 1.0;
    std::map<std::pair<std::size_t, const void*>, StepMaps> maps_;
    std::map<const PolicyEntry*, std::vector<Matrix>> ops_;
    std::map<History, Accumulator> leaves_;
    std::vector<double> depth_mass_;
    std::vector<std::size_t> depth_count_;
    std::size_t pruned_ = 0;
};

}  // namespace

OutcomeDistribution run_feedback_distribution(const ProtocolSpec& spec, double b,
                                              EnumerationOptions options) {
    if (spec.variant == ProtocolVariant::multi_round) {
        throw Error(ErrorCode::InvalidArgument, "use run_multiround_distribution for multi_round");
    }
    validate_spec(spec);
    return Enumerator(spec, b, options).run();
}

std::vector<double> step_fisher_contributions(const ProtocolSpec& spec) {
    validate_spec(spec);
    if (spec.variant == ProtocolVariant::multi_round) {
        throw Error(ErrorCode::InvalidArgument, "step contributions need a single-round protocol");
    }
    const std::size_t k = spec.round.steps.size();
    std::vector<double> out;
    out.reserve(k);
    for (std::size_t l = 0; l < k; ++l) {
        EnumerationOptions opts;
        opts.coupled.assign(k, false);
        opts.coupled[l] = true;
        const OutcomeDistribution dist = run_feedback_distribution(spec, 0.0, opts);
        out.push_back(classical_fisher(dist.linearized(), 1).fisher_per_shot);
    }
    return out;
}

}  // namespace qmetro
