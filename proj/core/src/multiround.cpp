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
#include "qmetro/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace qmetro {
namespace {

class RoundChain {
public:
    RoundChain(const ProtocolSpec& spec, double b, const EnumerationOptions& options)
        : spec_(spec), b_(b), options_(options) {}

    OutcomeDistribution run() {
        RoundKey key;
        extend(key, 1.0, 1.0, 0.0);
        OutcomeDistribution out;
        out.entries = std::move(entries_);
        out.regular = regular_;
        out.cross_check_residual = residual_;
        out.pruned = pruned_;
        double drift = 0.0;
        for (const auto& e : out.entries) drift += e.dp;
        drift /= static_cast<double>(std::max<std::size_t>(1, out.entries.size()));
        for (auto& e : out.entries) e.dp -= drift;
        return out;
    }

private:
    const RoundProtocol& select(const RoundKey& key) const {
        if (spec_.variant != ProtocolVariant::multi_round) return spec_.round;
        auto it = spec_.round_policy.find(key);
        if (it != spec_.round_policy.end()) return it->second;
        if (spec_.default_round) return *spec_.default_round;
        throw Error(ErrorCode::PolicyGap,
                    "no round protocol for earlier outcomes '" + round_key_label(key) + "'");
    }

    const OutcomeDistribution& round_distribution(const RoundProtocol& round) {
        auto it = cache_.find(&round);
        if (it != cache_.end()) return it->second;
        ProtocolSpec single;
        single.variant = ProtocolVariant::feedback;
        single.h = spec_.h;
        single.tau = sensing_time(round);
        single.round = round;
        EnumerationOptions opts = options_;
        opts.coupled.clear();
        OutcomeDistribution d = run_feedback_distribution(single, b_, opts);
        regular_ = regular_ && d.regular;
        residual_ = std::max(residual_, d.cross_check_residual);
        pruned_ += d.pruned;
        return cache_.emplace(&round, std::move(d)).first->second;
    }

    // Joint P(b), P0 and dP of the rounds in `key` so far; the product rule
    // gives d(P_prev · P_r) = dP_prev · P0_r + P0_prev · dP_r.
    void extend(RoundKey& key, double p_b, double p0, double dp) {
        if (key.size() == static_cast<std::size_t>(spec_.rounds)) {
            if (++count_ > options_.history_cap) {
                throw Error(ErrorCode::Blowup, "joint outcome count exceeds the cap of " +
                                                   std::to_string(options_.history_cap));
            }
            OutcomeEntry e;
            e.rounds = key;
            e.label = round_key_label(key);
            e.p_b = p_b;
            e.p0 = p0;
            e.dp = dp;
            if (p0 < tol::rare_outcome && std::abs(dp) > tol::rare_derivative) regular_ = false;
            entries_.push_back(std::move(e));
            return;
        }
        const OutcomeDistribution& d = round_distribution(select(key));
        for (const OutcomeEntry& r : d.entries) {
            const double jb = p_b * r.p_b;
            const double j0 = p0 * r.p0;
            const double jd = dp * r.p0 + p0 * r.dp;
            if (j0 < tol::rare_outcome && jb < tol::rare_outcome && std::abs(jd) < 1e-13) {
                ++pruned_;
                continue;
            }
            key.push_back(r.rounds.front());
            extend(key, jb, j0, jd);
            key.pop_back();
        }
    }

    const ProtocolSpec& spec_;
    double b_;
    EnumerationOptions options_;
    std::map<const RoundProtocol*, OutcomeDistribution> cache_;
    std::vector<OutcomeEntry> entries_;
    std::size_t count_ = 0;
    std::size_t pruned_ = 0;
    bool regular_ = true;
    double residual_ = 0.0;
};

}  // namespace

OutcomeDistribution run_multiround_distribution(const ProtocolSpec& spec, double b,
                                                EnumerationOptions options) {
    validate_spec(spec);
    return RoundChain(spec, b, options).run();
}

}  // namespace qmetro
