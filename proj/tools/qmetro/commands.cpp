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

#include "commands.hpp"

#include "qmetro/error.hpp"
#include "qmetro/fisher.hpp"
#include "qmetro/linalg.hpp"
#include "qmetro/montecarlo.hpp"
#include "qmetro/optimal.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

namespace qmetro::cli {

using nlohmann::json;

namespace {

[[noreturn]] void missing(const std::string& what) {
    throw Error(ErrorCode::ParseError, "config is missing " + what);
}

const HermitianOperator& hamiltonian(const ExperimentConfig& c) {
    if (!c.hamiltonian) missing("'hamiltonian'");
    return *c.hamiltonian;
}

// JSON has no infinity; unbounded quantities are written as null.
json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// The config either names a protocol or the pieces of a single measurement.
ProtocolSpec protocol_of(const ExperimentConfig& c) {
    if (c.protocol) return *c.protocol;
    if (!c.state || !c.povm) missing("either 'protocol' or both 'state' and 'povm'");
    if (c.control.empty()) return make_simple_protocol(*c.state, hamiltonian(c), *c.povm, c.tau);
    return make_controlled_protocol(*c.state, hamiltonian(c), *c.povm, c.tau, c.control);
}

double quantum_bound_of(const ProtocolSpec& spec, long long n) {
    return quantum_crb(spectral_spread(spec.h), spec.tau, n) / std::sqrt(static_cast<double>(spec.rounds));
}

json outcomes_json(const OutcomeDistribution& dist) {
    json rows = json::array();
    for (const auto& e : dist.entries) {
        rows.push_back({{"label", e.label}, {"p0", e.p0}, {"dp", e.dp}});
    }
    return rows;
}

void check_regular(bool regular, bool strict) {
    if (strict && !regular) {
        throw Error(ErrorCode::NonRegular,
                    "an outcome with vanishing probability has a non-zero derivative");
    }
}

std::string csv_cell(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_null()) return "inf";
    if (v.is_number_float()) {
        std::ostringstream s;
        s << std::setprecision(17) << v.get<double>();
        return s.str();
    }
    return v.dump();
}

}  // namespace

ExitCode exit_code_for(const Error& e) noexcept {
    switch (e.code()) {
        case ErrorCode::ParseError:
        case ErrorCode::NotHermitian:
        case ErrorCode::InvalidArgument:
        case ErrorCode::DimensionMismatch:
        case ErrorCode::ScheduleMismatch:
        case ErrorCode::NotProjector:
        case ErrorCode::NegativeProbability:
        case ErrorCode::ZeroVector:
        case ErrorCode::CapExceeded:
            return ExitCode::parse;
        case ErrorCode::ZeroSpread:
            return ExitCode::zero_spread;
        case ErrorCode::CrossCheckFailure:
        case ErrorCode::NonRegular:
            return ExitCode::cross_check;
        case ErrorCode::Blowup:
        case ErrorCode::PolicyGap:
            return ExitCode::enumeration;
        default:
            return ExitCode::failure;
    }
}

json cmd_bound(const ExperimentConfig& c) {
    const HermitianOperator& h = hamiltonian(c);
    const EigenSystem eig = eig_hermitian(h);
    const double spread = eig.max() - eig.min();
    const double bound = quantum_crb(spread, c.tau, c.shots);
    return json{{"schema_version", kSchemaVersion},
                {"command", "bound"},
                {"lambda_max", eig.max()},
                {"lambda_min", eig.min()},
                {"spread", spread},
                {"tau", c.tau},
                {"shots", c.shots},
                {"delta_b_min", bound}};
}

json cmd_fisher(const ExperimentConfig& c, const CommandOptions& options) {
    json report{{"schema_version", kSchemaVersion}, {"command", "fisher"}, {"tau", c.tau}, {"shots", c.shots}};
    const FisherOptions fopts{options.strict};

    if (c.protocol || !c.control.empty()) {
        const ProtocolSpec spec = protocol_of(c);
        const OutcomeDistribution dist = run_distribution(spec, 0.0);
        check_regular(dist.regular, options.strict);
        const FisherReport fr = classical_fisher(dist.linearized(), c.shots, fopts);
        report["variant"] = to_string(spec.variant);
        report["rounds"] = spec.rounds;
        report["outcomes"] = outcomes_json(dist);
        report["fisher_per_shot"] = fr.fisher_per_shot;
        report["delta_b_min"] = finite_or_null(fr.delta_b_min);
        report["quantum_bound"] = quantum_bound_of(spec, c.shots);
        report["regular"] = fr.regular && dist.regular;
        report["excluded_outcomes"] = fr.excluded_outcomes;
        report["cross_check_residual"] = dist.cross_check_residual;
        report["prefix_residuals"] = dist.prefix_residuals;
        report["pruned_branches"] = dist.pruned;
        return report;
    }

    if (!c.state || !c.povm) missing("either 'protocol' or both 'state' and 'povm'");
    const HermitianOperator& h = hamiltonian(c);
    const LinearizedDistribution lin = linearize_povm(*c.state, h, *c.povm, c.tau);
    const FisherReport fr = classical_fisher(lin, c.shots, fopts);
    json rows = json::array();
    for (std::size_t i = 0; i < lin.size(); ++i) {
        rows.push_back({{"label", lin.labels()[i]}, {"p0", lin.p0()[i]}, {"dp", lin.dp()[i]}});
    }
    report["variant"] = "simple";
    report["rounds"] = 1;
    report["outcomes"] = rows;
    report["fisher_per_shot"] = fr.fisher_per_shot;
    report["delta_b_min"] = finite_or_null(fr.delta_b_min);
    report["quantum_bound"] = quantum_crb(h, c.tau, c.shots);
    report["regular"] = fr.regular;
    report["excluded_outcomes"] = fr.excluded_outcomes;
    report["cross_check_residual"] = lin.cross_check_residual ? json(*lin.cross_check_residual) : json(nullptr);
    return report;
}

json cmd_simulate(const ExperimentConfig& c, const CommandOptions& options) {
    const std::optional<std::uint64_t> seed = options.seed ? options.seed : c.seed;
    if (!seed) {
        throw Error(ErrorCode::ParseError, "simulate needs an explicit seed (--seed or 'seed' in the config)");
    }
    const ProtocolSpec spec = protocol_of(c);
    const OutcomeDistribution dist = run_distribution(spec, c.b_true);
    check_regular(dist.regular, options.strict);

    ExperimentOptions eo;
    eo.b_true = c.b_true;
    eo.n_shots = c.shots;
    eo.seed = *seed;
    eo.estimator = c.estimator;
    eo.repeats = c.repeats;
    eo.strict = options.strict;
    const ExperimentRun run = run_experiment(spec, dist, eo);
    const AuditVerdict audit = bound_audit(run);

    json rows = json::array();
    for (std::size_t i = 0; i < dist.entries.size(); ++i) {
        const auto& e = dist.entries[i];
        const long long count = run.first_counts.at(i);
        rows.push_back({{"label", e.label},
                        {"p_b", e.p_b},
                        {"p0", e.p0},
                        {"dp", e.dp},
                        {"count", count},
                        {"frequency", static_cast<double>(count) / static_cast<double>(c.shots)}});
    }
    json checks = json::array();
    for (const auto& ch : audit.checks) {
        checks.push_back({{"name", ch.name},
                          {"bound", finite_or_null(ch.bound)},
                          {"z_score", finite_or_null(ch.z_score)},
                          {"pass", ch.pass}});
    }
    return json{{"schema_version", kSchemaVersion},
                {"command", "simulate"},
                {"variant", to_string(spec.variant)},
                {"seed", run.seed},
                {"b_true", run.b_true},
                {"shots", run.n_shots},
                {"repeats", run.repeats},
                {"estimator", to_string(run.estimator)},
                {"outcomes", rows},
                {"cross_check_residual", dist.cross_check_residual},
                {"estimates", run.estimates},
                {"mean_estimate", run.mean_estimate},
                {"sd", run.sd},
                {"standard_error", run.standard_error},
                {"fisher_per_shot", run.fisher_per_shot},
                {"fisher_bound", finite_or_null(run.fisher_bound)},
                {"quantum_bound", run.quantum_bound ? json(*run.quantum_bound) : json(nullptr)},
                {"z_score", finite_or_null(run.z_score)},
                {"regular", run.regular},
                {"warnings", run.warnings},
                {"audit",
                 {{"pass", audit.pass},
                  {"informative", audit.informative},
                  {"applicable", audit.applicable},
                  {"checks", checks}}}};
}

json cmd_optimize(const ExperimentConfig& c) {
    const HermitianOperator& h = hamiltonian(c);
    const OptimalConfiguration opt = optimal_configuration(h);
    json report{{"schema_version", kSchemaVersion},
                {"command", "optimize"},
                {"lambda_max", opt.lambda_max},
                {"lambda_min", opt.lambda_min},
                {"spread", opt.lambda_max - opt.lambda_min},
                {"state", vector_to_json(opt.state.vector())},
                {"observable", matrix_to_json(opt.observable.matrix())},
                {"saturation_ratio", saturation_ratio(opt.state, h, opt.observable)},
                {"delta_b", sensitivity_from_observable(opt.state, h, opt.observable, c.tau, c.shots)}};
    if (h.dim() == 2) {
        ScanOptions so = c.scan;
        so.tau = c.tau;
        so.n = c.shots;
        const ScanResult r = two_level_optimum_scan(h, so);
        report["scan"] = {{"grid", so.grid},
                          {"phi", so.phi},
                          {"alpha", r.alpha},
                          {"theta", r.theta},
                          {"delta_b", finite_or_null(r.delta_b)}};
    }
    return report;
}

std::string to_csv(const json& report) {
    std::ostringstream out;
    if (report.contains("outcomes") && !report.at("outcomes").empty()) {
        const json& rows = report.at("outcomes");
        std::vector<std::string> keys;
        for (const auto& [k, v] : rows.front().items()) keys.push_back(k);
        // Keep the label first; nlohmann orders object keys alphabetically.
        std::stable_partition(keys.begin(), keys.end(), [](const std::string& k) { return k == "label"; });
        for (std::size_t i = 0; i < keys.size(); ++i) out << (i ? "," : "") << keys[i];
        out << '\n';
        for (const json& r : rows) {
            for (std::size_t i = 0; i < keys.size(); ++i) out << (i ? "," : "") << csv_cell(r.at(keys[i]));
            out << '\n';
        }
        return out.str();
    }
    out << "key,value\n";
    for (const auto& [k, v] : report.items()) {
        if (v.is_primitive()) out << k << ',' << csv_cell(v) << '\n';
    }
    return out.str();
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"qmetro: quantum parameter-estimation bounds, protocols and Monte Carlo audits"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_path;
    std::string format = "json";
    bool strict = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "experiment config (JSON)")->required();
        sub->add_option("--seed", seed, "random seed (required by simulate)");
        sub->add_option("--out", out_path, "write the report here instead of stdout");
        sub->add_option("--format", format, "report format")->check(CLI::IsMember({"json", "csv"}));
        sub->add_flag("--strict", strict, "treat non-regular distributions as errors");
    };
    CLI::App* bound = app.add_subcommand("bound", "quantum Cramer-Rao bound of a Hamiltonian");
    CLI::App* fisher = app.add_subcommand("fisher", "classical Fisher information of a measurement or protocol");
    CLI::App* simulate = app.add_subcommand("simulate", "outcome distribution, sampling and bound audit");
    CLI::App* optimize = app.add_subcommand("optimize", "optimal state and observable");
    for (CLI::App* sub : {bound, fisher, simulate, optimize}) add_common(sub);

    std::vector<const char*> argv{"qmetro"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : static_cast<int>(ExitCode::parse);
    }

    try {
        const ExperimentConfig config = load_config(config_path);
        const CommandOptions options{seed, strict};
        json report;
        if (*bound) report = cmd_bound(config);
        if (*fisher) report = cmd_fisher(config, options);
        if (*simulate) report = cmd_simulate(config, options);
        if (*optimize) report = cmd_optimize(config);

        const std::string text = format == "csv" ? to_csv(report) : report.dump(2) + "\n";
        if (out_path.empty()) {
            out << text;
        } else {
            std::ofstream file(out_path);
            if (!file) {
                err << "error: cannot write '" << out_path << "'\n";
                return static_cast<int>(ExitCode::failure);
            }
            file << text;
        }
        return static_cast<int>(ExitCode::ok);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(exit_code_for(e));
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(ExitCode::failure);
    }
}

}  // namespace qmetro::cli
