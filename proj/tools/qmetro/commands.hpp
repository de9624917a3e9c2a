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

// Subcommand implementations. Each returns a JSON report; run_cli wires them
// to the command line and maps library errors to exit statuses:
//
//   0  success
//   1  any other runtime failure
//   2  parse / config / usage error
//   3  zero eigenvalue spread
//   4  finite-difference cross-check failure, or non-regular under --strict
//   5  enumeration failure (history blow-up or policy gap)

#pragma once

#include "config.hpp"

#include "qmetro/error.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qmetro::cli {

enum class ExitCode : int {
    ok = 0,
    failure = 1,
    parse = 2,
    zero_spread = 3,
    cross_check = 4,
    enumeration = 5,
};

ExitCode exit_code_for(const Error& e) noexcept;

struct CommandOptions {
    std::optional<std::uint64_t> seed;
    bool strict = false;
};

nlohmann::json cmd_bound(const ExperimentConfig& config);
nlohmann::json cmd_fisher(const ExperimentConfig& config, const CommandOptions& options);
nlohmann::json cmd_simulate(const ExperimentConfig& config, const CommandOptions& options);
nlohmann::json cmd_optimize(const ExperimentConfig& config);

/// CSV rendering of a report: outcome table for fisher/simulate, key,value
/// rows otherwise.
std::string to_csv(const nlohmann::json& report);

/// Full command-line entry point; writes reports to `out` (or --out) and
/// diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qmetro::cli
