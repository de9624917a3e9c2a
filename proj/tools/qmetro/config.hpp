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

// Experiment configs: JSON documents with complex matrices written as
// {"re": [[...]], "im": [[...]]} ("im" optional). Presets are expanded on
// parse, so serialize() always writes concrete matrices.

#pragma once

#include "qmetro/control.hpp"
#include "qmetro/montecarlo.hpp"
#include "qmetro/optimal.hpp"
#include "qmetro/protocol.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>

namespace qmetro::cli {

inline constexpr int kSchemaVersion = 1;

struct ExperimentConfig {
    std::optional<HermitianOperator> hamiltonian;
    double tau = 1.0;
    long long shots = 1;
    std::optional<QuantumState> state;
    std::optional<Povm> povm;
    ControlSchedule control;
    std::optional<ProtocolSpec> protocol;
    EstimatorKind estimator = EstimatorKind::mle;
    double b_true = 0.0;
    int repeats = 1;
    std::optional<std::uint64_t> seed;
    ScanOptions scan;
};

/// Throws Error(ParseError) on malformed input and propagates model
/// validation errors (NotHermitian, InvalidArgument, ...).
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config(const std::string& path);

nlohmann::json serialize(const ExperimentConfig& config);

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);
nlohmann::json vector_to_json(const Vector& v);
Vector vector_from_json(const nlohmann::json& j);

nlohmann::json state_to_json(const QuantumState& s);
QuantumState state_from_json(const nlohmann::json& j);

nlohmann::json protocol_to_json(const ProtocolSpec& spec);
ProtocolSpec protocol_from_json(const nlohmann::json& j, const std::optional<HermitianOperator>& h,
                                double tau);

}  // namespace qmetro::cli
