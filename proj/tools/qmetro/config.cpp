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

#include "config.hpp"

#include "qmetro/ancilla.hpp"
#include "qmetro/error.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace qmetro::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCode::ParseError, what); }

const json& require(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) fail(std::string("missing field '") + key + "'");
    return j.at(key);
}

double as_number(const json& j, const std::string& what) {
    if (!j.is_number()) fail(what + " must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(what + " must be finite");
    return v;
}

std::vector<double> real_row(const json& j, const std::string& what) {
    if (!j.is_array()) fail(what + " must be an array");
    std::vector<double> row;
    for (const json& x : j) row.push_back(as_number(x, what));
    return row;
}

std::vector<std::vector<double>> real_table(const json& j, const std::string& what) {
    if (!j.is_array() || j.empty()) fail(what + " must be a non-empty array of rows");
    std::vector<std::vector<double>> rows;
    for (const json& r : j) rows.push_back(real_row(r, what));
    for (const auto& r : rows) {
        if (r.size() != rows.front().size() || r.empty()) fail(what + " rows must have equal length");
    }
    return rows;
}

int ancilla_count(const json& j) {
    const double k = as_number(require(j, "ancillas"), "ancillas");
    if (k != std::floor(k)) fail("ancillas must be an integer");
    return static_cast<int>(k);
}

HermitianOperator hamiltonian_from_json(const json& j) {
    if (j.is_object() && j.contains("preset")) {
        const std::string name = j.at("preset").get<std::string>();
        if (name == "ancilla_meas") return ancilla_meas_hamiltonian(ancilla_count(j));
        if (name == "ancilla_effective") return ancilla_effective_hamiltonian(ancilla_count(j));
        fail("unknown Hamiltonian preset '" + name + "'");
    }
    return HermitianOperator(matrix_from_json(j));
}

std::vector<Matrix> matrices_from_json(const json& j, const std::string& what) {
    if (!j.is_array() || j.empty()) fail(what + " must be a non-empty array of matrices");
    std::vector<Matrix> out;
    for (const json& m : j) out.push_back(matrix_from_json(m));
    return out;
}

json matrices_to_json(const std::vector<Matrix>& ms) {
    json arr = json::array();
    for (const Matrix& m : ms) arr.push_back(matrix_to_json(m));
    return arr;
}

Povm povm_from_json(const json& j) {
    if (!j.is_object()) fail("povm must be an object");
    if (j.contains("elements")) return Povm::from_elements(matrices_from_json(j.at("elements"), "elements"));
    if (j.contains("kraus")) return Povm::from_measurement_operators(matrices_from_json(j.at("kraus"), "kraus"));
    if (j.contains("projective")) return Povm::projective(matrix_from_json(j.at("projective")));
    if (j.contains("eigenbasis_of")) {
        return Povm::eigenbasis_of(HermitianOperator(matrix_from_json(j.at("eigenbasis_of"))));
    }
    fail("povm needs one of 'elements', 'kraus', 'projective', 'eigenbasis_of'");
}

json povm_to_json(const Povm& p) {
    if (p.has_measurement_operators()) return json{{"kraus", matrices_to_json(p.measurement_operators())}};
    return json{{"elements", matrices_to_json(p.elements())}};
}

ControlSchedule schedule_from_json(const json& j) {
    if (!j.is_array()) fail("control must be an array of segments");
    ControlSchedule s;
    for (const json& seg : j) {
        s.push_back({HermitianOperator(matrix_from_json(require(seg, "h0"))),
                     as_number(require(seg, "duration"), "duration")});
    }
    return s;
}

json schedule_to_json(const ControlSchedule& s) {
    json arr = json::array();
    for (const auto& seg : s) arr.push_back({{"h0", matrix_to_json(seg.h0.matrix())}, {"duration", seg.duration}});
    return arr;
}

PolicyEntry entry_from_json(const json& j) {
    PolicyEntry e;
    e.kraus = matrices_from_json(require(j, "kraus"), "kraus");
    if (j.contains("unitaries")) e.unitaries = matrices_from_json(j.at("unitaries"), "unitaries");
    if (j.contains("control")) e.control = schedule_from_json(j.at("control"));
    return e;
}

json entry_to_json(const PolicyEntry& e) {
    json j{{"kraus", matrices_to_json(e.kraus)}};
    if (!e.unitaries.empty()) j["unitaries"] = matrices_to_json(e.unitaries);
    if (e.control) j["control"] = schedule_to_json(*e.control);
    return j;
}

RoundProtocol round_from_json(const json& j) {
    RoundProtocol r;
    r.initial = state_from_json(require(j, "initial"));
    const json& steps = require(j, "steps");
    if (!steps.is_array()) fail("steps must be an array");
    for (const json& s : steps) {
        FeedbackStep step;
        step.duration = as_number(require(s, "duration"), "duration");
        if (s.contains("control")) step.control = schedule_from_json(s.at("control"));
        if (s.contains("policy")) {
            if (!s.at("policy").is_object()) fail("policy must map history labels to entries");
            for (const auto& [label, entry] : s.at("policy").items()) {
                step.policy[parse_history(label)] = entry_from_json(entry);
            }
        }
        if (s.contains("fallback")) step.fallback = entry_from_json(s.at("fallback"));
        r.steps.push_back(std::move(step));
    }
    return r;
}

json round_to_json(const RoundProtocol& r) {
    json steps = json::array();
    for (const auto& s : r.steps) {
        json js{{"duration", s.duration}};
        if (!s.control.empty()) js["control"] = schedule_to_json(s.control);
        json policy = json::object();
        for (const auto& [prefix, entry] : s.policy) policy[history_label(prefix)] = entry_to_json(entry);
        js["policy"] = policy;
        if (s.fallback) js["fallback"] = entry_to_json(*s.fallback);
        steps.push_back(std::move(js));
    }
    return json{{"initial", state_to_json(r.initial)}, {"steps", steps}};
}

}  // namespace

json matrix_to_json(const Matrix& m) {
    json re = json::array();
    json im = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json rr = json::array();
        json ri = json::array();
        for (Index k = 0; k < m.cols(); ++k) {
            rr.push_back(m(i, k).real());
            ri.push_back(m(i, k).imag());
        }
        re.push_back(std::move(rr));
        im.push_back(std::move(ri));
    }
    return json{{"re", re}, {"im", im}};
}

Matrix matrix_from_json(const json& j) {
    const json& re_j = j.is_object() ? require(j, "re") : j;
    const auto re = real_table(re_j, "matrix");
    Matrix m(static_cast<Index>(re.size()), static_cast<Index>(re.front().size()));
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index k = 0; k < m.cols(); ++k) m(i, k) = re[i][k];
    }
    if (j.is_object() && j.contains("im")) {
        const auto im = real_table(j.at("im"), "matrix imaginary part");
        if (im.size() != re.size() || im.front().size() != re.front().size()) {
            fail("matrix real and imaginary parts differ in shape");
        }
        for (Index i = 0; i < m.rows(); ++i) {
            for (Index k = 0; k < m.cols(); ++k) m(i, k) += Complex(0.0, im[i][k]);
        }
    }
    return m;
}

json vector_to_json(const Vector& v) {
    json re = json::array();
    json im = json::array();
    for (Index i = 0; i < v.size(); ++i) {
        re.push_back(v(i).real());
        im.push_back(v(i).imag());
    }
    return json{{"re", re}, {"im", im}};
}

Vector vector_from_json(const json& j) {
    const auto re = real_row(j.is_object() ? require(j, "re") : j, "vector");
    if (re.empty()) fail("vector must not be empty");
    Vector v(static_cast<Index>(re.size()));
    for (Index i = 0; i < v.size(); ++i) v(i) = re[i];
    if (j.is_object() && j.contains("im")) {
        const auto im = real_row(j.at("im"), "vector imaginary part");
        if (im.size() != re.size()) fail("vector real and imaginary parts differ in length");
        for (Index i = 0; i < v.size(); ++i) v(i) += Complex(0.0, im[i]);
    }
    return v;
}

json state_to_json(const QuantumState& s) {
    if (s.is_pure()) return json{{"vector", vector_to_json(s.vector())}};
    if (s.has_stored_decomposition()) {
        json comps = json::array();
        for (const auto& c : s.decomposition()) {
            comps.push_back({{"weight", c.weight}, {"vector", vector_to_json(c.vector)}});
        }
        return json{{"mixture", comps}};
    }
    return json{{"density", matrix_to_json(s.density())}};
}

QuantumState state_from_json(const json& j) {
    if (!j.is_object()) fail("state must be an object");
    if (j.contains("vector")) {
        const Vector v = vector_from_json(j.at("vector"));
        return j.value("normalize", false) ? QuantumState::pure_normalized(v) : QuantumState::pure(v);
    }
    if (j.contains("density")) return QuantumState::mixed(matrix_from_json(j.at("density")));
    if (j.contains("mixture")) {
        std::vector<PureComponent> comps;
        for (const json& c : j.at("mixture")) {
            comps.push_back({as_number(require(c, "weight"), "weight"), vector_from_json(require(c, "vector"))});
        }
        return QuantumState::mixture(std::move(comps));
    }
    if (j.contains("preset")) {
        if (j.at("preset") == "ancilla_initial") return ancilla_initial_state(ancilla_count(j));
        fail("unknown state preset");
    }
    fail("state needs one of 'vector', 'density', 'mixture', 'preset'");
}

json protocol_to_json(const ProtocolSpec& spec) {
    json j{{"variant", to_string(spec.variant)},
           {"tau", spec.tau},
           {"rounds", spec.rounds},
           {"hamiltonian", matrix_to_json(spec.h.matrix())}};
    if (spec.variant != ProtocolVariant::multi_round) {
        j["round"] = round_to_json(spec.round);
        return j;
    }
    json policy = json::object();
    for (const auto& [key, r] : spec.round_policy) policy[round_key_label(key)] = round_to_json(r);
    j["round_policy"] = policy;
    if (spec.default_round) j["default_round"] = round_to_json(*spec.default_round);
    return j;
}

ProtocolSpec protocol_from_json(const json& j, const std::optional<HermitianOperator>& h, double tau) {
    if (!j.is_object()) fail("protocol must be an object");
    if (j.contains("preset")) {
        if (j.at("preset") != "ancilla") fail("unknown protocol preset");
        const double t = j.contains("tau") ? as_number(j.at("tau"), "tau") : tau;
        const double lambda = j.contains("lambda") ? as_number(j.at("lambda"), "lambda") : 1.0;
        return build_ancilla_protocol(ancilla_count(j), t, lambda);
    }
    ProtocolSpec spec;
    spec.variant = parse_variant(require(j, "variant").get<std::string>());
    if (j.contains("hamiltonian")) {
        spec.h = hamiltonian_from_json(j.at("hamiltonian"));
    } else if (h) {
        spec.h = *h;
    } else {
        fail("protocol needs a Hamiltonian");
    }
    spec.tau = j.contains("tau") ? as_number(j.at("tau"), "tau") : tau;
    if (j.contains("rounds")) spec.rounds = static_cast<int>(as_number(j.at("rounds"), "rounds"));
    if (spec.variant == ProtocolVariant::multi_round) {
        if (j.contains("round_policy")) {
            for (const auto& [label, r] : j.at("round_policy").items()) {
                spec.round_policy[parse_round_key(label)] = round_from_json(r);
            }
        }
        if (j.contains("default_round")) spec.default_round = round_from_json(j.at("default_round"));
    } else {
        spec.round = round_from_json(require(j, "round"));
    }
    validate_spec(spec);
    return spec;
}

ExperimentConfig parse_config(const json& doc) {
    try {
        if (!doc.is_object()) fail("config must be a JSON object");
        if (doc.contains("schema_version") && doc.at("schema_version") != kSchemaVersion) {
            fail("unsupported schema_version (expected " + std::to_string(kSchemaVersion) + ")");
        }
        ExperimentConfig c;
        if (doc.contains("hamiltonian")) c.hamiltonian = hamiltonian_from_json(doc.at("hamiltonian"));
        if (doc.contains("tau")) c.tau = as_number(doc.at("tau"), "tau");
        if (doc.contains("shots")) {
            const double n = as_number(doc.at("shots"), "shots");
            if (n < 1 || n != std::floor(n)) fail("shots must be a positive integer");
            c.shots = static_cast<long long>(n);
        }
        if (doc.contains("state")) c.state = state_from_json(doc.at("state"));
        if (doc.contains("povm")) c.povm = povm_from_json(doc.at("povm"));
        if (doc.contains("control")) c.control = schedule_from_json(doc.at("control"));
        if (doc.contains("protocol")) c.protocol = protocol_from_json(doc.at("protocol"), c.hamiltonian, c.tau);
        if (!c.hamiltonian && c.protocol) c.hamiltonian = c.protocol->h;
        if (doc.contains("estimator")) c.estimator = parse_estimator(doc.at("estimator").get<std::string>());
        if (doc.contains("b_true")) c.b_true = as_number(doc.at("b_true"), "b_true");
        if (doc.contains("repeats")) {
            const double r = as_number(doc.at("repeats"), "repeats");
            if (r < 1 || r != std::floor(r)) fail("repeats must be a positive integer");
            c.repeats = static_cast<int>(r);
        }
        if (doc.contains("seed")) {
            if (!doc.at("seed").is_number_unsigned()) fail("seed must be an unsigned integer");
            c.seed = doc.at("seed").get<std::uint64_t>();
        }
        if (doc.contains("scan")) {
            const json& s = doc.at("scan");
            if (s.contains("grid")) c.scan.grid = static_cast<int>(as_number(s.at("grid"), "grid"));
            if (s.contains("phi")) c.scan.phi = as_number(s.at("phi"), "phi");
        }
        c.scan.tau = c.tau;
        c.scan.n = c.shots;
        return c;
    } catch (const json::exception& e) {
        fail(std::string("malformed config: ") + e.what());
    }
}

ExperimentConfig parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        fail(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(doc);
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_text(text.str());
}

json serialize(const ExperimentConfig& c) {
    json j{{"schema_version", kSchemaVersion},
           {"tau", c.tau},
           {"shots", c.shots},
           {"estimator", to_string(c.estimator)},
           {"b_true", c.b_true},
           {"repeats", c.repeats},
           {"scan", {{"grid", c.scan.grid}, {"phi", c.scan.phi}}}};
    if (c.hamiltonian) j["hamiltonian"] = matrix_to_json(c.hamiltonian->matrix());
    if (c.state) j["state"] = state_to_json(*c.state);
    if (c.povm) j["povm"] = povm_to_json(*c.povm);
    if (!c.control.empty()) j["control"] = schedule_to_json(c.control);
    if (c.protocol) j["protocol"] = protocol_to_json(*c.protocol);
    if (c.seed) j["seed"] = *c.seed;
    return j;
}

}  // namespace qmetro::cli
